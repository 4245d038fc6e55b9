#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "cmspaces/automorphisms.hpp"
#include "cmspaces/cm2.hpp"
#include "cmspaces/flexibility.hpp"
#include "cmspaces/invariants.hpp"
#include "cmspaces/matrix_pair.hpp"

namespace cmspaces {

using Json = nlohmann::json;

// Complex numbers travel as [re, im] arrays of finite doubles.
Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

// {"n": int, "X": [[[re,im],...],...], "Y": ...}
Json pair_to_json(const MatrixPair& p);
MatrixPair pair_from_json(const Json& j);

// {"lambdas": [[re,im],...], "alphas": [[re,im],...]}
Json wilson_to_json(const WilsonChartPoint& w);
WilsonChartPoint wilson_from_json(const Json& j);

Json program_to_json(const AutoProgram& prog);
AutoProgram program_from_json(const Json& j);

Json fingerprint_to_json(const InvariantFingerprint& fp);
InvariantFingerprint fingerprint_from_json(const Json& j);

// Floating coordinates plus an optional exact Gaussian-rational encoding
// {"num": [a, b], "den": c} per component.
Json cm2_to_json(const CM2Coords& c);
CM2Coords cm2_from_json(const Json& j);
Json cm2_exact_to_json(const CM2CoordsExact& c);
CM2CoordsExact cm2_exact_from_json(const Json& j);

Json compat_report_to_json(const CompatReport& r);
Json span_report_to_json(const SpanReport& r);
Json flex_summary_to_json(const FlexSummary& s);
Json semihom_report_to_json(const SemiHomReport& r);
Json membership_to_json(const MembershipReport& r);
Json equiv_result_to_json(const EquivResult& r);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace cmspaces
