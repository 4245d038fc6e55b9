#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmspaces/matrix_pair.hpp"

namespace cmspaces {

// Conjugation-invariant signature of a pair: eigenvalue multisets of X and Y
// plus traces of short words in {X, Y}. Equality of fingerprints is necessary
// (not sufficient) for GL_n-equivalence.
struct InvariantFingerprint {
    std::vector<Complex> eig_x;  // sorted lexicographically by (Re, Im)
    std::vector<Complex> eig_y;
    std::map<std::string, Complex> trace_words;  // canonical cyclic words
};

// (eigenvalues of X, eigenvalues of Y), each sorted by (Re, Im).
std::pair<std::vector<Complex>, std::vector<Complex>> eigen_map(
    const MatrixPair& p, const Tolerances& tol = {});

InvariantFingerprint fingerprint(const MatrixPair& p, int max_len = 4,
                                 const Tolerances& tol = {});

// Minimum-cost matching distance between two complex multisets of equal size.
double multiset_distance(const std::vector<Complex>& a,
                         const std::vector<Complex>& b);

// Max over all components of the matched distances, normalized by the data
// scale. Both fingerprints must use the same word length.
double fingerprint_distance(const InvariantFingerprint& a,
                            const InvariantFingerprint& b);

enum class Equivalence { Equivalent, Distinct, Inconclusive };

std::string to_string(Equivalence e);

struct EquivResult {
    Equivalence verdict = Equivalence::Inconclusive;
    std::optional<Matrix> conjugator;  // present when recovered explicitly
    std::string detail;
};

// Decides GL_n-equivalence where possible. "Distinct" is sound (fingerprints
// differ beyond tolerance, or the intertwiner system has no solution);
// "equivalent" carries an explicit conjugator when one is found, or relies on
// the exact n <= 2 canonical forms. Inconclusive otherwise.
EquivResult equiv_test(const MatrixPair& p, const MatrixPair& q,
                       const Tolerances& tol = {}, double fp_tol = 1e-6);

}  // namespace cmspaces
