#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cmspaces/matrix_pair.hpp"

namespace cmspaces {

// Tangent directions of the complete Calogero-Moser flows at p, one row per
// field: (0, X^k) and (Y^k, 0) for k = 1..n, flattened into C^(2n^2).
Matrix flow_tangent_stack(const MatrixPair& p);

// Tangent directions of the conjugation orbit: ([E_ij, X], [E_ij, Y]) for the
// n^2 elementary matrices. The identity commutes with everything, so the
// span has dimension n^2 - 1 at members (the center acts trivially).
Matrix orbit_tangent_stack(const MatrixPair& p);

struct RankDecision {
    int rank = 0;
    double gap = 0.0;      // sigma_rank / sigma_{rank+1} at the cut
    bool reliable = true;  // gap >= reliability threshold (or no cut at all)
    std::vector<double> singular_values;
};

// Numeric rank with relative cutoff rel_cut * sigma_1 after row
// normalization. Decisions with gap below reliability_gap are flagged.
RankDecision numeric_rank(const Matrix& stack, double rel_cut = 1e-8,
                          double reliability_gap = 1e3);

struct SpanReport {
    int n = 0;
    MatrixPair point;
    int orbit_rank = 0;
    int combined_rank = 0;
    int quotient_span = 0;  // combined - orbit
    bool passed = false;    // quotient_span == 2n
    double singular_value_gap = 0.0;
    bool reliable = true;
    std::vector<double> sv_orbit;
    std::vector<double> sv_combined;
};

struct FlexSummary {
    int n = 0;
    int samples = 0;
    int passes = 0;
    int flagged_unreliable = 0;
};

// Samples members in the Wilson chart and measures how much of the quotient
// tangent space the 2n flow fields span on top of the orbit directions.
std::pair<std::vector<SpanReport>, FlexSummary> flexibility_check(
    int n, int samples, std::uint64_t seed, const Tolerances& tol = {});

// The isotropy maps of a base point:
//   F_k(X, Y) = (X + (tr Y - tr Y0) Y^k, Y)
//   G_k(X, Y) = (X, Y + (tr X - tr X0) X^k)
std::pair<MatrixPair, MatrixPair> fk_gk_maps(const MatrixPair& p,
                                             const MatrixPair& base, int k,
                                             const Tolerances& tol = {});

// Finite-difference derivative block of G_k at the base point: the Y-response
// per unit tr(dX), an n x n matrix equal to X0^k = diag(lambda^k) at Wilson
// base points. probe = (dX, dY) with tr(dX) bounded away from zero.
Matrix dgk_lower_left_block(const MatrixPair& base, int k, const Matrix& dx,
                            const Matrix& dy, double step,
                            const Tolerances& tol = {});

// Chart coordinates (lambda, alpha) of a pair whose X has distinct
// eigenvalues, with eigenvalues matched against a reference ordering.
WilsonChartPoint to_wilson_chart(const MatrixPair& p, const Vector& lambda_ref);

struct SemiHomReport {
    int n = 0;
    int rank = 0;
    bool passed = false;  // rank == 2n
    double singular_value_gap = 0.0;
    bool reliable = true;
};

// Picks a generic Wilson base point and a tangent vector w with all chart
// components bounded away from zero, pushes w through dF_k and dG_k for
// k = 0..n-1 in chart coordinates, and checks that the images together with
// w span the full 2n-dimensional space. zero_lambda_block zeroes the lambda
// half of w (the negative control: every lambda-projection of w trivial).
SemiHomReport semi_homogeneity_check(int n, std::uint64_t seed,
                                     const Tolerances& tol = {},
                                     bool zero_lambda_block = false);

}  // namespace cmspaces
