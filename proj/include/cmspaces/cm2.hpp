#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cmspaces/matrix_pair.hpp"
#include "cmspaces/rational.hpp"

namespace cmspaces {

// Affine coordinates (lambda, eps, x11, x21, delta) for n = 2, subject to
// x21^2 + eps*delta*x21 - 1 = 0. Templated so the same formulas run in
// floating point and in exact Gaussian-rational arithmetic.
template <class S>
struct CM2CoordsT {
    S lambda{};
    S eps{};
    S x11{};
    S x21{};
    S delta{};
};

using CM2Coords = CM2CoordsT<Complex>;
using CM2CoordsExact = CM2CoordsT<GaussianRational>;

template <class S>
S cm2_constraint(const CM2CoordsT<S>& c) {
    return c.x21 * c.x21 + c.eps * c.delta * c.x21 - S(1);
}

// First identification: exchanges the two representatives of X
// (conjugation within the stabilizer of Y).
template <class S>
CM2CoordsT<S> z2_action_1(const CM2CoordsT<S>& c) {
    return {c.lambda, c.eps, c.x11 + c.delta, c.x21 + c.eps * c.delta, -c.delta};
}

// Second identification: exchanges the eigenvalues of Y.
template <class S>
CM2CoordsT<S> z2_action_2(const CM2CoordsT<S>& c) {
    return {c.lambda + c.eps, -c.eps, c.x11, c.x21 + c.eps * c.delta, c.delta};
}

enum class CM2Flow { Phi, Psi };  // phi shifts x11, psi shifts lambda

template <class S>
CM2CoordsT<S> cm2_flow(const CM2CoordsT<S>& c, CM2Flow flow, const S& t) {
    CM2CoordsT<S> out = c;
    if (flow == CM2Flow::Phi)
        out.x11 = c.x11 + t;
    else
        out.lambda = c.lambda + t;
    return out;
}

// The two actions commute, so the orbit is {c, a1 c, a2 c, a1 a2 c}
// (listed with possible repetitions; its support has size 1, 2 or 4).
template <class S>
std::vector<CM2CoordsT<S>> z2_orbit(const CM2CoordsT<S>& c) {
    const CM2CoordsT<S> a1 = z2_action_1(c);
    return {c, a1, z2_action_2(c), z2_action_2(a1)};
}

// Generators of the invariant ring: delta^2, eps^2, tr Y, tr X, x21 + 1/x21.
template <class S>
struct CM2GeneratorsT {
    S d2{};
    S e2{};
    S tr_y{};
    S tr_x{};
    S w{};
};

using CM2Generators = CM2GeneratorsT<Complex>;

namespace detail {
inline bool scalar_is_zero(const Complex& z) { return z == Complex(0.0); }
inline bool scalar_is_zero(const GaussianRational& z) { return z.is_zero(); }
}  // namespace detail

template <class S>
CM2GeneratorsT<S> cm2_generators(const CM2CoordsT<S>& c) {
    if (detail::scalar_is_zero(c.x21)) throw std::domain_error("x21 vanishes");
    return {c.delta * c.delta, c.eps * c.eps, S(2) * c.lambda + c.eps,
            S(2) * c.x11 + c.delta, c.x21 + S(1) / c.x21};
}

// The (X,Y) -> (Y^T, X^T) automorphism in these coordinates.
template <class S>
CM2CoordsT<S> transpose_swap_coords(const CM2CoordsT<S>& c) {
    return {c.x11, c.delta, c.lambda, c.x21, c.eps};
}

// X = [[x11, 0], [x21, x11+delta]], Y = [[lambda, 1], [0, lambda+eps]].
// Throws std::invalid_argument("off-variety input") when the constraint
// residual is out of tolerance.
MatrixPair cm2_to_pair(const CM2Coords& c, const Tolerances& tol = {});

// Canonicalization: triangularize Y (Jordan-type basis in the double
// eigenvalue case), then kill x12 inside the stabilizer of Y using the
// principal branch of the root formula. Requires a member with n = 2.
CM2Coords pair_to_cm2(const MatrixPair& p, const Tolerances& tol = {});

// Relative max-coordinate distance between coordinate tuples.
double cm2_distance(const CM2Coords& a, const CM2Coords& b);

// True when b lies in the Z2 x Z2 orbit of a, within relative tolerance.
bool same_z2_orbit(const CM2Coords& a, const CM2Coords& b, double tol_rel);

struct CompatClause {
    std::string name;
    std::string backend;  // "exact" or "float"
    bool passed = false;
    double max_residual = 0.0;
    std::string detail;
};

struct CompatReport {
    bool passed = false;
    int exact_grid_points = 0;
    int float_samples = 0;
    std::vector<CompatClause> clauses;
};

// Certifies the compatible pair Theta1 = d/dlambda, Theta2 = d/dx11 with
// degree-one element a = 2*lambda + eps: (i) a is constant along phi,
// (ii) a is exactly linear along psi with derivative 2, (iii) the stated
// kernel memberships, (iv) the product (2 x11 + delta)(2 lambda + eps) and
// its generator multiples factor through the two kernels. Runs exactly on a
// 5x5x5 rational grid on the variety and in floating point on random points.
CompatReport verify_compatible_pair();

}  // namespace cmspaces
