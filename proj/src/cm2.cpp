#include "cmspaces/cm2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmspaces/rng.hpp"

namespace cmspaces {

namespace {

using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

bool lex_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Kernel vector of a numerically singular 2x2 matrix, read off the better
// conditioned row.
Vector2 kernel_vector(const Matrix2& m) {
    const double r0 = std::abs(m(0, 0)) + std::abs(m(0, 1));
    const double r1 = std::abs(m(1, 0)) + std::abs(m(1, 1));
    Vector2 v;
    if (r0 >= r1)
        v << m(0, 1), -m(0, 0);
    else
        v << m(1, 1), -m(1, 0);
    if (v.norm() == 0.0) {
        v << 1.0, 0.0;  // m vanishes entirely: any vector works
        return v;
    }
    return v / v.norm();
}

double coords_scale(const CM2Coords& c) {
    return std::max({1.0, std::abs(c.lambda), std::abs(c.eps), std::abs(c.x11),
                     std::abs(c.x21), std::abs(c.delta)});
}

}  // namespace

MatrixPair cm2_to_pair(const CM2Coords& c, const Tolerances& tol) {
    tol.validate();
    const double scale =
        1.0 + std::norm(c.x21) + std::abs(c.eps * c.delta * c.x21);
    if (std::abs(cm2_constraint(c)) > 1e-8 * scale)
        throw std::invalid_argument("off-variety input");
    Matrix x(2, 2), y(2, 2);
    x << c.x11, 0.0, c.x21, c.x11 + c.delta;
    y << c.lambda, 1.0, 0.0, c.lambda + c.eps;
    return MatrixPair(std::move(x), std::move(y));
}

CM2Coords pair_to_cm2(const MatrixPair& p, const Tolerances& tol) {
    if (p.size() != 2) throw std::invalid_argument("n != 2");
    require_member(p, tol);

    const Matrix2 y = p.Y();
    const Complex tr = y.trace();
    const Complex det = y(0, 0) * y(1, 1) - y(0, 1) * y(1, 0);
    const Complex disc = tr * tr - 4.0 * det;
    const Complex root = std::sqrt(disc);
    Complex mu1 = 0.5 * (tr - root);
    Complex mu2 = 0.5 * (tr + root);
    if (lex_less(mu2, mu1)) std::swap(mu1, mu2);

    const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    Matrix2 s;
    Complex lambda, eps;
    if (std::abs(mu2 - mu1) > 1e-12 * y_scale) {
        lambda = mu1;
        eps = mu2 - mu1;
        const Vector2 v1 = kernel_vector(y - mu1 * Matrix2::Identity());
        const Vector2 v2 = kernel_vector(y - mu2 * Matrix2::Identity());
        s.col(0) = v1;
        s.col(1) = -v1 / eps + v2;
    } else {
        // Double eigenvalue: Y is never scalar on the variety, so Y - lambda
        // is nilpotent of rank 1 and {Nv, v} is a cyclic basis.
        lambda = 0.5 * tr;
        eps = 0.0;
        const Matrix2 nil = y - lambda * Matrix2::Identity();
        Vector2 v;
        v << 1.0, 0.0;
        if ((nil * v).norm() < 0.5 * nil.norm()) v << 0.0, 1.0;
        if ((nil * v).norm() == 0.0)
            throw std::runtime_error("canonicalization failed: scalar Y");
        s.col(0) = nil * v;
        s.col(1) = v;
        s /= std::max(s.col(0).norm(), s.col(1).norm());
    }

    Eigen::FullPivLU<Matrix2> lu(s);
    if (std::abs(lu.determinant()) < 1e-14)
        throw std::runtime_error("canonicalization failed: singular basis");
    const Matrix2 xp = lu.solve(p.X()) * s;

    const Complex x11p = xp(0, 0), x12p = xp(0, 1), x21p = xp(1, 0),
                  x22p = xp(1, 1);
    const Complex delta_pre = x22p - x11p;
    const Complex disc_x = delta_pre * delta_pre + 4.0 * x12p * x21p;
    Complex h = 0.5 * (delta_pre + std::sqrt(disc_x));

    const double x_scale = std::max(1.0, xp.cwiseAbs().maxCoeff());
    // The stabilizer element [[g, h], [0, eps*h + g]] with g = x21p must stay
    // invertible; fall back to the other root of the h-quadratic if not.
    if (std::abs(eps * h + x21p) < 1e-12 * x_scale) h = delta_pre - h;
    if (std::abs(eps * h + x21p) < 1e-12 * x_scale || std::abs(x21p) < 1e-12 * x_scale)
        throw std::runtime_error("canonicalization failed: degenerate stabilizer");

    CM2Coords c;
    c.lambda = lambda;
    c.eps = eps;
    c.x11 = x11p + h;
    c.x21 = x21p + eps * h;
    c.delta = (x22p - h) - c.x11;

    const double res_scale =
        1.0 + std::norm(c.x21) + std::abs(c.eps * c.delta * c.x21);
    if (std::abs(cm2_constraint(c)) > 1e-6 * res_scale)
        throw std::runtime_error("canonicalization failed: constraint residual");
    return c;
}

double cm2_distance(const CM2Coords& a, const CM2Coords& b) {
    const double scale = std::max(coords_scale(a), coords_scale(b));
    double d = std::abs(a.lambda - b.lambda);
    d = std::max(d, std::abs(a.eps - b.eps));
    d = std::max(d, std::abs(a.x11 - b.x11));
    d = std::max(d, std::abs(a.x21 - b.x21));
    d = std::max(d, std::abs(a.delta - b.delta));
    return d / scale;
}

bool same_z2_orbit(const CM2Coords& a, const CM2Coords& b, double tol_rel) {
    for (const CM2Coords& img : z2_orbit(b))
        if (cm2_distance(a, img) <= tol_rel) return true;
    return false;
}

namespace {

using ExactCoords = CM2CoordsT<GaussianRational>;
using GR = GaussianRational;

GR gr(std::int64_t num_re, std::int64_t den = 1, std::int64_t num_im = 0) {
    return GR(Rational(num_re, den), Rational(num_im, den));
}

std::vector<ExactCoords> exact_grid() {
    const std::vector<GR> lambdas = {gr(-2), gr(-1, 2), gr(0), gr(1, 2, 1),
                                     gr(3)};
    const std::vector<GR> x11s = {gr(-1), gr(0), gr(0, 3, 1), gr(1, 1, -1),
                                  gr(2)};
    // (eps, x21) pairs; delta is solved from the constraint so every grid
    // point lies exactly on the variety.
    const std::vector<std::pair<GR, GR>> eps_x21 = {
        {gr(1), gr(1)},       {gr(-1), gr(-1)},   {gr(1, 2), gr(1, 2)},
        {gr(-2), gr(2)},      {gr(1, 3), gr(-2, 3)}};
    std::vector<ExactCoords> grid;
    grid.reserve(125);
    for (const GR& l : lambdas)
        for (const GR& x : x11s)
            for (const auto& [e, x21] : eps_x21) {
                const GR delta = (GR(1) - x21 * x21) / (e * x21);
                grid.push_back({l, e, x, x21, delta});
            }
    return grid;
}

const std::vector<GR>& exact_times() {
    static const std::vector<GR> times = {gr(1), gr(-1, 2), gr(2, 1, 1),
                                          gr(-5, 3)};
    return times;
}

struct ExactFns {
    static GR a(const ExactCoords& c) { return GR(2) * c.lambda + c.eps; }
    static GR tr_x(const ExactCoords& c) { return GR(2) * c.x11 + c.delta; }
    static GR d2(const ExactCoords& c) { return c.delta * c.delta; }
    static GR e2(const ExactCoords& c) { return c.eps * c.eps; }
    static GR w(const ExactCoords& c) { return c.x21 + GR(1) / c.x21; }
};

struct FloatFns {
    static Complex a(const CM2Coords& c) { return 2.0 * c.lambda + c.eps; }
    static Complex tr_x(const CM2Coords& c) { return 2.0 * c.x11 + c.delta; }
    static Complex d2(const CM2Coords& c) { return c.delta * c.delta; }
    static Complex e2(const CM2Coords& c) { return c.eps * c.eps; }
    static Complex w(const CM2Coords& c) { return c.x21 + 1.0 / c.x21; }
};

std::string describe_point(const ExactCoords& c) {
    return "(" + c.lambda.to_string() + ", " + c.eps.to_string() + ", " +
           c.x11.to_string() + ", " + c.x21.to_string() + ", " +
           c.delta.to_string() + ")";
}

// Runs one clause over both backends and appends the two entries.
template <class ExactCheck, class FloatCheck>
void run_clause(CompatReport& report, const std::string& name,
                const std::vector<ExactCoords>& grid,
                const std::vector<CM2Coords>& cloud, ExactCheck exact_check,
                FloatCheck float_check) {
    CompatClause exact{name, "exact", true, 0.0, ""};
    for (const ExactCoords& c : grid) {
        std::string why;
        if (!exact_check(c, &why)) {
            exact.passed = false;
            exact.detail = "failed at " + describe_point(c) +
                           (why.empty() ? "" : ": " + why);
            break;
        }
    }
    report.clauses.push_back(exact);

    CompatClause fl{name, "float", true, 0.0, ""};
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double res = float_check(cloud[i]);
        fl.max_residual = std::max(fl.max_residual, res);
        if (res > 1e-10) {
            fl.passed = false;
            fl.detail = "residual " + std::to_string(res) + " at sample " +
                        std::to_string(i);
        }
    }
    report.clauses.push_back(fl);
}

std::vector<CM2Coords> float_cloud(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CM2Coords> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        CM2Coords c;
        c.lambda = rng.complex_gauss();
        c.x11 = rng.complex_gauss();
        c.eps = rng.complex_gauss();
        c.x21 = rng.complex_gauss();
        if (std::abs(c.eps) < 0.1 || std::abs(c.x21) < 0.1) continue;
        c.delta = (1.0 - c.x21 * c.x21) / (c.eps * c.x21);
        out.push_back(c);
    }
    return out;
}

}  // namespace

CompatReport verify_compatible_pair() {
    CompatReport report;
    const std::vector<ExactCoords> grid = exact_grid();
    const std::vector<CM2Coords> cloud = float_cloud(200, 0x5eed);
    report.exact_grid_points = static_cast<int>(grid.size());
    report.float_samples = static_cast<int>(cloud.size());

    // Sanity: every exact grid point satisfies the constraint exactly.
    for (const ExactCoords& c : grid)
        if (!cm2_constraint(c).is_zero())
            throw std::logic_error("exact grid left the variety");

    // (i) Theta2(a) = 0: a is constant along phi.
    run_clause(
        report, "theta2_annihilates_a", grid, cloud,
        [](const ExactCoords& c, std::string*) {
            for (const GR& t : exact_times())
                if (ExactFns::a(cm2_flow(c, CM2Flow::Phi, t)) != ExactFns::a(c))
                    return false;
            return true;
        },
        [](const CM2Coords& c) {
            double res = 0.0;
            for (double t : {1.0, -0.5, 2.25})
                res = std::max(res,
                               std::abs(FloatFns::a(cm2_flow(
                                            c, CM2Flow::Phi, Complex(t))) -
                                        FloatFns::a(c)));
            return res;
        });

    // (ii) a has degree one along psi: a(psi_s) = a + 2s, second difference 0.
    run_clause(
        report, "theta1_a_degree_one", grid, cloud,
        [](const ExactCoords& c, std::string* why) {
            for (const GR& s : exact_times()) {
                if (ExactFns::a(cm2_flow(c, CM2Flow::Psi, s)) !=
                    ExactFns::a(c) + GR(2) * s) {
                    *why = "a(psi_s) != a + 2s";
                    return false;
                }
            }
            // Theta1(Theta1(a)) = 0: increments are independent of the point.
            const GR s1 = exact_times()[0], s2 = exact_times()[1];
            const ExactCoords c1 = cm2_flow(c, CM2Flow::Psi, s1);
            if (ExactFns::a(cm2_flow(c1, CM2Flow::Psi, s2)) -
                    ExactFns::a(c1) !=
                ExactFns::a(cm2_flow(c, CM2Flow::Psi, s2)) - ExactFns::a(c)) {
                *why = "second difference of a along psi is nonzero";
                return false;
            }
            return true;
        },
        [](const CM2Coords& c) {
            double res = 0.0;
            for (double s : {1.0, -0.5, 2.25})
                res = std::max(res,
                               std::abs(FloatFns::a(cm2_flow(
                                            c, CM2Flow::Psi, Complex(s))) -
                                        FloatFns::a(c) - 2.0 * s));
            return res;
        });

    // (iii) Kernel memberships: ker Theta1 > {d2, e2, w, trX},
    //       ker Theta2 > {d2, e2, w, a}.
    run_clause(
        report, "kernel_memberships", grid, cloud,
        [](const ExactCoords& c, std::string* why) {
            for (const GR& t : exact_times()) {
                const ExactCoords cpsi = cm2_flow(c, CM2Flow::Psi, t);
                if (ExactFns::d2(cpsi) != ExactFns::d2(c) ||
                    ExactFns::e2(cpsi) != ExactFns::e2(c) ||
                    ExactFns::w(cpsi) != ExactFns::w(c) ||
                    ExactFns::tr_x(cpsi) != ExactFns::tr_x(c)) {
                    *why = "ker Theta1 membership failed";
                    return false;
                }
                const ExactCoords cphi = cm2_flow(c, CM2Flow::Phi, t);
                if (ExactFns::d2(cphi) != ExactFns::d2(c) ||
                    ExactFns::e2(cphi) != ExactFns::e2(c) ||
                    ExactFns::w(cphi) != ExactFns::w(c) ||
                    ExactFns::a(cphi) != ExactFns::a(c)) {
                    *why = "ker Theta2 membership failed";
                    return false;
                }
            }
            return true;
        },
        [](const CM2Coords& c) {
            double res = 0.0;
            for (double t : {1.0, -0.5, 2.25}) {
                const CM2Coords cpsi = cm2_flow(c, CM2Flow::Psi, Complex(t));
                const CM2Coords cphi = cm2_flow(c, CM2Flow::Phi, Complex(t));
                res = std::max(
                    {res, std::abs(FloatFns::d2(cpsi) - FloatFns::d2(c)),
                     std::abs(FloatFns::e2(cpsi) - FloatFns::e2(c)),
                     std::abs(FloatFns::w(cpsi) - FloatFns::w(c)),
                     std::abs(FloatFns::tr_x(cpsi) - FloatFns::tr_x(c)),
                     std::abs(FloatFns::d2(cphi) - FloatFns::d2(c)),
                     std::abs(FloatFns::e2(cphi) - FloatFns::e2(c)),
                     std::abs(FloatFns::w(cphi) - FloatFns::w(c)),
                     std::abs(FloatFns::a(cphi) - FloatFns::a(c))});
            }
            return res;
        });

    // (iv) The ideal witness: (2 x11 + delta) * (2 lambda + eps) and its
    // generator multiples factor into ker Theta1 * ker Theta2.
    run_clause(
        report, "ideal_product_factors", grid, cloud,
        [](const ExactCoords& c, std::string* why) {
            const std::vector<GR> kernel1 = {ExactFns::d2(c), ExactFns::e2(c),
                                             ExactFns::w(c), ExactFns::tr_x(c)};
            for (const GR& t : exact_times()) {
                const ExactCoords cpsi = cm2_flow(c, CM2Flow::Psi, t);
                const ExactCoords cphi = cm2_flow(c, CM2Flow::Phi, t);
                // h * trX stays in ker Theta1 for every listed generator h,
                // and a stays in ker Theta2; their product is the multiple.
                const std::vector<GR> kernel1_flowed = {
                    ExactFns::d2(cpsi), ExactFns::e2(cpsi), ExactFns::w(cpsi),
                    ExactFns::tr_x(cpsi)};
                for (std::size_t i = 0; i < kernel1.size(); ++i) {
                    if (kernel1_flowed[i] * ExactFns::tr_x(cpsi) !=
                        kernel1[i] * ExactFns::tr_x(c)) {
                        *why = "kernel-1 multiple not psi-invariant";
                        return false;
                    }
                }
                if (ExactFns::a(cphi) != ExactFns::a(c)) {
                    *why = "kernel-2 factor not phi-invariant";
                    return false;
                }
            }
            return true;
        },
        [](const CM2Coords& c) {
            double res = 0.0;
            for (double t : {1.0, -0.5, 2.25}) {
                const CM2Coords cpsi = cm2_flow(c, CM2Flow::Psi, Complex(t));
                const CM2Coords cphi = cm2_flow(c, CM2Flow::Phi, Complex(t));
                res = std::max(
                    {res,
                     std::abs(FloatFns::d2(cpsi) * FloatFns::tr_x(cpsi) -
                              FloatFns::d2(c) * FloatFns::tr_x(c)),
                     std::abs(FloatFns::a(cphi) - FloatFns::a(c))});
            }
            return res;
        });

    report.passed = true;
    for (const CompatClause& cl : report.clauses)
        if (!cl.passed) report.passed = false;
    return report;
}

}  // namespace cmspaces
