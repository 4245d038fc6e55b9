#include "cmspaces/flexibility.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <stdexcept>
#include <thread>

#include "cmspaces/assignment.hpp"
#include "cmspaces/rng.hpp"

namespace cmspaces {

namespace {

void flatten_into(Matrix& stack, int row, const Matrix& dx, const Matrix& dy) {
    const int n = static_cast<int>(dx.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            stack(row, i * n + j) = dx(i, j);
            stack(row, n * n + i * n + j) = dy(i, j);
        }
}

int thread_cap() {
    if (const char* env = std::getenv("CM_SPACES_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic parallel map: work items are independent and results are
// stored by index, so scheduling cannot change the output.
template <class Fn>
void parallel_for_index(int count, Fn fn) {
    const int threads = std::min(thread_cap(), std::max(count, 1));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        futures.push_back(std::async(std::launch::async, [&, t] {
            for (int i = t; i < count; i += threads) fn(i);
        }));
    }
    for (auto& f : futures) f.get();
}

// Four-point Cauchy-ring derivative of a holomorphic curve h -> (X(h), Y(h))
// at h = 0, exact through cubic terms.
std::pair<Matrix, Matrix> ring_derivative(
    const std::function<std::pair<Matrix, Matrix>(Complex)>& curve,
    double radius) {
    const Complex i(0.0, 1.0);
    const auto fp = curve(Complex(radius, 0.0));
    const auto fm = curve(Complex(-radius, 0.0));
    const auto fi = curve(Complex(0.0, radius));
    const auto fmi = curve(Complex(0.0, -radius));
    const double r4 = 4.0 * radius;
    return {(fp.first - fm.first - i * fi.first + i * fmi.first) / r4,
            (fp.second - fm.second - i * fi.second + i * fmi.second) / r4};
}

Vector chart_vector(const WilsonChartPoint& w) {
    const int n = w.size();
    Vector v(2 * n);
    v.head(n) = w.lambdas;
    v.tail(n) = w.alphas;
    return v;
}

}  // namespace

Matrix flow_tangent_stack(const MatrixPair& p) {
    const int n = p.size();
    Matrix stack = Matrix::Zero(2 * n, 2 * n * n);
    const Matrix zero = Matrix::Zero(n, n);
    Matrix xk = Matrix::Identity(n, n);
    Matrix yk = Matrix::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        xk = xk * p.X();
        yk = yk * p.Y();
        flatten_into(stack, k - 1, zero, xk);
        flatten_into(stack, n + k - 1, yk, zero);
    }
    return stack;
}

Matrix orbit_tangent_stack(const MatrixPair& p) {
    const int n = p.size();
    Matrix stack = Matrix::Zero(n * n, 2 * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = 1.0;
            flatten_into(stack, i * n + j, e * p.X() - p.X() * e,
                         e * p.Y() - p.Y() * e);
        }
    return stack;
}

RankDecision numeric_rank(const Matrix& stack, double rel_cut,
                          double reliability_gap) {
    Matrix normalized = stack;
    for (Eigen::Index r = 0; r < normalized.rows(); ++r) {
        const double norm = normalized.row(r).norm();
        if (norm > 0.0) normalized.row(r) /= norm;
    }
    Eigen::JacobiSVD<Matrix> svd(normalized);
    const auto& sv = svd.singularValues();
    RankDecision d;
    d.singular_values.assign(sv.data(), sv.data() + sv.size());
    if (sv.size() == 0 || sv[0] <= 0.0) {
        d.rank = 0;
        d.gap = std::numeric_limits<double>::infinity();
        d.reliable = true;
        return d;
    }
    const double cut = rel_cut * sv[0];
    int rank = 0;
    while (rank < sv.size() && sv[rank] > cut) ++rank;
    d.rank = rank;
    if (rank == sv.size() || sv[rank] <= 0.0)
        d.gap = std::numeric_limits<double>::infinity();
    else if (rank == 0)
        d.gap = 0.0;
    else
        d.gap = sv[rank - 1] / sv[rank];
    d.reliable = d.gap >= reliability_gap;
    return d;
}

std::pair<std::vector<SpanReport>, FlexSummary> flexibility_check(
    int n, int samples, std::uint64_t seed, const Tolerances& tol) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    SampleOptions opts;
    opts.count = samples;
    opts.seed = seed;
    std::vector<MatrixPair> points;
    try {
        points = sample(n, opts, tol);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("sampling failure");
    }

    std::vector<SpanReport> reports;
    reports.reserve(samples);
    for (const MatrixPair& p : points)
        reports.push_back(SpanReport{n, p, 0, 0, 0, false, 0.0, true, {}, {}});

    parallel_for_index(samples, [&](int i) {
        SpanReport& r = reports[i];
        const Matrix orbit = orbit_tangent_stack(r.point);
        const Matrix flows = flow_tangent_stack(r.point);
        Matrix combined(orbit.rows() + flows.rows(), orbit.cols());
        combined << orbit, flows;
        const RankDecision od = numeric_rank(orbit, tol.rank_tol);
        const RankDecision cd = numeric_rank(combined, tol.rank_tol);
        r.orbit_rank = od.rank;
        r.combined_rank = cd.rank;
        r.quotient_span = cd.rank - od.rank;
        r.passed = (r.quotient_span == 2 * n);
        r.singular_value_gap = std::min(od.gap, cd.gap);
        r.reliable = od.reliable && cd.reliable;
        r.sv_orbit = od.singular_values;
        r.sv_combined = cd.singular_values;
    });

    FlexSummary summary{n, samples, 0, 0};
    for (const SpanReport& r : reports) {
        if (r.passed) ++summary.passes;
        if (!r.reliable) ++summary.flagged_unreliable;
    }
    return {std::move(reports), summary};
}

std::pair<MatrixPair, MatrixPair> fk_gk_maps(const MatrixPair& p,
                                             const MatrixPair& base, int k,
                                             const Tolerances& tol) {
    (void)tol;
    // Polynomial formulas, total on the ambient matrix-pair space; the
    // finite-difference probes evaluate them off the variety on purpose.
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    const int n = p.size();
    if (base.size() != n) throw std::invalid_argument("base size mismatch");
    Matrix yk = Matrix::Identity(n, n);
    Matrix xk = Matrix::Identity(n, n);
    for (int i = 0; i < k; ++i) {
        yk = yk * p.Y();
        xk = xk * p.X();
    }
    const Complex dy_tr = p.Y().trace() - base.Y().trace();
    const Complex dx_tr = p.X().trace() - base.X().trace();
    MatrixPair fk(p.X() + dy_tr * yk, p.Y());
    MatrixPair gk(p.X(), p.Y() + dx_tr * xk);
    return {std::move(fk), std::move(gk)};
}

Matrix dgk_lower_left_block(const MatrixPair& base, int k, const Matrix& dx,
                            const Matrix& dy, double step,
                            const Tolerances& tol) {
    const Complex tr_dx = dx.trace();
    if (std::abs(tr_dx) < 1e-8)
        throw std::invalid_argument("probe direction has vanishing trace");
    auto curve = [&](Complex h) {
        const MatrixPair moved(base.X() + h * dx, base.Y() + h * dy);
        auto [fk, gk] = fk_gk_maps(moved, base, k, tol);
        (void)fk;
        return std::pair<Matrix, Matrix>{gk.X(), gk.Y()};
    };
    const auto [ddx, ddy] = ring_derivative(curve, step);
    (void)ddx;
    return (ddy - dy) / tr_dx;
}

WilsonChartPoint to_wilson_chart(const MatrixPair& p, const Vector& lambda_ref) {
    const int n = p.size();
    if (lambda_ref.size() != n)
        throw std::invalid_argument("reference eigenvalue count mismatch");
    Eigen::ComplexEigenSolver<Matrix> es(p.X(), /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue computation failed");
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost(i, j) = std::abs(es.eigenvalues()[i] - lambda_ref[j]);
    std::vector<int> row_of_col;
    min_cost_assignment(cost, &row_of_col);
    Vector lambdas(n);
    Matrix v(n, n);
    for (int j = 0; j < n; ++j) {
        lambdas[j] = es.eigenvalues()[row_of_col[j]];
        v.col(j) = es.eigenvectors().col(row_of_col[j]);
    }
    const Matrix y_in_frame = v.fullPivLu().solve(p.Y()) * v;
    return WilsonChartPoint(std::move(lambdas), y_in_frame.diagonal());
}

SemiHomReport semi_homogeneity_check(int n, std::uint64_t seed,
                                     const Tolerances& tol,
                                     bool zero_lambda_block) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    Rng rng(seed);

    // Generic base point with comfortable chart separation.
    Vector lambda0(n), alpha0(n);
    for (int attempt = 0;; ++attempt) {
        if (attempt > 1000) throw std::runtime_error("base point not in chart");
        for (int i = 0; i < n; ++i) {
            lambda0[i] = rng.complex_gauss();
            alpha0[i] = rng.complex_gauss();
        }
        if (chart_separation(lambda0) > std::max(tol.sep_tol, 0.05)) break;
    }
    const WilsonChartPoint w0(lambda0, alpha0);
    const MatrixPair p0 = from_wilson_chart(w0, tol);

    // Tangent direction with every chart component (and both trace sums)
    // bounded away from zero.
    Vector dl(n), da(n);
    for (;;) {
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            dl[i] = rng.complex_gauss();
            da[i] = rng.complex_gauss();
            if (std::abs(dl[i]) < 0.1 || std::abs(da[i]) < 0.1) ok = false;
        }
        if (ok && std::abs(dl.sum()) > 0.1 && std::abs(da.sum()) > 0.1) break;
    }
    if (zero_lambda_block) dl.setZero();

    Vector w_vec(2 * n);
    w_vec.head(n) = dl;
    w_vec.tail(n) = da;

    Matrix stack(2 * n + 1, 2 * n);
    stack.row(0) = w_vec.transpose();
    for (int k = 0; k < n; ++k) {
        auto chart_curve = [&](bool use_fk) {
            return [&, use_fk](Complex h) -> std::pair<Matrix, Matrix> {
                Vector l = lambda0 + h * dl;
                Vector a = alpha0 + h * da;
                const MatrixPair moved =
                    from_wilson_chart(WilsonChartPoint(l, a), tol);
                auto [fk, gk] = fk_gk_maps(moved, p0, k, tol);
                const MatrixPair& img = use_fk ? fk : gk;
                const WilsonChartPoint c = to_wilson_chart(img, lambda0);
                // Pack the chart vector into a 2n x 1 "matrix" pair slot.
                Matrix packed(2 * n, 1);
                packed.col(0) = chart_vector(c);
                return {packed, Matrix::Zero(1, 1)};
            };
        };
        const auto [dfk, unused_f] = ring_derivative(chart_curve(true), tol.fd_step);
        const auto [dgk, unused_g] = ring_derivative(chart_curve(false), tol.fd_step);
        (void)unused_f;
        (void)unused_g;
        stack.row(1 + k) = dfk.col(0).transpose();
        stack.row(1 + n + k) = dgk.col(0).transpose();
    }

    const RankDecision rd = numeric_rank(stack, tol.rank_tol);
    SemiHomReport report;
    report.n = n;
    report.rank = rd.rank;
    report.passed = (rd.rank == 2 * n);
    report.singular_value_gap = rd.gap;
    report.reliable = rd.reliable;
    return report;
}

}  // namespace cmspaces
