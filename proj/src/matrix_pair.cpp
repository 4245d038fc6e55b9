#include "cmspaces/matrix_pair.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace cmspaces {

namespace {

bool all_finite(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const Complex& z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                return false;
        }
    return true;
}

bool all_finite(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
            return false;
    return true;
}

}  // namespace

void Tolerances::validate() const {
    if (!(rank_tol > 0.0) || !(sep_tol > 0.0) || !(fd_step > 0.0))
        throw std::invalid_argument("tolerances must be strictly positive");
}

MatrixPair::MatrixPair(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.rows() < 1 || x_.rows() != x_.cols())
        throw std::invalid_argument("X must be square and non-empty");
    if (y_.rows() != x_.rows() || y_.cols() != x_.cols())
        throw std::invalid_argument("X and Y must have the same shape");
    if (!all_finite(x_) || !all_finite(y_))
        throw std::invalid_argument("matrix entries must be finite");
}

Matrix commutator_defect(const MatrixPair& p) {
    const Matrix& x = p.X();
    const Matrix& y = p.Y();
    Matrix d = x * y - y * x;
    d += Matrix::Identity(p.size(), p.size());
    return d;
}

MembershipReport membership(const MatrixPair& p, const Tolerances& tol) {
    tol.validate();
    MembershipReport r;
    const Matrix d = commutator_defect(p);
    if (p.size() == 1) {
        r.sigma1 = std::abs(d(0, 0));
        r.sigma2 = 0.0;
        r.member = r.sigma1 > 0.0;
        if (!r.member) r.note = "zero defect matrix";
        return r;
    }
    Eigen::JacobiSVD<Matrix> svd(d);
    const auto& sv = svd.singularValues();
    r.sigma1 = sv[0];
    r.sigma2 = sv[1];
    if (r.sigma1 <= 0.0) {
        r.member = false;
        r.note = "zero defect matrix";
        return r;
    }
    r.member = (r.sigma2 / r.sigma1) < tol.rank_tol;
    return r;
}

bool is_member(const MatrixPair& p, const Tolerances& tol) {
    return membership(p, tol).member;
}

void require_member(const MatrixPair& p, const Tolerances& tol) {
    if (!is_member(p, tol)) throw std::domain_error("not a member");
}

MatrixPair conjugate(const MatrixPair& p, const Matrix& g, double det_floor) {
    if (g.rows() != p.size() || g.cols() != p.size())
        throw std::invalid_argument("conjugator has wrong size");
    Eigen::FullPivLU<Matrix> lu(g);
    if (std::abs(lu.determinant()) <= det_floor)
        throw std::invalid_argument("singular conjugator");
    const Matrix gi = lu.inverse();
    return MatrixPair(g * p.X() * gi, g * p.Y() * gi);
}

WilsonChartPoint::WilsonChartPoint(Vector l, Vector a)
    : lambdas(std::move(l)), alphas(std::move(a)) {
    if (lambdas.size() < 1 || lambdas.size() != alphas.size())
        throw std::invalid_argument("lambdas and alphas must have equal positive length");
    if (!all_finite(lambdas) || !all_finite(alphas))
        throw std::invalid_argument("chart coordinates must be finite");
}

double chart_separation(const Vector& lambdas) {
    const int n = static_cast<int>(lambdas.size());
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(lambdas[i]));
    double min_sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            min_sep = std::min(min_sep, std::abs(lambdas[i] - lambdas[j]));
    if (n == 1) return std::numeric_limits<double>::infinity();
    return min_sep / scale;
}

MatrixPair from_wilson_chart(const WilsonChartPoint& w, const Tolerances& tol) {
    tol.validate();
    const int n = w.size();
    if (chart_separation(w.lambdas) <= tol.sep_tol)
        throw std::invalid_argument("eigenvalue collision");
    Matrix x = Matrix::Zero(n, n);
    Matrix y = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        x(i, i) = w.lambdas[i];
        y(i, i) = w.alphas[i];
        for (int j = 0; j < n; ++j)
            if (j != i) y(i, j) = 1.0 / (w.lambdas[i] - w.lambdas[j]);
    }
    return MatrixPair(std::move(x), std::move(y));
}

Matrix random_matrix(int n, Rng& rng) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.complex_gauss();
    return m;
}

Matrix random_conjugator(int n, Rng& rng, double max_cond) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix g = random_matrix(n, rng);
        if (n == 1) return g.cwiseAbs()(0, 0) > 1e-6 ? g : Matrix::Identity(1, 1);
        Eigen::JacobiSVD<Matrix> svd(g);
        const auto& sv = svd.singularValues();
        if (sv[n - 1] > 0.0 && sv[0] / sv[n - 1] <= max_cond) return g;
    }
    throw std::runtime_error("sampling exhausted");
}

Eigen::Matrix2cd random_sl2(Rng& rng) {
    for (;;) {
        const Complex a = rng.complex_gauss();
        if (std::abs(a) < 0.1) continue;
        const Complex b = rng.complex_gauss();
        const Complex c = rng.complex_gauss();
        const Complex d = (1.0 + b * c) / a;
        Eigen::Matrix2cd m;
        m << a, b, c, d;
        return m;
    }
}

std::vector<MatrixPair> sample(int n, const SampleOptions& opts,
                               const Tolerances& tol) {
    tol.validate();
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (opts.count < 0) throw std::invalid_argument("count must be non-negative");
    Rng rng(opts.seed);
    std::vector<MatrixPair> out;
    out.reserve(static_cast<std::size_t>(opts.count));
    int rejects = 0;
    while (static_cast<int>(out.size()) < opts.count) {
        Vector lambdas(n), alphas(n);
        for (int i = 0; i < n; ++i) {
            lambdas[i] = rng.complex_gauss();
            alphas[i] = rng.complex_gauss();
        }
        if (chart_separation(lambdas) <= tol.sep_tol) {
            if (++rejects > opts.max_rejects)
                throw std::runtime_error("sampling exhausted");
            continue;
        }
        MatrixPair p = from_wilson_chart(WilsonChartPoint(lambdas, alphas), tol);
        if (opts.random_frame)
            p = conjugate(p, random_conjugator(n, rng));
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace cmspaces
