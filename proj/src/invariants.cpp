#include "cmspaces/invariants.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <set>
#include <stdexcept>

#include "cmspaces/assignment.hpp"
#include "cmspaces/cm2.hpp"
#include "cmspaces/rng.hpp"

namespace cmspaces {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::vector<Complex> sorted_eigenvalues(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenvalue computation failed");
    std::vector<Complex> vals(es.eigenvalues().data(),
                              es.eigenvalues().data() + m.rows());
    std::sort(vals.begin(), vals.end(), lex_less);
    return vals;
}

// Lexicographically minimal rotation: canonical representative of the cyclic
// class, so tr-equal words are stored once.
std::string canonical_rotation(const std::string& w) {
    std::string best = w;
    for (std::size_t k = 1; k < w.size(); ++k) {
        std::string rot = w.substr(k) + w.substr(0, k);
        if (rot < best) best = rot;
    }
    return best;
}

std::set<std::string> necklace_words(int max_len) {
    std::set<std::string> words;
    for (int len = 1; len <= max_len; ++len) {
        for (unsigned mask = 0; mask < (1u << len); ++mask) {
            std::string w(len, 'X');
            for (int b = 0; b < len; ++b)
                if (mask & (1u << b)) w[b] = 'Y';
            words.insert(canonical_rotation(w));
        }
    }
    return words;
}

Complex trace_of_word(const MatrixPair& p, const std::string& w) {
    Matrix prod = (w[0] == 'X') ? p.X() : p.Y();
    for (std::size_t i = 1; i < w.size(); ++i)
        prod = prod * ((w[i] == 'X') ? p.X() : p.Y());
    return prod.trace();
}

double data_scale(const InvariantFingerprint& a, const InvariantFingerprint& b) {
    double s = 1.0;
    for (const auto& v : {a.eig_x, a.eig_y, b.eig_x, b.eig_y})
        for (const Complex& z : v) s = std::max(s, std::abs(z));
    for (const auto* fp : {&a, &b})
        for (const auto& [w, t] : fp->trace_words) s = std::max(s, std::abs(t));
    return s;
}

// Kernel basis of the intertwiner system G X = Xq G, G Y = Yq G, as columns.
Matrix intertwiner_kernel(const MatrixPair& p, const MatrixPair& q,
                          double rel_cut) {
    const int n = p.size();
    const int n2 = n * n;
    Matrix m = Matrix::Zero(2 * n2, n2);
    // Unknown g = vec(G) with G(i,k) at index i*n + k.
    auto fill = [&](int row_base, const Matrix& x, const Matrix& xq) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int row = row_base + i * n + j;
                for (int k = 0; k < n; ++k) {
                    m(row, i * n + k) += x(k, j);    // G(i,k) X(k,j)
                    m(row, k * n + j) -= xq(i, k);   // Xq(i,k) G(k,j)
                }
            }
    };
    fill(0, p.X(), q.X());
    fill(n2, p.Y(), q.Y());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cut = rel_cut * std::max(sv[0], 1e-300);
    int rank = 0;
    while (rank < sv.size() && sv[rank] > cut) ++rank;
    const int null_dim = n2 - rank;
    Matrix kernel(n2, null_dim);
    for (int c = 0; c < null_dim; ++c) kernel.col(c) = svd.matrixV().col(rank + c);
    return kernel;
}

Matrix unvec(const Vector& g, int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = g[i * n + k];
    return m;
}

double conjugation_residual(const MatrixPair& p, const MatrixPair& q,
                            const Matrix& g) {
    Eigen::FullPivLU<Matrix> lu(g);
    const Matrix gi = lu.inverse();
    const double s = std::max({1.0, p.X().norm(), p.Y().norm()});
    return ((g * p.X() * gi - q.X()).norm() + (g * p.Y() * gi - q.Y()).norm()) / s;
}

}  // namespace

std::pair<std::vector<Complex>, std::vector<Complex>> eigen_map(
    const MatrixPair& p, const Tolerances& tol) {
    require_member(p, tol);
    return {sorted_eigenvalues(p.X()), sorted_eigenvalues(p.Y())};
}

InvariantFingerprint fingerprint(const MatrixPair& p, int max_len,
                                 const Tolerances& tol) {
    require_member(p, tol);
    if (max_len < 1) throw std::invalid_argument("word length must be positive");
    InvariantFingerprint fp;
    auto [ex, ey] = eigen_map(p, tol);
    fp.eig_x = std::move(ex);
    fp.eig_y = std::move(ey);
    for (const std::string& w : necklace_words(max_len))
        fp.trace_words[w] = trace_of_word(p, w);
    return fp;
}

double multiset_distance(const std::vector<Complex>& a,
                         const std::vector<Complex>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("multisets must have equal size");
    const int n = static_cast<int>(a.size());
    if (n == 0) return 0.0;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost(i, j) = std::abs(a[i] - b[j]);
    return min_cost_assignment(cost);
}

double fingerprint_distance(const InvariantFingerprint& a,
                            const InvariantFingerprint& b) {
    if (a.eig_x.size() != b.eig_x.size() ||
        a.trace_words.size() != b.trace_words.size())
        throw std::invalid_argument("fingerprints are incomparable");
    const double scale = data_scale(a, b);
    const double n = static_cast<double>(a.eig_x.size());
    double d = multiset_distance(a.eig_x, b.eig_x) / (n * scale);
    d = std::max(d, multiset_distance(a.eig_y, b.eig_y) / (n * scale));
    for (const auto& [w, t] : a.trace_words) {
        const auto it = b.trace_words.find(w);
        if (it == b.trace_words.end())
            throw std::invalid_argument("fingerprints are incomparable");
        d = std::max(d, std::abs(t - it->second) / scale);
    }
    return d;
}

std::string to_string(Equivalence e) {
    switch (e) {
        case Equivalence::Equivalent: return "equivalent";
        case Equivalence::Distinct: return "distinct";
        default: return "inconclusive";
    }
}

EquivResult equiv_test(const MatrixPair& p, const MatrixPair& q,
                       const Tolerances& tol, double fp_tol) {
    if (p.size() != q.size()) throw std::invalid_argument("size mismatch");
    require_member(p, tol);
    require_member(q, tol);
    const int n = p.size();

    const double fp_dist =
        fingerprint_distance(fingerprint(p, 4, tol), fingerprint(q, 4, tol));
    if (fp_dist > fp_tol) {
        EquivResult r;
        r.verdict = Equivalence::Distinct;
        r.detail = "invariant fingerprints differ";
        return r;
    }

    const Matrix kernel = intertwiner_kernel(p, q, tol.rank_tol);
    if (kernel.cols() == 0) {
        EquivResult r;
        r.verdict = Equivalence::Distinct;
        r.detail = "intertwiner system has no solution";
        return r;
    }

    // Generic kernel elements are invertible when a conjugator exists at all.
    Rng rng(0xC0FFEEu);
    std::vector<Vector> candidates;
    for (int c = 0; c < kernel.cols(); ++c) candidates.push_back(kernel.col(c));
    for (int trial = 0; trial < 10; ++trial) {
        Vector mix = Vector::Zero(n * n);
        for (int c = 0; c < kernel.cols(); ++c) mix += rng.complex_gauss() * kernel.col(c);
        candidates.push_back(mix);
    }
    for (const Vector& g_vec : candidates) {
        Matrix g = unvec(g_vec, n);
        Eigen::FullPivLU<Matrix> lu(g);
        if (std::abs(lu.determinant()) <= 1e-10) continue;
        if (conjugation_residual(p, q, g) < 1e-6) {
            EquivResult r;
            r.verdict = Equivalence::Equivalent;
            r.conjugator = std::move(g);
            r.detail = "explicit conjugator recovered";
            return r;
        }
    }

    if (n == 2) {
        const CM2Coords cp = pair_to_cm2(p, tol);
        const CM2Coords cq = pair_to_cm2(q, tol);
        if (same_z2_orbit(cp, cq, fp_tol)) {
            EquivResult r;
            r.verdict = Equivalence::Equivalent;
            r.detail = "canonical C2 coordinates agree up to the Z2 x Z2 identifications";
            return r;
        }
        if (!same_z2_orbit(cp, cq, 1e-3)) {
            EquivResult r;
            r.verdict = Equivalence::Distinct;
            r.detail = "canonical C2 coordinates differ";
            return r;
        }
    }

    EquivResult r;
    r.verdict = Equivalence::Inconclusive;
    r.detail = "no invertible intertwiner found and no exact canonical form applies";
    return r;
}

}  // namespace cmspaces
