#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cmspaces/rng.hpp"

namespace cmspaces {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Numerical thresholds shared across the library. All must be positive.
struct Tolerances {
    double rank_tol = 1e-8;  // relative singular-value cutoff sigma2/sigma1
    double sep_tol = 1e-6;   // eigenvalue-separation threshold (normalized)
    double fd_step = 1e-6;   // finite-difference step size

    void validate() const;
};

// A point of the matrix-pair variety: two n x n complex matrices. The rank-1
// defect condition is *not* enforced at construction; constructors accept raw
// data so that non-members can be exercised, and operations that require
// membership check it themselves.
class MatrixPair {
public:
    MatrixPair(Matrix x, Matrix y);

    int size() const { return static_cast<int>(x_.rows()); }
    const Matrix& X() const { return x_; }
    const Matrix& Y() const { return y_; }

private:
    Matrix x_;
    Matrix y_;
};

// [X,Y] + id.
Matrix commutator_defect(const MatrixPair& p);

struct MembershipReport {
    bool member = false;
    double sigma1 = 0.0;  // largest singular value of the defect
    double sigma2 = 0.0;  // second-largest (0 for n = 1)
    std::string note;     // diagnostic, e.g. "zero defect matrix"

    double ratio() const { return sigma1 > 0.0 ? sigma2 / sigma1 : 0.0; }
};

// Rank-1 test on the commutator defect: member iff sigma1 > 0 and
// sigma2/sigma1 < tol.rank_tol. For n = 1 the defect is the scalar 1.
MembershipReport membership(const MatrixPair& p, const Tolerances& tol = {});
bool is_member(const MatrixPair& p, const Tolerances& tol = {});

// Throws std::domain_error("not a member") unless p passes the rank-1 test.
void require_member(const MatrixPair& p, const Tolerances& tol = {});

// Simultaneous conjugation (G X G^-1, G Y G^-1). Throws
// std::invalid_argument("singular conjugator") when |det G| <= det_floor.
MatrixPair conjugate(const MatrixPair& p, const Matrix& g,
                     double det_floor = 1e-12);

// Chart coordinates on the locus where X has distinct eigenvalues:
// X = diag(lambda), Y has diagonal alpha and off-diagonal entries
// 1/(lambda_i - lambda_j).
struct WilsonChartPoint {
    Vector lambdas;
    Vector alphas;

    WilsonChartPoint(Vector l, Vector a);
    int size() const { return static_cast<int>(lambdas.size()); }
};

// min_{i<j} |lambda_i - lambda_j| divided by max(1, max_i |lambda_i|).
double chart_separation(const Vector& lambdas);

// Throws std::invalid_argument("eigenvalue collision") when the separation
// falls below tol.sep_tol.
MatrixPair from_wilson_chart(const WilsonChartPoint& w,
                             const Tolerances& tol = {});

struct SampleOptions {
    int count = 1;
    std::uint64_t seed = 0;
    bool random_frame = false;  // post-conjugate by a random G
    int max_rejects = 1000;
};

// Gaussian draws of Wilson chart points, rejecting chart-invalid ones.
// Deterministic per seed. Throws std::runtime_error("sampling exhausted")
// if the rejection budget runs out.
std::vector<MatrixPair> sample(int n, const SampleOptions& opts,
                               const Tolerances& tol = {});

// Gaussian n x n matrix.
Matrix random_matrix(int n, Rng& rng);

// Gaussian conjugator with condition number at most max_cond (rejection
// sampled).
Matrix random_conjugator(int n, Rng& rng, double max_cond = 1e3);

// Random SL2 element: a, b, c Gaussian, d = (1 + b c)/a.
Eigen::Matrix2cd random_sl2(Rng& rng);

}  // namespace cmspaces
