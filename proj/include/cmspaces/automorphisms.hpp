#pragma once

#include <string>
#include <vector>

#include "cmspaces/matrix_pair.hpp"

namespace cmspaces {

enum class StepKind { CmFlowX, CmFlowY, Sl2, TransposeSwap, Shear, Overshear };

std::string to_string(StepKind k);
StepKind step_kind_from_string(const std::string& s);

// Closed catalog of invariant functions: polynomials in tr X, det X, tr Y,
// det Y. The closed form lets shear/overshear preconditions be certified by
// sampling the function along the actual flow.
struct FunctionSpec {
    struct Term {
        Complex coeff{1.0, 0.0};
        int tr_x = 0;
        int det_x = 0;
        int tr_y = 0;
        int det_y = 0;
    };
    std::vector<Term> terms;
    std::string name;  // catalog name when constructed from one, else empty

    Complex eval(const MatrixPair& p) const;

    static FunctionSpec one();
    static FunctionSpec tr_x();
    static FunctionSpec det_x();
    static FunctionSpec tr_y();
    static FunctionSpec det_y();
    static FunctionSpec tr_x_plus_det_x();  // the shear example
    static FunctionSpec disc_x();           // (tr X)^2 - 4 det X
    static FunctionSpec disc_y();           // (tr Y)^2 - 4 det Y
    static FunctionSpec from_name(const std::string& name);
};

// One-parameter base flow a shear/overshear modifies: Y <- Y + s * poly(X)
// or X <- X + s * poly(Y).
struct BaseFlow {
    StepKind kind = StepKind::CmFlowY;  // CmFlowY or CmFlowX
    std::vector<Complex> poly;          // ascending-degree coefficients
};

struct AutoStep {
    StepKind kind = StepKind::CmFlowY;
    Complex t{};                 // flow time (unused for sl2/transpose_swap)
    std::vector<Complex> poly;   // cm flows
    Eigen::Matrix2cd a;          // sl2
    BaseFlow base;               // shear/overshear
    FunctionSpec f;              // shear/overshear

    static AutoStep flow_y(std::vector<Complex> poly, Complex t);
    static AutoStep flow_x(std::vector<Complex> poly, Complex t);
    static AutoStep sl2(const Eigen::Matrix2cd& a);
    static AutoStep transpose_swap();
    static AutoStep shear(BaseFlow base, FunctionSpec f, Complex t);
    static AutoStep overshear(BaseFlow base, FunctionSpec f, Complex t);
};

struct AutoProgram {
    std::vector<AutoStep> steps;
};

// Horner evaluation of a polynomial (ascending coefficients) at a matrix.
Matrix poly_eval(const std::vector<Complex>& coeffs, const Matrix& m);

// (X, Y + t p(X)). Leaves [X, Y] invariant; requires membership.
MatrixPair apply_cm_flow_Y(const MatrixPair& p, const std::vector<Complex>& poly,
                           Complex t, const Tolerances& tol = {});
// (X + t q(Y), Y).
MatrixPair apply_cm_flow_X(const MatrixPair& p, const std::vector<Complex>& poly,
                           Complex t, const Tolerances& tol = {});

// (a11 X + a12 Y, a21 X + a22 Y) for unit-determinant a. Scales the
// commutator by det a = 1. Throws std::invalid_argument("non-unimodular
// matrix") when |det a - 1| >= unimodular_tol.
MatrixPair apply_sl2(const MatrixPair& p, const Eigen::Matrix2cd& a,
                     const Tolerances& tol = {}, double unimodular_tol = 1e-8);

// (Y^T, X^T); an involution, defect rank is preserved.
MatrixPair apply_transpose_swap(const MatrixPair& p, const Tolerances& tol = {});

// (e^zeta - 1)/zeta, by truncated series near zero.
Complex eval_epsilon(Complex zeta);

// Degree of f restricted to the base flow through p, certified by sampling
// at five time points and fitting.
struct FlowFit {
    bool constant = false;   // all non-constant coefficients negligible
    bool linear = false;     // degree exactly one
    Complex derivative{};    // coefficient of the linear term
};
FlowFit classify_along_flow(const MatrixPair& p, const BaseFlow& base,
                            const FunctionSpec& f, const Tolerances& tol = {});

// Shear: base flow evaluated at time t * f(p). Requires f invariant along
// the base flow (throws std::domain_error("not invariant")).
MatrixPair apply_shear(const MatrixPair& p, const BaseFlow& base,
                       const FunctionSpec& f, Complex t,
                       const Tolerances& tol = {});

// Overshear: base flow at time epsilon(t * Theta_p f) * t * f(p). Requires f
// of degree exactly one along the flow (throws std::domain_error("not
// degree-one ...")).
MatrixPair apply_overshear(const MatrixPair& p, const BaseFlow& base,
                           const FunctionSpec& f, Complex t,
                           const Tolerances& tol = {});

MatrixPair apply_step(const MatrixPair& p, const AutoStep& step,
                      const Tolerances& tol = {});

struct StepTrace {
    int index = 0;
    StepKind kind = StepKind::CmFlowY;
    double sigma_ratio = 0.0;  // sigma2/sigma1 of the defect after the step
    bool member = false;
};

struct ProgramResult {
    MatrixPair result;
    std::vector<StepTrace> trace;
    bool contains_transpose_swap = false;  // identity-component status is open
};

ProgramResult run_program(const MatrixPair& p, const AutoProgram& prog,
                          const Tolerances& tol = {});

// Formal inverse: reversed steps with negated times; sl2 steps are inverted,
// transpose_swap is its own inverse.
AutoProgram inverse(const AutoProgram& prog);

}  // namespace cmspaces
