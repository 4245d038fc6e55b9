#include "cmspaces/automorphisms.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace cmspaces {

std::string to_string(StepKind k) {
    switch (k) {
        case StepKind::CmFlowX: return "cm_flow_X";
        case StepKind::CmFlowY: return "cm_flow_Y";
        case StepKind::Sl2: return "sl2";
        case StepKind::TransposeSwap: return "transpose_swap";
        case StepKind::Shear: return "shear";
        case StepKind::Overshear: return "overshear";
    }
    return "unknown";
}

StepKind step_kind_from_string(const std::string& s) {
    if (s == "cm_flow_X") return StepKind::CmFlowX;
    if (s == "cm_flow_Y") return StepKind::CmFlowY;
    if (s == "sl2") return StepKind::Sl2;
    if (s == "transpose_swap") return StepKind::TransposeSwap;
    if (s == "shear") return StepKind::Shear;
    if (s == "overshear") return StepKind::Overshear;
    throw std::invalid_argument("unknown step kind: " + s);
}

Complex FunctionSpec::eval(const MatrixPair& p) const {
    const Complex trx = p.X().trace();
    const Complex try_ = p.Y().trace();
    const Complex detx = Eigen::FullPivLU<Matrix>(p.X()).determinant();
    const Complex dety = Eigen::FullPivLU<Matrix>(p.Y()).determinant();
    auto ipow = [](Complex b, int e) {
        Complex r{1.0, 0.0};
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    };
    Complex sum{0.0, 0.0};
    for (const Term& t : terms)
        sum += t.coeff * ipow(trx, t.tr_x) * ipow(detx, t.det_x) *
               ipow(try_, t.tr_y) * ipow(dety, t.det_y);
    return sum;
}

FunctionSpec FunctionSpec::one() {
    return {{Term{}}, "1"};
}
FunctionSpec FunctionSpec::tr_x() {
    return {{Term{{1.0, 0.0}, 1, 0, 0, 0}}, "trX"};
}
FunctionSpec FunctionSpec::det_x() {
    return {{Term{{1.0, 0.0}, 0, 1, 0, 0}}, "detX"};
}
FunctionSpec FunctionSpec::tr_y() {
    return {{Term{{1.0, 0.0}, 0, 0, 1, 0}}, "trY"};
}
FunctionSpec FunctionSpec::det_y() {
    return {{Term{{1.0, 0.0}, 0, 0, 0, 1}}, "detY"};
}
FunctionSpec FunctionSpec::tr_x_plus_det_x() {
    return {{Term{{1.0, 0.0}, 1, 0, 0, 0}, Term{{1.0, 0.0}, 0, 1, 0, 0}},
            "trX+detX"};
}
FunctionSpec FunctionSpec::disc_x() {
    return {{Term{{1.0, 0.0}, 2, 0, 0, 0}, Term{{-4.0, 0.0}, 0, 1, 0, 0}},
            "discX"};
}
FunctionSpec FunctionSpec::disc_y() {
    return {{Term{{1.0, 0.0}, 0, 0, 2, 0}, Term{{-4.0, 0.0}, 0, 0, 0, 1}},
            "discY"};
}

FunctionSpec FunctionSpec::from_name(const std::string& name) {
    if (name == "1") return one();
    if (name == "trX") return tr_x();
    if (name == "detX") return det_x();
    if (name == "trY") return tr_y();
    if (name == "detY") return det_y();
    if (name == "trX+detX") return tr_x_plus_det_x();
    if (name == "discX") return disc_x();
    if (name == "discY") return disc_y();
    throw std::invalid_argument("unknown invariant function: " + name);
}

AutoStep AutoStep::flow_y(std::vector<Complex> poly, Complex t) {
    AutoStep s;
    s.kind = StepKind::CmFlowY;
    s.poly = std::move(poly);
    s.t = t;
    return s;
}
AutoStep AutoStep::flow_x(std::vector<Complex> poly, Complex t) {
    AutoStep s;
    s.kind = StepKind::CmFlowX;
    s.poly = std::move(poly);
    s.t = t;
    return s;
}
AutoStep AutoStep::sl2(const Eigen::Matrix2cd& a) {
    AutoStep s;
    s.kind = StepKind::Sl2;
    s.a = a;
    return s;
}
AutoStep AutoStep::transpose_swap() {
    AutoStep s;
    s.kind = StepKind::TransposeSwap;
    return s;
}
AutoStep AutoStep::shear(BaseFlow base, FunctionSpec f, Complex t) {
    AutoStep s;
    s.kind = StepKind::Shear;
    s.base = std::move(base);
    s.f = std::move(f);
    s.t = t;
    return s;
}
AutoStep AutoStep::overshear(BaseFlow base, FunctionSpec f, Complex t) {
    AutoStep s;
    s.kind = StepKind::Overshear;
    s.base = std::move(base);
    s.f = std::move(f);
    s.t = t;
    return s;
}

Matrix poly_eval(const std::vector<Complex>& coeffs, const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    Matrix result = Matrix::Zero(n, n);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        result = result * m + *it * Matrix::Identity(n, n);
    return result;
}

MatrixPair apply_cm_flow_Y(const MatrixPair& p, const std::vector<Complex>& poly,
                           Complex t, const Tolerances& tol) {
    require_member(p, tol);
    return MatrixPair(p.X(), p.Y() + t * poly_eval(poly, p.X()));
}

MatrixPair apply_cm_flow_X(const MatrixPair& p, const std::vector<Complex>& poly,
                           Complex t, const Tolerances& tol) {
    require_member(p, tol);
    return MatrixPair(p.X() + t * poly_eval(poly, p.Y()), p.Y());
}

MatrixPair apply_sl2(const MatrixPair& p, const Eigen::Matrix2cd& a,
                     const Tolerances& tol, double unimodular_tol) {
    require_member(p, tol);
    const Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(det - 1.0) >= unimodular_tol)
        throw std::invalid_argument("non-unimodular matrix");
    return MatrixPair(a(0, 0) * p.X() + a(0, 1) * p.Y(),
                      a(1, 0) * p.X() + a(1, 1) * p.Y());
}

MatrixPair apply_transpose_swap(const MatrixPair& p, const Tolerances& tol) {
    require_member(p, tol);
    return MatrixPair(p.Y().transpose(), p.X().transpose());
}

Complex eval_epsilon(Complex zeta) {
    if (std::abs(zeta) < 1e-3) {
        // sum_{k>=1} zeta^{k-1}/k!; eight terms reach machine precision here
        Complex sum{0.0, 0.0};
        Complex power{1.0, 0.0};
        double factorial = 1.0;
        for (int k = 1; k <= 8; ++k) {
            factorial *= k;
            sum += power / factorial;
            power *= zeta;
        }
        return sum;
    }
    return (std::exp(zeta) - 1.0) / zeta;
}

namespace {

MatrixPair apply_base_flow(const MatrixPair& p, const BaseFlow& base,
                           Complex time, const Tolerances& tol) {
    if (base.kind == StepKind::CmFlowY)
        return apply_cm_flow_Y(p, base.poly, time, tol);
    if (base.kind == StepKind::CmFlowX)
        return apply_cm_flow_X(p, base.poly, time, tol);
    throw std::invalid_argument("base flow must be a Calogero-Moser flow");
}

}  // namespace

FlowFit classify_along_flow(const MatrixPair& p, const BaseFlow& base,
                            const FunctionSpec& f, const Tolerances& tol) {
    constexpr double kStep = 0.5;
    constexpr int kPoints = 5;
    Eigen::VectorXcd values(kPoints);
    Eigen::MatrixXcd vandermonde(kPoints, kPoints);
    for (int j = 0; j < kPoints; ++j) {
        const double s = kStep * (j - 2);
        values[j] = f.eval(apply_base_flow(p, base, Complex(s), tol));
        Complex power{1.0, 0.0};
        for (int k = 0; k < kPoints; ++k) {
            vandermonde(j, k) = power;
            power *= s;
        }
    }
    const Eigen::VectorXcd coeffs =
        vandermonde.partialPivLu().solve(values);
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    auto negligible = [&](int k) {
        return std::abs(coeffs[k]) * std::pow(2.0 * kStep, k) <= 1e-7 * scale;
    };
    FlowFit fit;
    fit.constant = negligible(1) && negligible(2) && negligible(3) && negligible(4);
    fit.linear = !negligible(1) && negligible(2) && negligible(3) && negligible(4);
    fit.derivative = coeffs[1];
    return fit;
}

MatrixPair apply_shear(const MatrixPair& p, const BaseFlow& base,
                       const FunctionSpec& f, Complex t, const Tolerances& tol) {
    const FlowFit fit = classify_along_flow(p, base, f, tol);
    if (!fit.constant) throw std::domain_error("not invariant");
    return apply_base_flow(p, base, t * f.eval(p), tol);
}

MatrixPair apply_overshear(const MatrixPair& p, const BaseFlow& base,
                           const FunctionSpec& f, Complex t,
                           const Tolerances& tol) {
    const FlowFit fit = classify_along_flow(p, base, f, tol);
    if (fit.constant)
        throw std::domain_error(
            "not degree-one: base flow leaves f invariant, use a shear");
    if (!fit.linear) throw std::domain_error("not degree-one");
    const Complex time = eval_epsilon(t * fit.derivative) * t * f.eval(p);
    return apply_base_flow(p, base, time, tol);
}

MatrixPair apply_step(const MatrixPair& p, const AutoStep& step,
                      const Tolerances& tol) {
    switch (step.kind) {
        case StepKind::CmFlowY:
            return apply_cm_flow_Y(p, step.poly, step.t, tol);
        case StepKind::CmFlowX:
            return apply_cm_flow_X(p, step.poly, step.t, tol);
        case StepKind::Sl2:
            return apply_sl2(p, step.a, tol);
        case StepKind::TransposeSwap:
            return apply_transpose_swap(p, tol);
        case StepKind::Shear:
            return apply_shear(p, step.base, step.f, step.t, tol);
        case StepKind::Overshear:
            return apply_overshear(p, step.base, step.f, step.t, tol);
    }
    throw std::invalid_argument("unknown step kind");
}

ProgramResult run_program(const MatrixPair& p, const AutoProgram& prog,
                          const Tolerances& tol) {
    require_member(p, tol);
    ProgramResult out{p, {}, false};
    for (std::size_t i = 0; i < prog.steps.size(); ++i) {
        const AutoStep& step = prog.steps[i];
        if (step.kind == StepKind::TransposeSwap)
            out.contains_transpose_swap = true;
        try {
            out.result = apply_step(out.result, step, tol);
        } catch (const std::exception& e) {
            throw std::runtime_error("step " + std::to_string(i) + " (" +
                                     to_string(step.kind) + "): " + e.what());
        }
        const MembershipReport m = membership(out.result, tol);
        out.trace.push_back({static_cast<int>(i), step.kind, m.ratio(), m.member});
    }
    return out;
}

AutoProgram inverse(const AutoProgram& prog) {
    AutoProgram inv;
    inv.steps.reserve(prog.steps.size());
    for (auto it = prog.steps.rbegin(); it != prog.steps.rend(); ++it) {
        AutoStep s = *it;
        switch (s.kind) {
            case StepKind::CmFlowX:
            case StepKind::CmFlowY:
            case StepKind::Shear:
            case StepKind::Overshear:
                s.t = -s.t;
                break;
            case StepKind::Sl2: {
                Eigen::Matrix2cd inv_a;
                inv_a << s.a(1, 1), -s.a(0, 1), -s.a(1, 0), s.a(0, 0);
                s.a = inv_a;
                break;
            }
            case StepKind::TransposeSwap:
                break;
        }
        inv.steps.push_back(std::move(s));
    }
    return inv;
}

}  // namespace cmspaces
