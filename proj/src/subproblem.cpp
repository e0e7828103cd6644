#include "biharm/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

#include "biharm/errors.hpp"

namespace biharm {

namespace {

void check_ops(const SideOperators& ops) {
    const auto m = ops.M.rows();
    require_same_size(ops.M, m, "M");
    require_same_size(ops.E, m, "e^{delta M}");
    require_same_size(ops.U_inv, m, "U^{-1}");
    require_same_size(ops.V_inv, m, "V^{-1}");
}

void check_vectors(const SideOperators& ops, std::initializer_list<std::pair<const Vector*, const char*>> vs) {
    check_ops(ops);
    for (const auto& [v, name] : vs) {
        require_same_size(*v, ops.M.rows(), name);
    }
}

}  // namespace

Quadruple phi_tilde_minus(const SideOperators& ops, const Vector& phi1, const Vector& phi2, const Vector& Fa,
                          const Vector& Fg) {
    check_vectors(ops, {{&phi1, "phi1-"}, {&phi2, "phi2-"}, {&Fa, "F-'(a)"}, {&Fg, "F-'(gamma)"}});
    const Matrix& M = ops.M;
    const Matrix& E = ops.E;
    const double c = ops.delta;
    const Vector Mp = M * phi1;
    const Vector s_minus = Mp + phi2 - Fa - Fg;
    const Vector s_plus = Mp + phi2 - Fa + Fg;
    Quadruple out;
    out[0] = 0.5 * ops.U_inv * (phi1 + E * (phi1 + c * s_minus));
    out[1] = -0.5 * ops.U_inv * (Mp - phi2 + Fa + Fg) - 0.5 * ops.U_inv * (E * s_minus);
    out[2] = 0.5 * ops.V_inv * (phi1 - E * (phi1 + c * s_plus));
    out[3] = -0.5 * ops.V_inv * (Mp - phi2 + Fa - Fg) + 0.5 * ops.V_inv * (E * s_plus);
    return out;
}

Quadruple phi_tilde_plus(const SideOperators& ops, const Vector& phi1, const Vector& phi2, const Vector& Fg,
                         const Vector& Fb) {
    check_vectors(ops, {{&phi1, "phi1+"}, {&phi2, "phi2+"}, {&Fg, "F+'(gamma)"}, {&Fb, "F+'(b)"}});
    const Matrix& M = ops.M;
    const Matrix& E = ops.E;
    const double d = ops.delta;
    const Vector Mp = M * phi1;
    const Vector s_plus = Mp - phi2 + Fg + Fb;
    const Vector s_minus = Mp - phi2 - Fg + Fb;
    Quadruple out;
    out[0] = -0.5 * ops.U_inv * (phi1 + E * (phi1 + d * s_plus));
    out[1] = 0.5 * ops.U_inv * (Mp + phi2 - Fg - Fb) + 0.5 * ops.U_inv * (E * s_plus);
    out[2] = 0.5 * ops.V_inv * (phi1 - E * (phi1 + d * s_minus));
    out[3] = -0.5 * ops.V_inv * (Mp + phi2 + Fg - Fb) + 0.5 * ops.V_inv * (E * s_minus);
    return out;
}

Quadruple alphas_minus(const SideOperators& ops, const Vector& psi1, const Vector& psi2, const Quadruple& pt) {
    check_vectors(ops, {{&psi1, "psi1"}, {&psi2, "psi2"}, {&pt[0], "phi~1"}, {&pt[1], "phi~2"}, {&pt[2], "phi~3"},
                        {&pt[3], "phi~4"}});
    const Matrix& M = ops.M;
    const Matrix& E = ops.E;
    const double c = ops.delta;
    const Vector Ep1 = E * psi1;
    const Vector Ep2 = E * psi2;
    const Vector MEp1 = M * Ep1;
    const Vector Mp1 = M * psi1;
    const Vector EMp1 = E * Mp1;
    Quadruple out;
    out[0] = -0.5 * ops.U_inv * (psi1 + Ep1 + c * MEp1 - c * Ep2) + pt[0];
    out[1] = 0.5 * ops.U_inv * (Mp1 + EMp1 + psi2 - Ep2) + pt[1];
    out[2] = 0.5 * ops.V_inv * (psi1 - Ep1 - c * MEp1 + c * Ep2) + pt[2];
    out[3] = -0.5 * ops.V_inv * (Mp1 - EMp1 + psi2 + Ep2) + pt[3];
    return out;
}

Quadruple alphas_plus(const SideOperators& ops, const Vector& psi1, const Vector& psi2, const Quadruple& pt) {
    check_vectors(ops, {{&psi1, "psi1"}, {&psi2, "psi2"}, {&pt[0], "phi~1"}, {&pt[1], "phi~2"}, {&pt[2], "phi~3"},
                        {&pt[3], "phi~4"}});
    const Matrix& M = ops.M;
    const Matrix& E = ops.E;
    const double d = ops.delta;
    const Vector Ep1 = E * psi1;
    const Vector Ep2 = E * psi2;
    const Vector MEp1 = M * Ep1;
    const Vector Mp1 = M * psi1;
    const Vector EMp1 = E * Mp1;
    Quadruple out;
    out[0] = 0.5 * ops.U_inv * (psi1 + Ep1 + d * MEp1 + d * Ep2) + pt[0];
    out[1] = -0.5 * ops.U_inv * (Mp1 + EMp1 - psi2 + Ep2) + pt[1];
    out[2] = 0.5 * ops.V_inv * (psi1 - Ep1 - d * MEp1 - d * Ep2) + pt[2];
    out[3] = -0.5 * ops.V_inv * (Mp1 - EMp1 - psi2 - Ep2) + pt[3];
    return out;
}

SubproblemSolution::SubproblemSolution(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                       Side side, Quadruple alphas,
                                       std::shared_ptr<const ParticularSolution> particular)
    : generator_(std::move(generator)),
      particular_(std::move(particular)),
      side_(side),
      left_(geom.left(side)),
      right_(geom.right(side)),
      alphas_(std::move(alphas)) {
    if (!generator_ || !particular_) {
        throw PreconditionError("subproblem solution needs a generator and a particular solution");
    }
    if (particular_->side() != side_) {
        throw PreconditionError("particular solution belongs to the other side");
    }
    const auto m = static_cast<std::ptrdiff_t>(generator_->dimension());
    const Matrix& Q = generator_->section().eigenvectors();
    for (std::size_t i = 0; i < 4; ++i) {
        require_same_size(alphas_[i], m, "alpha");
        modal_[i] = Q.transpose() * alphas_[i];
    }
}

Vector SubproblemSolution::modal_terms(int order, double x, bool absolute) const {
    if (order < 0 || order > 3) {
        throw PreconditionError("derivative order must be 0..3, got " + std::to_string(order));
    }
    const double tol = 1e-12 * std::max(1.0, right_ - left_);
    if (!(x >= left_ - tol && x <= right_ + tol)) {
        throw DomainError("x = " + std::to_string(x) + " lies outside the " + to_string(side_) + " interval");
    }
    const double t1 = std::max(0.0, x - left_);
    const double t2 = std::max(0.0, right_ - x);
    const Vector& m = generator_->eigenvalues();
    const double sign = order % 2 == 0 ? 1.0 : -1.0;
    Vector out(m.size());
    for (Eigen::Index j = 0; j < m.size(); ++j) {
        const double mj = m(j);
        const double mk = std::pow(mj, order);
        const double mk1 = order == 0 ? 0.0 : order * std::pow(mj, order - 1);
        const double a1 = modal_[0](j);
        const double a2 = modal_[1](j);
        const double a3 = modal_[2](j);
        const double a4 = modal_[3](j);
        if (absolute) {
            const double e1 = std::exp(t1 * mj);
            const double e2 = std::exp(t2 * mj);
            const double w1 = std::abs(mk1 + t1 * mk);
            const double w2 = std::abs(mk1 + t2 * mk);
            const double lo = std::abs(mk) * (std::abs(a1) + std::abs(a3));
            const double hi = std::abs(a2) + std::abs(a4);
            out(j) = e1 * (lo + w1 * hi) + e2 * (lo + w2 * hi);
        } else {
            const double first = std::exp(t1 * mj) * (mk * (a1 + a3) + (mk1 + t1 * mk) * (a2 + a4));
            const double second = std::exp(t2 * mj) * (mk * (a3 - a1) + (mk1 + t2 * mk) * (a4 - a2));
            out(j) = first + sign * second;
        }
    }
    return out;
}

Vector SubproblemSolution::homogeneous(int order, double x) const {
    return generator_->section().eigenvectors() * modal_terms(order, x, false);
}

double SubproblemSolution::term_scale(int order, double x) const { return modal_terms(order, x, true).norm(); }

Vector SubproblemSolution::evaluate(int order, double x) const {
    Vector out = homogeneous(order, x);
    if (!particular_->is_zero()) {
        out += particular_->evaluate(order, std::clamp(x, left_, right_));
    }
    return out;
}

Vector evaluate(const SubproblemSolution& u, int order, double x) { return u.evaluate(order, x); }

}  // namespace biharm
