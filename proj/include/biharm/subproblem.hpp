#pragma once

#include <array>
#include <memory>

#include "biharm/linalg.hpp"
#include "biharm/particular_solution.hpp"
#include "biharm/problem.hpp"
#include "biharm/section_operator.hpp"

namespace biharm {

/// Four section vectors: phi-tilde_1..4 or alpha_1..4 of one side.
using Quadruple = std::array<Vector, 4>;

/// Operators of one side that enter the coefficient formulas. delta = c on the
/// minus side and d on the plus side; E = e^{delta M}.
struct SideOperators {
    Side side = Side::minus;
    double delta = 1.0;
    Matrix M;
    Matrix E;
    Matrix U_inv;
    Matrix V_inv;
};

/// phi-tilde for (P-): Fa = F-'(a), Fg = F-'(gamma).
Quadruple phi_tilde_minus(const SideOperators& ops, const Vector& phi1, const Vector& phi2, const Vector& Fa,
                          const Vector& Fg);
/// phi-tilde for (P+): Fg = F+'(gamma), Fb = F+'(b).
Quadruple phi_tilde_plus(const SideOperators& ops, const Vector& phi1, const Vector& phi2, const Vector& Fg,
                         const Vector& Fb);

Quadruple alphas_minus(const SideOperators& ops, const Vector& psi1, const Vector& psi2, const Quadruple& phi_tilde);
Quadruple alphas_plus(const SideOperators& ops, const Vector& psi1, const Vector& psi2, const Quadruple& phi_tilde);

/// u on one side:
///   u(x) = (E1 - E2) a1 + (t1 E1 - t2 E2) a2 + (E1 + E2) a3 + (t1 E1 + t2 E2) a4 + F(x)
/// with E_i = e^{t_i M}, t1 = x - left, t2 = right - x. The exponential part is
/// evaluated exactly in the eigenbasis of M.
class SubproblemSolution {
public:
    SubproblemSolution(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom, Side side,
                       Quadruple alphas, std::shared_ptr<const ParticularSolution> particular);

    Side side() const { return side_; }
    double left() const { return left_; }
    double right() const { return right_; }
    const Quadruple& alphas() const { return alphas_; }
    const ParticularSolution& particular() const { return *particular_; }
    const GeneratorM& generator() const { return *generator_; }

    /// u^(order)(x), order in 0..3, x in the closed interval of this side.
    /// Throws DomainError outside the interval, PreconditionError for order > 3.
    Vector evaluate(int order, double x) const;
    /// The exponential part alone.
    Vector homogeneous(int order, double x) const;
    /// Euclidean norm of the per-mode sums of absolute term sizes in
    /// homogeneous(order, x). Rounding error in u^(order)(x) scales with this.
    double term_scale(int order, double x) const;

private:
    Vector modal_terms(int order, double x, bool absolute) const;

    std::shared_ptr<const GeneratorM> generator_;
    std::shared_ptr<const ParticularSolution> particular_;
    Side side_;
    double left_;
    double right_;
    Quadruple alphas_;
    Quadruple modal_;
};

/// Free-function form of SubproblemSolution::evaluate.
Vector evaluate(const SubproblemSolution& u, int order, double x);

}  // namespace biharm
