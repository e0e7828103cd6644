#include "biharm/transmission.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "biharm/errors.hpp"
#include "biharm/scalar_symbols.hpp"

namespace biharm {

namespace {

constexpr double kCommuteTol = 1e-11;
constexpr double kBackwardTol = 1e-10;

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double relative_gap(const Matrix& a, const Matrix& b) {
    const double scale = std::max(norm2(b), std::numeric_limits<double>::min());
    return norm2(a - b) / scale;
}

struct Inverse {
    Matrix value;
    double cond = 0.0;
};

Inverse invert(const Matrix& a, const char* name) {
    const Eigen::PartialPivLU<Matrix> lu(a);
    Inverse out;
    out.value = lu.inverse();
    if (!out.value.allFinite() || lu.rcond() < 1e2 * std::numeric_limits<double>::epsilon()) {
        throw Anomaly(std::string(name) + " is numerically singular (rcond " + std::to_string(lu.rcond()) +
                      "); the inputs cannot come from a negative definite section operator");
    }
    out.value = symmetrized(out.value);
    out.cond = norm2(a) * norm2(out.value);
    return out;
}

SymbolContext context_of(const CylinderGeometry& geom, const Diffusivities& k) {
    return SymbolContext{geom.c(), geom.d(), k.k_minus, k.k_plus};
}

}  // namespace

UVBlocks assemble_UV(const GeneratorM& gen, const CylinderGeometry& geom) {
    const auto n = static_cast<Eigen::Index>(gen.dimension());
    const Matrix I = Matrix::Identity(n, n);
    const Matrix& M = gen.matrix();
    const double m_min = gen.eigenvalues().cwiseAbs().minCoeff();
    const SectionOperator& section = gen.section();

    UVBlocks out;
    out.E_c = gen.semigroup(geom.c());
    out.E_d = gen.semigroup(geom.d());

    const auto build = [&](double delta, const OperatorMatrix& E, double sign, const char* symbol) -> OperatorMatrix {
        if (delta * m_min < 0.5) {
            // Short interval: 1 - e^{-2t} -+ 2t e^{-t} cancels, use the series-backed scalar form.
            out.stabilized = true;
            auto scalar = [delta, sign](double mu) {
                return sign > 0 ? u_delta(delta, -mu) : v_delta(delta, -mu);
            };
            return section.apply_function(scalar, symbol);
        }
        const Matrix E2 = gen.semigroup(2.0 * delta).value;
        return {symmetrized(I - E2 + sign * 2.0 * delta * M * E.value), symbol};
    };
    out.U_minus = build(geom.c(), out.E_c, 1.0, "U-");
    out.U_plus = build(geom.d(), out.E_d, 1.0, "U+");
    out.V_minus = build(geom.c(), out.E_c, -1.0, "V-");
    out.V_plus = build(geom.d(), out.E_d, -1.0, "V+");

    auto um = invert(out.U_minus.value, "U-");
    auto up = invert(out.U_plus.value, "U+");
    auto vm = invert(out.V_minus.value, "V-");
    auto vp = invert(out.V_plus.value, "V+");
    out.U_minus_inv = std::move(um.value);
    out.U_plus_inv = std::move(up.value);
    out.V_minus_inv = std::move(vm.value);
    out.V_plus_inv = std::move(vp.value);
    out.cond_U_minus = um.cond;
    out.cond_U_plus = up.cond;
    out.cond_V_minus = vm.cond;
    out.cond_V_plus = vp.cond;
    return out;
}

PBlocks assemble_P(const Diffusivities& k, const UVBlocks& uv) {
    const auto n = uv.E_c.value.rows();
    require_same_size(uv.U_minus_inv, n, "U-^{-1}");
    require_same_size(uv.U_plus_inv, n, "U+^{-1}");
    require_same_size(uv.V_minus_inv, n, "V-^{-1}");
    require_same_size(uv.V_plus_inv, n, "V+^{-1}");
    require_same_size(uv.E_d.value, n, "e^{dM}");
    const Matrix I = Matrix::Identity(n, n);

    const auto side = [&](double kk, const Matrix& Ui, const Matrix& Vi, const Matrix& E, const char* tag,
                          OperatorMatrix& P1, OperatorMatrix& P2, OperatorMatrix& P3) {
        const Matrix ip = I + E;
        const Matrix im = I - E;
        const Matrix ip2 = ip * ip;
        const Matrix im2 = im * im;
        P1 = {symmetrized(kk * (Ui * ip2 + Vi * im2)), std::string("P1") + tag};
        P2 = {symmetrized(kk * ((Ui + Vi) * (I - E * E))), std::string("P2") + tag};
        P3 = {symmetrized(kk * (Ui * im2 + Vi * ip2)), std::string("P3") + tag};
    };
    PBlocks p;
    side(k.k_minus, uv.U_minus_inv, uv.V_minus_inv, uv.E_c.value, "-", p.P1_minus, p.P2_minus, p.P3_minus);
    side(k.k_plus, uv.U_plus_inv, uv.V_plus_inv, uv.E_d.value, "+", p.P1_plus, p.P2_plus, p.P3_plus);
    return p;
}

SideOperators TransmissionOperators::side(Side s) const {
    SideOperators out;
    out.side = s;
    out.delta = s == Side::minus ? geom.c() : geom.d();
    out.M = generator->matrix();
    out.E = s == Side::minus ? uv.E_c.value : uv.E_d.value;
    out.U_inv = s == Side::minus ? uv.U_minus_inv : uv.U_plus_inv;
    out.V_inv = s == Side::minus ? uv.V_minus_inv : uv.V_plus_inv;
    return out;
}

TransmissionOperators assemble_operators(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                         const Diffusivities& k) {
    if (!generator) {
        throw PreconditionError("transmission operators need a generator");
    }
    TransmissionOperators ops;
    ops.generator = std::move(generator);
    ops.geom = CylinderGeometry::make(geom.a, geom.gamma, geom.b);
    ops.k = Diffusivities::make(k.k_minus, k.k_plus);
    ops.uv = assemble_UV(*ops.generator, ops.geom);
    ops.p = assemble_P(ops.k, ops.uv);

    const Matrix& M = ops.M();
    const auto n = M.rows();
    const Matrix p1 = ops.p.P1_plus.value + ops.p.P1_minus.value;
    const Matrix p2 = ops.p.P2_plus.value - ops.p.P2_minus.value;
    const Matrix p3 = ops.p.P3_plus.value + ops.p.P3_minus.value;
    ops.Lambda.resize(2 * n, 2 * n);
    ops.Lambda << M * p1, -p2, M * p2, -p3;

    ops.W = ops.uv.U_plus.value * ops.uv.U_minus.value * ops.uv.V_plus.value * ops.uv.V_minus.value;
    const SymbolContext ctx = context_of(ops.geom, ops.k);
    const SectionOperator& section = ops.generator->section();
    ops.F_op = section.apply_function([&ctx](double mu) { return f_tilde(ctx, -mu); }, "f~(-A)").value;

    const Vector& mu = section.eigenvalues();
    const Vector& m = ops.generator->eigenvalues();
    ops.det_modes.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        ops.det_modes(j) = -m(j) * f_total(ctx, -mu(j));
    }

    const Eigen::JacobiSVD<Matrix> svd(ops.Lambda);
    const Vector& sv = svd.singularValues();
    ops.cond_Lambda = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    return ops;
}

InterfaceSources assemble_sources(const TransmissionOperators& ops, const Quadruple& ptm, const Quadruple& ptp,
                                  const ParticularSolution& F_minus, const ParticularSolution& F_plus,
                                  SourceConvention convention) {
    const auto n = static_cast<std::ptrdiff_t>(ops.dimension());
    for (const auto* q : {&ptm, &ptp}) {
        for (const auto& v : *q) {
            require_same_size(v, n, "phi-tilde");
        }
    }
    if (F_minus.side() != Side::minus || F_plus.side() != Side::plus) {
        throw PreconditionError("particular solutions passed for the wrong sides");
    }
    const Matrix& M2 = ops.generator->power(2);
    const Matrix& Minv2 = ops.generator->power(-2);
    const Matrix& Ed = ops.uv.E_d.value;
    const Matrix& Ec = ops.uv.E_c.value;
    const double kp = ops.k.k_plus;
    const double km = ops.k.k_minus;

    InterfaceSources s;
    s.S_check = -kp * F_plus.interface_d3() + kp * (M2 * F_plus.interface_d1()) + km * F_minus.interface_d3() -
                km * (M2 * F_minus.interface_d1());

    const Vector plus_sum = ptp[1] + ptp[3];
    const Vector plus_diff = ptp[1] - ptp[3];
    const Vector minus_diff = ptm[1] - ptm[3];
    const Vector minus_sum = ptm[1] + ptm[3];
    const double weight = convention == SourceConvention::printed ? -1.0 : 0.5;
    s.S1 = 2.0 * kp * (plus_sum + Ed * plus_diff) - 2.0 * km * (minus_diff + Ec * minus_sum) +
           weight * (Minv2 * s.S_check);
    s.S2 = 2.0 * kp * (plus_sum - Ed * plus_diff) + 2.0 * km * (minus_diff - Ec * minus_sum);
    return s;
}

namespace {

double backward_error(const Matrix& Lambda, const Vector& x, const Vector& rhs) {
    const double r = (Lambda * x - rhs).norm();
    const double scale = Lambda.norm() * x.norm() + rhs.norm();
    return scale > 0.0 ? r / scale : 0.0;
}

Vector stacked(const InterfaceSources& s) {
    Vector rhs(s.S1.size() + s.S2.size());
    rhs << s.S1, s.S2;
    return rhs;
}

void check_sources(const TransmissionOperators& ops, const InterfaceSources& src) {
    const auto n = static_cast<std::ptrdiff_t>(ops.dimension());
    require_same_size(src.S1, n, "S1");
    require_same_size(src.S2, n, "S2");
}

}  // namespace

InterfaceData solve_interface_block(const TransmissionOperators& ops, const InterfaceSources& src) {
    check_sources(ops, src);
    const auto n = static_cast<Eigen::Index>(ops.dimension());
    const Vector rhs = stacked(src);
    const Eigen::PartialPivLU<Matrix> lu(ops.Lambda);
    if (lu.rcond() < std::numeric_limits<double>::epsilon()) {
        throw Anomaly("interface block matrix is numerically singular");
    }
    const Vector x = lu.solve(rhs);
    InterfaceData out{x.head(n), x.tail(n), "block", backward_error(ops.Lambda, x, rhs)};
    if (!x.allFinite() || out.residual > kBackwardTol) {
        throw Anomaly("block interface solve backward error " + std::to_string(out.residual) + " exceeds 1e-10");
    }
    return out;
}

InterfaceData solve_interface_calculus(const TransmissionOperators& ops, const InterfaceSources& src) {
    check_sources(ops, src);
    const Matrix& M = ops.M();
    const Matrix p1 = ops.p.P1_plus.value + ops.p.P1_minus.value;
    const Matrix p2 = ops.p.P2_plus.value - ops.p.P2_minus.value;
    const Matrix p3 = ops.p.P3_plus.value + ops.p.P3_minus.value;
    const Matrix* blocks[] = {&M, &p1, &p2, &p3};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double gap = relative_commutator(*blocks[i], *blocks[j]);
            if (gap > kCommuteTol) {
                throw Anomaly("interface blocks fail to commute (relative commutator " + std::to_string(gap) + ")");
            }
        }
    }

    const SectionOperator& section = ops.generator->section();
    const Matrix& Q = section.eigenvectors();
    const Vector& mu = section.eigenvalues();
    const Vector& m = ops.generator->eigenvalues();
    const SymbolContext ctx = context_of(ops.geom, ops.k);
    const Vector s1 = Q.transpose() * src.S1;
    const Vector s2 = Q.transpose() * src.S2;
    const auto n = s1.size();
    Vector y1(n);
    Vector y2(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double z = -mu(j);
        const auto fd = f_components(ctx.d, z);
        const auto fc = f_components(ctx.c, z);
        const double q1 = ctx.k_plus * fd.f1 + ctx.k_minus * fc.f1;
        const double q2 = ctx.k_plus * fd.f2 - ctx.k_minus * fc.f2;
        const double q3 = ctx.k_plus * fd.f3 + ctx.k_minus * fc.f3;
        const double f = f_total(ctx, z);
        if (!(f > 0.0)) {
            throw Anomaly("f(-mu_j) = " + std::to_string(f) + " is not positive at mode " + std::to_string(j));
        }
        const double det = -m(j) * f;
        y1(j) = (-q3 * s1(j) + q2 * s2(j)) / det;
        y2(j) = m(j) * (-q2 * s1(j) + q1 * s2(j)) / det;
    }
    InterfaceData out{Q * y1, Q * y2, "calculus", 0.0};
    Vector x(2 * n);
    x << out.psi1, out.psi2;
    out.residual = backward_error(ops.Lambda, x, stacked(src));
    return out;
}

InterfaceData leading_order_interface(const InterfaceSources& src, const GeneratorM& M, const Diffusivities& k) {
    const auto n = static_cast<std::ptrdiff_t>(M.dimension());
    require_same_size(src.S1, n, "S1");
    require_same_size(src.S2, n, "S2");
    const double K = k.k_plus + k.k_minus;
    const double D = k.k_plus - k.k_minus;
    const double w = 8.0 * k.k_plus * k.k_minus;
    InterfaceData out;
    out.psi1 = M.power(-1) * (K * src.S1 - D * src.S2) / w;
    out.psi2 = (D * src.S1 - K * src.S2) / w;
    out.route = "leading-order";
    return out;
}

double interface_gap(const InterfaceData& a, const InterfaceData& b) {
    const double diff = std::sqrt((a.psi1 - b.psi1).squaredNorm() + (a.psi2 - b.psi2).squaredNorm());
    const double scale = std::sqrt(a.psi1.squaredNorm() + a.psi2.squaredNorm());
    if (diff == 0.0) {
        return 0.0;
    }
    return diff / std::max(scale, std::numeric_limits<double>::min());
}

Matrix determinant_block(const TransmissionOperators& ops) {
    const Matrix p1 = ops.p.P1_plus.value + ops.p.P1_minus.value;
    const Matrix p2 = ops.p.P2_plus.value - ops.p.P2_minus.value;
    const Matrix p3 = ops.p.P3_plus.value + ops.p.P3_minus.value;
    return -ops.M() * (p1 * p3 - p2 * p2);
}

Matrix adjugate_block(const TransmissionOperators& ops) {
    const Matrix& M = ops.M();
    const auto n = M.rows();
    const Matrix p1 = ops.p.P1_plus.value + ops.p.P1_minus.value;
    const Matrix p2 = ops.p.P2_plus.value - ops.p.P2_minus.value;
    const Matrix p3 = ops.p.P3_plus.value + ops.p.P3_minus.value;
    Matrix adj(2 * n, 2 * n);
    adj << -p3, p2, -M * p2, M * p1;
    return adj;
}

OperatorDiagnostics diagnose(const TransmissionOperators& ops) {
    OperatorDiagnostics d;
    const Matrix& M = ops.M();
    const auto n = M.rows();
    const SectionOperator& section = ops.generator->section();
    const SymbolContext ctx = context_of(ops.geom, ops.k);

    const std::vector<const Matrix*> all = {&M,
                                            &ops.uv.E_c.value,
                                            &ops.uv.E_d.value,
                                            &ops.uv.U_minus.value,
                                            &ops.uv.U_plus.value,
                                            &ops.uv.V_minus.value,
                                            &ops.uv.V_plus.value,
                                            &ops.p.P1_minus.value,
                                            &ops.p.P2_minus.value,
                                            &ops.p.P3_minus.value,
                                            &ops.p.P1_plus.value,
                                            &ops.p.P2_plus.value,
                                            &ops.p.P3_plus.value};
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            d.max_commutator = std::max(d.max_commutator, relative_commutator(*all[i], *all[j]));
        }
    }

    const auto mapped = [&](const Matrix& assembled, const std::function<double(double)>& scalar) {
        return relative_gap(assembled, section.apply_function(scalar).value);
    };
    const double c = ctx.c;
    const double dd = ctx.d;
    const double km = ctx.k_minus;
    const double kp = ctx.k_plus;
    d.spectral_mapping = std::max({
        mapped(ops.uv.U_minus.value, [c](double mu) { return u_delta(c, -mu); }),
        mapped(ops.uv.U_plus.value, [dd](double mu) { return u_delta(dd, -mu); }),
        mapped(ops.uv.V_minus.value, [c](double mu) { return v_delta(c, -mu); }),
        mapped(ops.uv.V_plus.value, [dd](double mu) { return v_delta(dd, -mu); }),
        mapped(ops.p.P1_minus.value, [c, km](double mu) { return km * f_components(c, -mu).f1; }),
        mapped(ops.p.P2_minus.value, [c, km](double mu) { return km * f_components(c, -mu).f2; }),
        mapped(ops.p.P3_minus.value, [c, km](double mu) { return km * f_components(c, -mu).f3; }),
        mapped(ops.p.P1_plus.value, [dd, kp](double mu) { return kp * f_components(dd, -mu).f1; }),
        mapped(ops.p.P2_plus.value, [dd, kp](double mu) { return kp * f_components(dd, -mu).f2; }),
        mapped(ops.p.P3_plus.value, [dd, kp](double mu) { return kp * f_components(dd, -mu).f3; }),
    });

    const auto identity = [&](double kk, double delta, const OperatorMatrix& P1, const OperatorMatrix& P2,
                              const OperatorMatrix& P3, const Matrix& Ui, const Matrix& Vi) {
        const Matrix lhs = P1.value * P3.value - P2.value * P2.value;
        const Matrix rhs = 16.0 * kk * kk * Ui * Vi * ops.generator->semigroup(2.0 * delta).value;
        const double scale = std::max({norm2(P1.value * P3.value), norm2(P2.value * P2.value),
                                       std::numeric_limits<double>::min()});
        return norm2(lhs - rhs) / scale;
    };
    d.block_identity = std::max(identity(km, c, ops.p.P1_minus, ops.p.P2_minus, ops.p.P3_minus,
                                         ops.uv.U_minus_inv, ops.uv.V_minus_inv),
                                identity(kp, dd, ops.p.P1_plus, ops.p.P2_plus, ops.p.P3_plus, ops.uv.U_plus_inv,
                                         ops.uv.V_plus_inv));

    const Matrix det = determinant_block(ops);
    const Matrix& Q = section.eigenvectors();
    const Matrix modal = Q.transpose() * det * Q;
    const double det_scale = std::max(ops.det_modes.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    Matrix residual = modal;
    residual.diagonal() -= ops.det_modes;
    d.det_gap = residual.cwiseAbs().maxCoeff() / det_scale;

    const Matrix W_inv = ops.uv.U_plus_inv * ops.uv.U_minus_inv * ops.uv.V_plus_inv * ops.uv.V_minus_inv;
    const Matrix factored = -16.0 * kp * km * W_inv * W_inv * M * ops.F_op;
    d.det_factorization = relative_gap(factored, det);

    const Matrix adj = adjugate_block(ops);
    Matrix expected = Matrix::Zero(2 * n, 2 * n);
    expected.topLeftCorner(n, n) = det;
    expected.bottomRightCorner(n, n) = det;
    const double adj_scale = std::max(norm2(ops.Lambda) * norm2(adj), std::numeric_limits<double>::min());
    d.adjugate = norm2(ops.Lambda * adj - expected) / adj_scale;
    return d;
}

Route parse_route(const std::string& name) {
    if (name == "block") {
        return Route::block;
    }
    if (name == "calculus") {
        return Route::calculus;
    }
    if (name == "both") {
        return Route::both;
    }
    throw InputError("route must be block, calculus or both, got '" + name + "'");
}

const char* to_string(Route r) {
    switch (r) {
        case Route::block:
            return "block";
        case Route::calculus:
            return "calculus";
        default:
            return "both";
    }
}

void TransmissionProblem::validate() const {
    if (!generator) {
        throw PreconditionError("transmission problem needs a section operator");
    }
    CylinderGeometry::make(geom.a, geom.gamma, geom.b);
    Diffusivities::make(k.k_minus, k.k_plus);
    bc.validate(static_cast<std::ptrdiff_t>(generator->dimension()));
}

PreparedTransmission prepare(const TransmissionProblem& problem, const TransmissionOptions& options) {
    problem.validate();
    PreparedTransmission prep;
    prep.problem = problem;
    prep.options = options;
    prep.ops = std::make_shared<const TransmissionOperators>(
        assemble_operators(problem.generator, problem.geom, problem.k));
    const SectionOperator& section = problem.generator->section();
    prep.F_minus = std::make_shared<const ParticularSolution>(
        solve_particular(section, problem.geom, Side::minus, problem.forcing, options.n_x));
    prep.F_plus = std::make_shared<const ParticularSolution>(
        solve_particular(section, problem.geom, Side::plus, problem.forcing, options.n_x));
    const BoundaryData& bc = problem.bc;
    prep.phi_tilde_minus = phi_tilde_minus(prep.ops->side(Side::minus), bc.phi1_minus, bc.phi2_minus,
                                           prep.F_minus->outer_d1(), prep.F_minus->interface_d1());
    prep.phi_tilde_plus = phi_tilde_plus(prep.ops->side(Side::plus), bc.phi1_plus, bc.phi2_plus,
                                         prep.F_plus->interface_d1(), prep.F_plus->outer_d1());
    prep.sources = assemble_sources(*prep.ops, prep.phi_tilde_minus, prep.phi_tilde_plus, *prep.F_minus,
                                    *prep.F_plus, options.source_convention);
    return prep;
}

TransmissionSolution assemble_solution(std::shared_ptr<const PreparedTransmission> prepared,
                                       const InterfaceData& minus_side, const InterfaceData& plus_side) {
    if (!prepared) {
        throw PreconditionError("assemble_solution needs prepared data");
    }
    const TransmissionOperators& ops = *prepared->ops;
    const CylinderGeometry& geom = prepared->problem.geom;
    Quadruple am = alphas_minus(ops.side(Side::minus), minus_side.psi1, minus_side.psi2, prepared->phi_tilde_minus);
    Quadruple ap = alphas_plus(ops.side(Side::plus), plus_side.psi1, plus_side.psi2, prepared->phi_tilde_plus);
    SubproblemSolution minus(ops.generator, geom, Side::minus, std::move(am), prepared->F_minus);
    SubproblemSolution plus(ops.generator, geom, Side::plus, std::move(ap), prepared->F_plus);
    return TransmissionSolution{std::move(prepared), std::move(minus), std::move(plus), minus_side, std::nullopt,
                                0.0, ResidualReport{}};
}

TransmissionSolution solve_transmission(const TransmissionProblem& problem, const TransmissionOptions& options) {
    auto prepared = std::make_shared<const PreparedTransmission>(prepare(problem, options));
    const InterfaceData block = solve_interface_block(*prepared->ops, prepared->sources);
    const InterfaceData calculus = solve_interface_calculus(*prepared->ops, prepared->sources);
    const bool calculus_first = options.route == Route::calculus;
    const InterfaceData& primary = calculus_first ? calculus : block;
    TransmissionSolution solution = assemble_solution(prepared, primary, primary);
    solution.alternate = calculus_first ? block : calculus;
    solution.route_gap = interface_gap(block, calculus);
    solution.report = residual_report(solution, options.probes);
    return solution;
}

}  // namespace biharm
