#include "biharm/residual_report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "biharm/errors.hpp"
#include "biharm/transmission.hpp"

namespace biharm {

bool ResidualReport::all_within_budget() const {
    return std::all_of(residuals.begin(), residuals.end(), [](const auto& kv) { return kv.second.within(); });
}

std::vector<std::string> ResidualReport::failures() const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : residuals) {
        if (!entry.within()) {
            out.push_back(key);
        }
    }
    return out;
}

double ResidualReport::value(const std::string& key) const {
    if (const auto it = residuals.find(key); it != residuals.end()) {
        return it->second.scaled;
    }
    if (const auto it = info.find(key); it != info.end()) {
        return it->second;
    }
    throw PreconditionError("residual report has no key '" + key + "'");
}

std::string ResidualReport::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json raw;
    nlohmann::ordered_json budgets;
    for (const auto& [key, entry] : residuals) {
        j[key] = entry.scaled;
        raw[key] = entry.raw;
        budgets[key] = entry.budget;
    }
    for (const auto& [key, v] : info) {
        j[key] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    }
    j["raw"] = raw;
    j["budgets"] = budgets;
    j["all_within_budget"] = all_within_budget();
    j["failures"] = failures();
    return j.dump(2);
}

namespace {

struct Accumulator {
    double raw = 0.0;
    double scaled = 0.0;

    void add(const Vector& residual, double magnitude) {
        const double r = residual.norm();
        raw = std::max(raw, r);
        scaled = std::max(scaled, r / std::max(1.0, magnitude));
    }
};

ResidualEntry entry(const Accumulator& acc, double budget) { return {acc.raw, acc.scaled, budget}; }

/// u'''' from a fourth-order central difference of the analytic u'''.
Vector fourth_derivative(const SubproblemSolution& u, double x, double step) {
    return (-u.evaluate(3, x + 2.0 * step) + 8.0 * u.evaluate(3, x + step) - 8.0 * u.evaluate(3, x - step) +
            u.evaluate(3, x - 2.0 * step)) /
           (12.0 * step);
}

struct EqResult {
    Accumulator acc;
    double fd_estimate = 0.0;
};

EqResult equation_residual(const TransmissionSolution& sol, Side side, std::size_t probes) {
    const SubproblemSolution& u = sol.side(side);
    const GeneratorM& gen = u.generator();
    const SectionOperator& section = gen.section();
    const Matrix& A = section.matrix();
    const Matrix A2 = A * A;
    const Matrix& Q = section.eigenvectors();
    const ModalForcing& forcing = sol.prepared->problem.forcing;
    const auto m = static_cast<Eigen::Index>(gen.dimension());
    const double len = u.right() - u.left();
    const double m_max = gen.eigenvalues().cwiseAbs().maxCoeff();
    const double step = std::min(1e-3 * len, 5e-3 / m_max);
    const double margin = 4.0 * step;

    EqResult out;
    for (std::size_t i = 0; i < probes; ++i) {
        const double s = probes == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(probes - 1);
        const double x = u.left() + margin + s * (len - 2.0 * margin);
        Vector f_modal(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            f_modal(j) = forcing.is_zero() ? 0.0 : forcing(side, static_cast<std::size_t>(j), x);
        }
        const Vector f = Q * f_modal;
        const Vector u0 = u.evaluate(0, x);
        const Vector u2 = u.evaluate(2, x);
        const Vector d4 = fourth_derivative(u, x, step);
        const Vector d4_coarse = fourth_derivative(u, x, 2.0 * step);
        const Vector Au2 = 2.0 * (A * u2);
        const Vector A2u = A2 * u0;
        const double magnitude = d4.norm() + Au2.norm() + A2u.norm() + f.norm();
        out.acc.add(d4 + Au2 + A2u - f, magnitude);
        out.fd_estimate = std::max(out.fd_estimate, (d4 - d4_coarse).norm() / std::max(1.0, magnitude));
    }
    return out;
}

}  // namespace

ResidualReport residual_report(const TransmissionSolution& sol, std::size_t probes) {
    if (probes < 2) {
        throw PreconditionError("residual report needs at least 2 probe points");
    }
    const PreparedTransmission& prep = *sol.prepared;
    const TransmissionOperators& ops = *prep.ops;
    const CylinderGeometry& geom = prep.problem.geom;
    const Diffusivities& k = prep.problem.k;
    const BoundaryData& bc = prep.problem.bc;
    const Matrix& A = ops.generator->section().matrix();
    const Matrix& M = ops.M();
    const Matrix& M2 = ops.generator->power(2);
    const auto n = M.rows();
    const Matrix I = Matrix::Identity(n, n);
    const double gamma = geom.gamma;

    ResidualReport report;

    const auto bvp_relative = [](const ParticularSolution& F) {
        if (F.is_zero()) {
            return 0.0;
        }
        const double scale = std::max(
            {1.0, F.nodes_F().cwiseAbs().maxCoeff(), F.traces().d1_left.norm(), F.traces().d1_right.norm(),
             F.traces().d3_left.norm(), F.traces().d3_right.norm()});
        return std::max(F.field_error(), F.trace_error()) / scale;
    };
    for (const Side side : {Side::minus, Side::plus}) {
        const EqResult eq = equation_residual(sol, side, probes);
        const double bvp = bvp_relative(sol.side(side).particular());
        const double budget = kExactBudget + 10.0 * (bvp + eq.fd_estimate);
        report.residuals[side == Side::minus ? "eq_minus" : "eq_plus"] = entry(eq.acc, budget);
    }

    const SubproblemSolution& um = sol.minus;
    const SubproblemSolution& up = sol.plus;

    const auto pointwise = [](const Vector& lhs, const Vector& rhs, double terms) {
        Accumulator acc;
        acc.add(lhs - rhs, std::max({lhs.norm(), rhs.norm(), terms}));
        return acc;
    };
    report.residuals["bc_1"] =
        entry(pointwise(um.evaluate(0, geom.a), bc.phi1_minus, um.term_scale(0, geom.a)), kExactBudget);
    report.residuals["bc_2"] =
        entry(pointwise(um.evaluate(1, geom.a), bc.phi2_minus, um.term_scale(1, geom.a)), kExactBudget);
    report.residuals["bc_3"] =
        entry(pointwise(up.evaluate(0, geom.b), bc.phi1_plus, up.term_scale(0, geom.b)), kExactBudget);
    report.residuals["bc_4"] =
        entry(pointwise(up.evaluate(1, geom.b), bc.phi2_plus, up.term_scale(1, geom.b)), kExactBudget);

    const Vector um0 = um.evaluate(0, gamma);
    const Vector um1 = um.evaluate(1, gamma);
    const Vector um2 = um.evaluate(2, gamma);
    const Vector um3 = um.evaluate(3, gamma);
    const Vector up0 = up.evaluate(0, gamma);
    const Vector up1 = up.evaluate(1, gamma);
    const Vector up2 = up.evaluate(2, gamma);
    const Vector up3 = up.evaluate(3, gamma);
    const auto terms = [&](int order) {
        return std::max(um.term_scale(order, gamma), up.term_scale(order, gamma));
    };
    report.residuals["tc1_u"] = entry(pointwise(um0, up0, terms(0)), kExactBudget);
    report.residuals["tc1_du"] = entry(pointwise(um1, up1, terms(1)), kExactBudget);
    const Vector flux2_minus = k.k_minus * (um2 + A * um0);
    const Vector flux2_plus = k.k_plus * (up2 + A * up0);
    const Vector flux3_minus = k.k_minus * (um3 + A * um1);
    const Vector flux3_plus = k.k_plus * (up3 + A * up1);
    {
        Accumulator acc;
        acc.add(flux2_minus - flux2_plus, (k.k_minus * (um2.norm() + (A * um0).norm()) +
                                           k.k_plus * (up2.norm() + (A * up0).norm()) +
                                           (k.k_minus + k.k_plus) * (terms(2) + A.norm() * terms(0))));
        report.residuals["tc2_flux2"] = entry(acc, kExactBudget);
    }
    {
        Accumulator acc;
        acc.add(flux3_minus - flux3_plus, (k.k_minus * (um3.norm() + (A * um1).norm()) +
                                           k.k_plus * (up3.norm() + (A * up1).norm()) +
                                           (k.k_minus + k.k_plus) * (terms(3) + A.norm() * terms(1))));
        report.residuals["tc2_flux3"] = entry(acc, kExactBudget);
    }

    // Closed forms of u'' - M^2 u and u''' - M^2 u' at gamma in terms of alpha_2, alpha_4.
    const auto identities = [&](const SubproblemSolution& u, Side side, const Vector& u0, const Vector& u1,
                                const Vector& u2, const Vector& u3, const char* d2_key, const char* d3_key) {
        const Matrix& E = side == Side::minus ? ops.uv.E_c.value : ops.uv.E_d.value;
        const Vector& a2 = u.alphas()[1];
        const Vector& a4 = u.alphas()[3];
        const ParticularSolution& F = u.particular();
        const Vector Fd3 = F.interface_d3() - M2 * F.interface_d1();
        Vector closed_d2;
        Vector closed_d3;
        if (side == Side::minus) {
            closed_d2 = -(2.0 * M * ((I - E) * a2) - 2.0 * M * ((I + E) * a4));
            closed_d3 = 2.0 * M2 * ((I + E) * a2) - 2.0 * M2 * ((I - E) * a4) + Fd3;
        } else {
            closed_d2 = 2.0 * M * ((I - E) * a2) + 2.0 * M * ((I + E) * a4);
            closed_d3 = 2.0 * M2 * ((I + E) * a2) + 2.0 * M2 * ((I - E) * a4) + Fd3;
        }
        const Vector direct_d2 = u2 - M2 * u0;
        const Vector direct_d3 = u3 - M2 * u1;
        Accumulator acc2;
        acc2.add(direct_d2 - closed_d2, u2.norm() + (M2 * u0).norm());
        Accumulator acc3;
        acc3.add(direct_d3 - closed_d3, u3.norm() + (M2 * u1).norm());
        report.residuals[d2_key] = entry(acc2, kExactBudget);
        report.residuals[d3_key] = entry(acc3, kExactBudget);
    };
    identities(um, Side::minus, um0, um1, um2, um3, "id_minus_d2", "id_minus_d3");
    identities(up, Side::plus, up0, up1, up2, up3, "id_plus_d2", "id_plus_d3");

    report.residuals["route_gap"] = {sol.route_gap, sol.route_gap, kRouteBudget};
    const OperatorDiagnostics diag = diagnose(ops);
    report.residuals["det_gap"] = {diag.det_gap, diag.det_gap, kRouteBudget};

    report.info["cond_Uminus"] = ops.uv.cond_U_minus;
    report.info["cond_Uplus"] = ops.uv.cond_U_plus;
    report.info["cond_Vminus"] = ops.uv.cond_V_minus;
    report.info["cond_Vplus"] = ops.uv.cond_V_plus;
    report.info["cond_Lambda"] = ops.cond_Lambda;
    return report;
}

}  // namespace biharm
