#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace biharm {

struct TransmissionSolution;

/// One checked quantity. `scaled` = raw / max(1, size of the terms involved).
struct ResidualEntry {
    double raw = 0.0;
    double scaled = 0.0;
    double budget = 0.0;
    bool within() const { return scaled <= budget; }
};

/// Quantitative check of a candidate solution against the original
/// equations, boundary and transmission conditions.
///
/// Residual keys: eq_minus, eq_plus, bc_1..bc_4, tc1_u, tc1_du, tc2_flux2,
/// tc2_flux3, id_minus_d2, id_minus_d3, id_plus_d2, id_plus_d3, route_gap,
/// det_gap. Informational keys: cond_Uminus, cond_Uplus, cond_Vminus,
/// cond_Vplus, cond_Lambda.
struct ResidualReport {
    std::map<std::string, ResidualEntry> residuals;
    std::map<std::string, double> info;

    bool all_within_budget() const;
    std::vector<std::string> failures() const;
    /// Scaled value of a residual or the value of an info key. Throws
    /// PreconditionError on an unknown key.
    double value(const std::string& key) const;
    /// Pretty-printed JSON with the fixed keys at the top level plus
    /// "raw", "budgets", "all_within_budget" and "failures".
    std::string to_json() const;
};

/// Homogeneous-path budget.
inline constexpr double kExactBudget = 1e-9;
/// Budget for route_gap and det_gap.
inline constexpr double kRouteBudget = 1e-10;

/// Evaluates the report on `probes` equispaced points per side (ends included
/// for the EQ sweep only through interior offsets).
ResidualReport residual_report(const TransmissionSolution& solution, std::size_t probes = 33);

}  // namespace biharm
