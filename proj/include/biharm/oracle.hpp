#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "biharm/exact_cases.hpp"
#include "biharm/linalg.hpp"
#include "biharm/modal_forcing.hpp"
#include "biharm/problem.hpp"
#include "biharm/section_operator.hpp"

namespace biharm {

/// Nodal fields of the direct finite-difference solve, per mode.
///
/// Each mode is discretized on both intervals with n_x nodes (shared node at
/// gamma) plus one ghost node beyond every end. Interior rows apply the square
/// of (second difference + mu); boundary rows fix u and the centered first
/// difference; interface rows match centered first differences, k (u'' + mu u)
/// and its one-sided second-order derivative.
class OracleSolution {
public:
    std::size_t grid_size() const { return n_x_; }
    /// Nodal modal values (n_x x m) on the given side, ends included.
    const Matrix& nodes(Side side) const { return side == Side::minus ? minus_ : plus_; }
    /// Worst relative residual ||K u - r|| / (||K|| ||u|| + ||r||) over modes.
    double solve_residual() const { return residual_; }
    /// u(x) in section coordinates; cubic interpolation between nodes.
    Vector evaluate(Side side, double x) const;

private:
    friend OracleSolution direct_solve(const SectionOperator&, const CylinderGeometry&, const Diffusivities&,
                                       const ModalForcing&, const BoundaryData&, std::size_t);
    std::size_t n_x_ = 0;
    CylinderGeometry geom_;
    Matrix Q_;
    Matrix minus_;
    Matrix plus_;
    double residual_ = 0.0;
};

/// n_x >= 33 nodes per interval. Throws ResolutionError for smaller grids and
/// Anomaly if a per-mode system is singular.
OracleSolution direct_solve(const SectionOperator& section, const CylinderGeometry& geom, const Diffusivities& k,
                            const ModalForcing& forcing, const BoundaryData& bc, std::size_t n_x);

/// Section-valued field on the two pieces.
using FieldFn = std::function<Vector(Side, double)>;

struct ErrorMetrics {
    /// max over probes of ||a - b||
    double sup = 0.0;
    /// sqrt(mean ||a - b||^2) / max(1, max ||b||)
    double scaled_l2 = 0.0;
    /// sup / max(1, max ||b||)
    double relative_sup = 0.0;
};

/// `probes` equispaced points per side, ends included.
ErrorMetrics compare(const FieldFn& a, const FieldFn& b, const CylinderGeometry& geom, std::size_t probes = 17);

FieldFn field_of(const TransmissionSolution& solution);
FieldFn field_of(const OracleSolution& solution);
FieldFn field_of(const ExactCase& exact);

enum class Method { representation, direct };

Method parse_method(const std::string& name);
const char* to_string(Method m);

struct RateRow {
    std::size_t n_x = 0;
    double error = 0.0;
    /// log2(e_prev / e) / log2(h_prev / h); NaN on the first row.
    double rate = 0.0;
};

struct ConvergenceTable {
    std::vector<RateRow> rows;
    /// Least-squares slope of -log(error) against log(n_x - 1); NaN on a floor.
    double fitted_rate = 0.0;
    /// Every error is at or below 1e-9, so no rate is meaningful.
    bool floor = false;

    /// Columns n_x,error,rate; "nan" for undefined rates.
    std::string to_csv() const;
};

/// Builds the table from errors measured at each level. Throws
/// PreconditionError with fewer than 3 levels or mismatched sizes.
ConvergenceTable convergence_table(const std::vector<std::size_t>& levels, const std::vector<double>& errors);

/// Relative sup-norm error against the exact case at each refinement level.
ConvergenceTable convergence_study(const ExactCase& exact, Method method, const std::vector<std::size_t>& levels,
                                   std::size_t probes = 17);

}  // namespace biharm
