#pragma once

#include <cstddef>

#include "biharm/linalg.hpp"
#include "biharm/modal_forcing.hpp"
#include "biharm/problem.hpp"
#include "biharm/section_operator.hpp"

namespace biharm {

/// Endpoint traces of F in section coordinates.
struct ParticularTraces {
    Vector d1_left;
    Vector d1_right;
    Vector d3_left;
    Vector d3_right;
};

/// The solution F of F'''' - 2AF'' + A^2 F = f on one interval with
/// F = F'' = 0 at both ends, computed per eigenmode.
///
/// Each mode solves w'' + mu w = f_j and F'' + mu F = w with homogeneous
/// Dirichlet ends by central differences on n_x and 2 n_x - 1 points, then one
/// Richardson step. Nodal fields F, F', w, w' are kept on the coarse grid;
/// F'' = w - mu F and F''' = w' - mu F'.
class ParticularSolution {
public:
    /// Identically zero solution on the given side.
    static ParticularSolution zero(const SectionOperator& section, const CylinderGeometry& geom, Side side);

    Side side() const { return side_; }
    double left() const { return left_; }
    double right() const { return right_; }
    std::size_t grid_size() const { return n_x_; }
    bool is_zero() const { return zero_; }

    /// F^(order)(x) in modal coordinates, order in 0..3. Off-grid points use
    /// four-point Lagrange interpolation; the endpoints return stored traces.
    Vector modal(int order, double x) const;
    /// Same in section coordinates.
    Vector evaluate(int order, double x) const;

    const ParticularTraces& traces() const { return traces_; }
    /// F'(gamma) and F'''(gamma) for this side.
    const Vector& interface_d1() const;
    const Vector& interface_d3() const;
    /// F' at the outer end (a for minus, b for plus).
    const Vector& outer_d1() const;

    /// Euclidean norm over modes of max_x |F_fine - F_coarse| / 3; estimates
    /// the error of the unextrapolated field, an upper bound for the
    /// extrapolated one.
    double field_error() const { return field_error_; }
    /// Same estimate for F' and F''' at both ends.
    double trace_error() const { return trace_error_; }

    /// Nodal values, (n_x x m), modal coordinates.
    const Matrix& nodes_F() const { return F_; }

private:
    friend ParticularSolution solve_particular(const SectionOperator&, const CylinderGeometry&, Side,
                                               const ModalForcing&, std::size_t);

    Side side_ = Side::minus;
    double left_ = 0.0;
    double right_ = 1.0;
    std::size_t n_x_ = 0;
    bool zero_ = true;
    Vector mu_;
    Matrix Q_;
    Matrix F_;
    Matrix dF_;
    Matrix w_;
    Matrix dw_;
    ParticularTraces traces_;
    double field_error_ = 0.0;
    double trace_error_ = 0.0;
};

/// n_x >= 17 points per interval including both ends. Throws ResolutionError
/// otherwise, EvaluationError on non-finite forcing samples.
ParticularSolution solve_particular(const SectionOperator& section, const CylinderGeometry& geom, Side side,
                                    const ModalForcing& forcing, std::size_t n_x);

/// Solves y'' + mu y = rhs on a uniform grid with y = 0 at both ends (rhs
/// holds all n nodes; end entries ignored). mu must be negative.
Vector dirichlet_helmholtz(const Vector& rhs, double h, double mu);

/// Fourth-order first derivative of nodal samples (n >= 5).
Vector derivative4(const Vector& y, double h);

}  // namespace biharm
