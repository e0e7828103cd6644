#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace biharm {

using Complex = std::complex<double>;

/// Interval lengths and diffusivities entering the determinant symbol.
/// c = gamma - a, d = b - gamma.
struct SymbolContext {
    double c = 1.0;
    double d = 1.0;
    double k_minus = 1.0;
    double k_plus = 1.0;

    /// Throws PreconditionError unless all four are finite and positive.
    void validate() const;
};

// Scalar symbols on C \ (-inf, 0] with the principal square root:
//   u_delta(z) = 1 - e^{-2 delta sqrt z} - 2 delta sqrt z e^{-delta sqrt z}
//   v_delta(z) = 1 - e^{-2 delta sqrt z} + 2 delta sqrt z e^{-delta sqrt z}
// Real overloads require z > 0, complex overloads reject the cut with DomainError.

double u_delta(double delta, double z);
double v_delta(double delta, double z);
Complex u_delta(double delta, Complex z);
Complex v_delta(double delta, Complex z);

template <typename T>
struct SymbolComponents {
    T f1;
    T f2;
    T f3;
    T g;
};

/// f_{delta,1..3} and g_delta. U+ = u_d(-A) etc, so P_i^+ = k+ f_{d,i}(-A).
SymbolComponents<double> f_components(double delta, double z);
SymbolComponents<Complex> f_components(double delta, Complex z);

/// f(z) = k+^2 g_d + k-^2 g_c + k+ k- (f_{d,1} f_{c,3} + f_{c,1} f_{d,3} + 2 f_{d,2} f_{c,2}).
/// det(Lambda) = -M f(-A).
double f_total(const SymbolContext& ctx, double z);
Complex f_total(const SymbolContext& ctx, Complex z);

/// f_tilde from f(z) = 16 k+ k- (u_d u_c v_d v_c)^{-2}(z) f_tilde(z); tends to 1 at infinity.
double f_tilde(const SymbolContext& ctx, double z);
Complex f_tilde(const SymbolContext& ctx, Complex z);

struct PositivityScan {
    double min = 0.0;
    double argmin = 0.0;
    std::size_t grid_size = 0;
    bool all_positive = false;
};

/// Evaluates f_total on every grid point. Throws PreconditionError on an empty
/// grid or a nonpositive point.
PositivityScan positivity_scan(const SymbolContext& ctx, std::span<const double> grid);

/// n points log-spaced from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace biharm
