#include "biharm/scalar_symbols.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "biharm/errors.hpp"

namespace biharm {

namespace {

bool finite(double x) { return std::isfinite(x); }
bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
double magnitude(double x) { return std::abs(x); }
double magnitude(const Complex& z) { return std::abs(z); }

template <typename T>
T principal_sqrt(T z);

template <>
double principal_sqrt<double>(double z) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        std::ostringstream msg;
        msg << "symbol argument " << z << " is not in (0, inf)";
        throw DomainError(msg.str());
    }
    return std::sqrt(z);
}

template <>
Complex principal_sqrt<Complex>(Complex z) {
    if (!finite(z) || (z.imag() == 0.0 && z.real() <= 0.0)) {
        std::ostringstream msg;
        msg << "symbol argument " << z << " lies on the branch cut (-inf, 0]";
        throw DomainError(msg.str());
    }
    return std::sqrt(z);
}

// sinh(t) - t without cancellation for small |t|.
template <typename T>
T sinh_minus_identity(T t) {
    if (magnitude(t) < 0.5) {
        const T t2 = t * t;
        T term = t * t2 / 6.0;
        T sum = term;
        for (int k = 2; k <= 10; ++k) {
            term *= t2 / (static_cast<double>(2 * k) * static_cast<double>(2 * k + 1));
            sum += term;
        }
        return sum;
    }
    return std::sinh(t) - t;
}

void check_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw PreconditionError("symbol length delta must be positive");
    }
}

template <typename T>
T u_impl(double delta, T z) {
    check_delta(delta);
    const T t = delta * principal_sqrt(z);
    if (magnitude(t) < 0.5) {
        return 2.0 * std::exp(-t) * sinh_minus_identity(t);
    }
    const T e = std::exp(-t);
    return 1.0 - e * e - 2.0 * t * e;
}

template <typename T>
T v_impl(double delta, T z) {
    check_delta(delta);
    const T t = delta * principal_sqrt(z);
    if (magnitude(t) < 0.5) {
        return 2.0 * std::exp(-t) * (std::sinh(t) + t);
    }
    const T e = std::exp(-t);
    return 1.0 - e * e + 2.0 * t * e;
}

template <typename T>
SymbolComponents<T> components_impl(double delta, T z) {
    const T u = u_impl(delta, z);
    const T v = v_impl(delta, z);
    if (magnitude(u) == 0.0 || magnitude(v) == 0.0) {
        throw EvaluationError("u_delta or v_delta vanishes; the argument is outside the closed right half-plane");
    }
    const T e = std::exp(-delta * principal_sqrt(z));
    const T iu = 1.0 / u;
    const T iv = 1.0 / v;
    const T plus2 = (1.0 + e) * (1.0 + e);
    const T minus2 = (1.0 - e) * (1.0 - e);
    SymbolComponents<T> out{
        iu * plus2 + iv * minus2,
        (iu + iv) * (1.0 - e * e),
        iu * minus2 + iv * plus2,
        16.0 * iu * iv * e * e,
    };
    if (!finite(out.f1) || !finite(out.f2) || !finite(out.f3) || !finite(out.g)) {
        throw EvaluationError("symbol components overflow near z = 0");
    }
    return out;
}

template <typename T>
T f_total_impl(const SymbolContext& ctx, T z) {
    ctx.validate();
    const auto fd = components_impl(ctx.d, z);
    const auto fc = components_impl(ctx.c, z);
    const double kp = ctx.k_plus;
    const double km = ctx.k_minus;
    return kp * kp * fd.g + km * km * fc.g + kp * km * (fd.f1 * fc.f3 + fc.f1 * fd.f3 + 2.0 * fd.f2 * fc.f2);
}

template <typename T>
T f_tilde_impl(const SymbolContext& ctx, T z) {
    const T f = f_total_impl(ctx, z);
    const T w = u_impl(ctx.c, z) * u_impl(ctx.d, z) * v_impl(ctx.c, z) * v_impl(ctx.d, z);
    return f * w * w / (16.0 * ctx.k_plus * ctx.k_minus);
}

}  // namespace

void SymbolContext::validate() const {
    const auto ok = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!ok(c) || !ok(d) || !ok(k_minus) || !ok(k_plus)) {
        throw PreconditionError("symbol context requires c, d, k-, k+ > 0");
    }
}

double u_delta(double delta, double z) { return u_impl(delta, z); }
double v_delta(double delta, double z) { return v_impl(delta, z); }
Complex u_delta(double delta, Complex z) { return u_impl(delta, z); }
Complex v_delta(double delta, Complex z) { return v_impl(delta, z); }

SymbolComponents<double> f_components(double delta, double z) { return components_impl(delta, z); }
SymbolComponents<Complex> f_components(double delta, Complex z) { return components_impl(delta, z); }

double f_total(const SymbolContext& ctx, double z) { return f_total_impl(ctx, z); }
Complex f_total(const SymbolContext& ctx, Complex z) { return f_total_impl(ctx, z); }

double f_tilde(const SymbolContext& ctx, double z) { return f_tilde_impl(ctx, z); }
Complex f_tilde(const SymbolContext& ctx, Complex z) { return f_tilde_impl(ctx, z); }

PositivityScan positivity_scan(const SymbolContext& ctx, std::span<const double> grid) {
    if (grid.empty()) {
        throw PreconditionError("positivity scan needs a nonempty grid");
    }
    PositivityScan scan;
    scan.grid_size = grid.size();
    scan.min = std::numeric_limits<double>::infinity();
    for (const double x : grid) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw PreconditionError("positivity scan grid points must be positive");
        }
        const double value = f_total(ctx, x);
        if (value < scan.min) {
            scan.min = value;
            scan.argmin = x;
        }
    }
    scan.all_positive = scan.min > 0.0;
    return scan;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) {
        throw PreconditionError("log grid needs 0 < lo <= hi and n >= 1");
    }
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double l0 = std::log10(lo);
    const double l1 = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace biharm
