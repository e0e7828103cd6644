#pragma once

#include <string>

#include "biharm/linalg.hpp"

namespace biharm {

/// Which piece of the cylinder: minus = (a, gamma), plus = (gamma, b).
enum class Side { minus, plus };

inline const char* to_string(Side s) { return s == Side::minus ? "minus" : "plus"; }

/// Omega- = (a, gamma) x omega, Omega+ = (gamma, b) x omega.
struct CylinderGeometry {
    double a = 0.0;
    double gamma = 0.5;
    double b = 1.0;

    /// Validating constructor; rejects a >= gamma, gamma >= b and pieces shorter than 1e-8.
    static CylinderGeometry make(double a, double gamma, double b);

    double c() const { return gamma - a; }
    double d() const { return b - gamma; }
    double left(Side s) const { return s == Side::minus ? a : gamma; }
    double right(Side s) const { return s == Side::minus ? gamma : b; }
    double length(Side s) const { return right(s) - left(s); }
    bool contains(Side s, double x) const { return x >= left(s) && x <= right(s); }
};

/// Diffusivities k- and k+ of the two pieces.
struct Diffusivities {
    double k_minus = 1.0;
    double k_plus = 1.0;

    static Diffusivities make(double k_minus, double k_plus);
    double of(Side s) const { return s == Side::minus ? k_minus : k_plus; }
};

/// u-(a) = phi1-, u-'(a) = phi2-, u+(b) = phi1+, u+'(b) = phi2+ (section vectors).
struct BoundaryData {
    Vector phi1_minus;
    Vector phi2_minus;
    Vector phi1_plus;
    Vector phi2_plus;

    static BoundaryData zero(std::ptrdiff_t m);
    void validate(std::ptrdiff_t m) const;
};

}  // namespace biharm
