#include "biharm/problem.hpp"

#include <cmath>
#include <sstream>

namespace biharm {

namespace {
constexpr double kMinInterval = 1e-8;
}

CylinderGeometry CylinderGeometry::make(double a, double gamma, double b) {
    if (!std::isfinite(a) || !std::isfinite(gamma) || !std::isfinite(b) || !(a < gamma) || !(gamma < b)) {
        std::ostringstream msg;
        msg << "geometry requires a < gamma < b, got (" << a << ", " << gamma << ", " << b << ")";
        throw InvalidGeometry(msg.str());
    }
    if (gamma - a < kMinInterval || b - gamma < kMinInterval) {
        throw InvalidGeometry("geometry pieces shorter than 1e-8 are rejected");
    }
    return CylinderGeometry{a, gamma, b};
}

Diffusivities Diffusivities::make(double k_minus, double k_plus) {
    if (!(k_minus > 0.0) || !(k_plus > 0.0) || !std::isfinite(k_minus) || !std::isfinite(k_plus)) {
        throw PreconditionError("diffusivities k- and k+ must be positive");
    }
    return Diffusivities{k_minus, k_plus};
}

BoundaryData BoundaryData::zero(std::ptrdiff_t m) {
    return BoundaryData{Vector::Zero(m), Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
}

void BoundaryData::validate(std::ptrdiff_t m) const {
    require_same_size(phi1_minus, m, "phi1-");
    require_same_size(phi2_minus, m, "phi2-");
    require_same_size(phi1_plus, m, "phi1+");
    require_same_size(phi2_plus, m, "phi2+");
    if (!phi1_minus.allFinite() || !phi2_minus.allFinite() || !phi1_plus.allFinite() || !phi2_plus.allFinite()) {
        throw InputError("boundary data must be finite");
    }
}

}  // namespace biharm
