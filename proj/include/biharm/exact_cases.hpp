#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "biharm/linalg.hpp"
#include "biharm/modal_forcing.hpp"
#include "biharm/problem.hpp"
#include "biharm/section_operator.hpp"
#include "biharm/transmission.hpp"

namespace biharm {

/// A transmission problem together with its closed-form solution.
struct ExactCase {
    std::string name;
    std::shared_ptr<const GeneratorM> generator;
    CylinderGeometry geom;
    Diffusivities k;
    ModalForcing forcing = ModalForcing::zero();
    BoundaryData bc;
    /// Exact interface data u(gamma), u'(gamma).
    Vector psi1;
    Vector psi2;
    /// u^(order)(x) on the given side, order 0..3.
    std::function<Vector(Side, int, double)> field;

    bool zero_forcing() const { return forcing.is_zero(); }
    Vector value(Side side, double x) const { return field(side, 0, x); }
    TransmissionProblem problem() const;
};

/// One term (A1 e^{s_j (x - gamma)} + A2 e^{-s_j (x - gamma)}) q_j with s_j = sqrt(-mu_j).
struct HomogeneousTerm {
    std::size_t mode = 0;
    double A1 = 1.0;
    double A2 = 0.0;
};

/// The same expression on both sides; u'' = -A u, so (EQ) holds with f = 0 and
/// both flux conditions vanish identically for any k+-.
/// Throws PreconditionError for an invalid mode or a term with A1 = A2 = 0.
ExactCase manufactured_homogeneous(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                   const Diffusivities& k, const std::vector<HomogeneousTerm>& terms);
ExactCase manufactured_homogeneous(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                   const Diffusivities& k, std::size_t mode, double A1, double A2);

/// Forced case on mode j with polynomial profile r(t) = sum r_i t^i, t = x - gamma,
/// degree at most 6. w- = k+ r, w+ = k- r; u+- solves u'' + mu_j u = w+- with
/// u(gamma) = U0, u'(gamma) = U1 on both sides; f+- = w+-'' + mu_j w+-.
ExactCase manufactured_forced(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                              const Diffusivities& k, std::size_t mode, const std::vector<double>& profile,
                              double U0 = 0.0, double U1 = 0.0);

}  // namespace biharm
