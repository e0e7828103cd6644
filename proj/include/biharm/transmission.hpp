#pragma once

#include <memory>
#include <optional>
#include <string>

#include "biharm/linalg.hpp"
#include "biharm/modal_forcing.hpp"
#include "biharm/particular_solution.hpp"
#include "biharm/problem.hpp"
#include "biharm/residual_report.hpp"
#include "biharm/section_operator.hpp"
#include "biharm/subproblem.hpp"

namespace biharm {

/// U-, V- (delta = c) and U+, V+ (delta = d):
///   U = I - e^{2 delta M} + 2 delta M e^{delta M},  V = I - e^{2 delta M} - 2 delta M e^{delta M}.
struct UVBlocks {
    OperatorMatrix U_minus, U_plus, V_minus, V_plus;
    Matrix U_minus_inv, U_plus_inv, V_minus_inv, V_plus_inv;
    OperatorMatrix E_c, E_d;
    double cond_U_minus = 0.0, cond_U_plus = 0.0, cond_V_minus = 0.0, cond_V_plus = 0.0;
    /// True when some mode had delta |m_j| < 0.5 and the stable scalar
    /// evaluation replaced the semigroup formula.
    bool stabilized = false;
};

/// Builds U+-, V+- from the semigroup and inverts them. Throws Anomaly when a
/// factorization is numerically singular.
UVBlocks assemble_UV(const GeneratorM& M, const CylinderGeometry& geom);

/// P1 = k(U^{-1}(I+E)^2 + V^{-1}(I-E)^2), P2 = k(U^{-1}+V^{-1})(I-E^2),
/// P3 = k(U^{-1}(I-E)^2 + V^{-1}(I+E)^2) on each side.
struct PBlocks {
    OperatorMatrix P1_minus, P2_minus, P3_minus;
    OperatorMatrix P1_plus, P2_plus, P3_plus;
};

PBlocks assemble_P(const Diffusivities& k, const UVBlocks& uv);

/// Everything the interface system needs, assembled once per (A, geometry, k).
struct TransmissionOperators {
    std::shared_ptr<const GeneratorM> generator;
    CylinderGeometry geom;
    Diffusivities k;
    UVBlocks uv;
    PBlocks p;
    /// [[M(P1+ + P1-), -(P2+ - P2-)], [M(P2+ - P2-), -(P3+ + P3-)]]
    Matrix Lambda;
    /// W = U+ U- V+ V-
    Matrix W;
    /// f-tilde(-A)
    Matrix F_op;
    /// -m_j f(-mu_j) from the scalar symbols, eigenbasis order.
    Vector det_modes;
    double cond_Lambda = 0.0;

    SideOperators side(Side s) const;
    const Matrix& M() const { return generator->matrix(); }
    std::size_t dimension() const { return generator->dimension(); }
};

TransmissionOperators assemble_operators(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                         const Diffusivities& k);

/// Which source term S1 carries. `printed` uses -M^{-2} S-check and is the one
/// that satisfies the original flux condition; `half` (+1/2 M^{-2} S-check) is
/// kept for diagnostics only.
enum class SourceConvention { printed, half };

struct InterfaceSources {
    Vector S1;
    Vector S2;
    Vector S_check;
};

/// S-check = -k+ F+'''(gamma) + k+ M^2 F+'(gamma) + k- F-'''(gamma) - k- M^2 F-'(gamma);
/// S1, S2 from phi-tilde_2, phi-tilde_4 of both sides.
InterfaceSources assemble_sources(const TransmissionOperators& ops, const Quadruple& phi_tilde_minus,
                                  const Quadruple& phi_tilde_plus, const ParticularSolution& F_minus,
                                  const ParticularSolution& F_plus,
                                  SourceConvention convention = SourceConvention::printed);

struct InterfaceData {
    Vector psi1;
    Vector psi2;
    std::string route;
    /// ||Lambda psi - S|| / (||Lambda|| ||psi|| + ||S||)
    double residual = 0.0;
};

/// Dense LU on the 2m x 2m system. Throws Anomaly if Lambda is singular or the
/// backward error exceeds 1e-10.
InterfaceData solve_interface_block(const TransmissionOperators& ops, const InterfaceSources& src);

/// Per-mode adjugate inversion with det = -m_j f(-mu_j). Throws Anomaly when
/// the blocks fail to commute within 1e-11 or f(-mu_j) <= 0.
InterfaceData solve_interface_calculus(const TransmissionOperators& ops, const InterfaceSources& src);

/// psi1 = M^{-1}((k+ + k-) S1 - (k+ - k-) S2) / (8 k+ k-),
/// psi2 = ((k+ - k-) S1 - (k+ + k-) S2) / (8 k+ k-).
InterfaceData leading_order_interface(const InterfaceSources& src, const GeneratorM& M, const Diffusivities& k);

/// ||(psi1, psi2)_a - (psi1, psi2)_b|| / max(||(psi1, psi2)_a||, tiny); 0 when both vanish.
double interface_gap(const InterfaceData& a, const InterfaceData& b);

/// Identity checks on assembled operators. Each is a relative gap.
struct OperatorDiagnostics {
    double max_commutator = 0.0;
    /// U+-, V+-, P_i+- against apply_function with the scalar symbols.
    double spectral_mapping = 0.0;
    /// P1 P3 - P2^2 = 16 k^2 U^{-1} V^{-1} e^{2 delta M}, worst side.
    double block_identity = 0.0;
    /// Commuting-block determinant against -m_j f(-mu_j).
    double det_gap = 0.0;
    /// det = -16 k+ k- W^{-2} M F.
    double det_factorization = 0.0;
    /// Lambda adj(Lambda) = det I.
    double adjugate = 0.0;
};

OperatorDiagnostics diagnose(const TransmissionOperators& ops);

/// -M(p1 p3 - p2^2) with p1 = P1+ + P1-, p2 = P2+ - P2-, p3 = P3+ + P3-.
Matrix determinant_block(const TransmissionOperators& ops);
/// [[-p3, p2], [-M p2, M p1]]
Matrix adjugate_block(const TransmissionOperators& ops);

enum class Route { block, calculus, both };

Route parse_route(const std::string& name);
const char* to_string(Route r);

struct TransmissionOptions {
    Route route = Route::both;
    std::size_t n_x = 129;
    SourceConvention source_convention = SourceConvention::printed;
    /// Probe points per side for the attached residual report.
    std::size_t probes = 33;
};

struct TransmissionProblem {
    std::shared_ptr<const GeneratorM> generator;
    CylinderGeometry geom;
    Diffusivities k;
    ModalForcing forcing = ModalForcing::zero();
    BoundaryData bc;

    void validate() const;
};

/// Everything computed before the interface solve.
struct PreparedTransmission {
    TransmissionProblem problem;
    TransmissionOptions options;
    std::shared_ptr<const TransmissionOperators> ops;
    std::shared_ptr<const ParticularSolution> F_minus;
    std::shared_ptr<const ParticularSolution> F_plus;
    Quadruple phi_tilde_minus;
    Quadruple phi_tilde_plus;
    InterfaceSources sources;
};

PreparedTransmission prepare(const TransmissionProblem& problem, const TransmissionOptions& options);

struct TransmissionSolution {
    std::shared_ptr<const PreparedTransmission> prepared;
    SubproblemSolution minus;
    SubproblemSolution plus;
    InterfaceData interface;
    /// The other route when both were run.
    std::optional<InterfaceData> alternate;
    double route_gap = 0.0;
    ResidualReport report;

    const CylinderGeometry& geom() const { return prepared->problem.geom; }
    const Diffusivities& k() const { return prepared->problem.k; }
    const TransmissionOperators& ops() const { return *prepared->ops; }
    const SubproblemSolution& side(Side s) const { return s == Side::minus ? minus : plus; }
};

/// Builds alpha+- from interface data. The minus and plus sides may be given
/// different data; (TC1) then fails by exactly their difference.
TransmissionSolution assemble_solution(std::shared_ptr<const PreparedTransmission> prepared,
                                       const InterfaceData& minus_side, const InterfaceData& plus_side);

/// Full pipeline: particular solutions, sources, interface solve, alphas and
/// residual report.
TransmissionSolution solve_transmission(const TransmissionProblem& problem, const TransmissionOptions& options = {});

}  // namespace biharm
