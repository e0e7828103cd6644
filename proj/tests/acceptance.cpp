// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "biharm/exact_cases.hpp"
#include "biharm/oracle.hpp"
#include "biharm/scalar_symbols.hpp"
#include "biharm/transmission.hpp"

namespace {

using namespace biharm;

// Tolerances, one block per criterion.
constexpr double kEigenRel = 1e-10;
constexpr double kSquareRel = 1e-10;
constexpr double kSemigroupLaw = 1e-12;
constexpr double kSymbolAbs = 1e-6;
constexpr double kDetIdentityRel = 1e-10;
constexpr double kSpectralRel = 1e-11;
constexpr double kBlockRel = 1e-10;
constexpr double kRouteRel = 1e-10;
constexpr double kExactSup = 1e-9;
constexpr double kResidual = 1e-9;
constexpr double kMinRate = 2.0 - 0.2;
constexpr double kSymmetryRel = 1e-10;
constexpr double kReflection = 1e-9;
constexpr double kLeadingOrderFinal = 1e-6;
constexpr double kInjection = 1e-12;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) {
                detail += "; ";
            }
            detail += what;
        }
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::shared_ptr<const GeneratorM> laplacian(std::size_t m) {
    return std::make_shared<const GeneratorM>(SectionOperator::dirichlet_laplacian_1d(m, 1.0));
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(m);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

BoundaryData random_bc(std::mt19937_64& rng, Eigen::Index m) {
    return {random_vector(rng, m), random_vector(rng, m), random_vector(rng, m), random_vector(rng, m)};
}

Outcome hypothesis_surrogates() {
    Outcome o;
    double eig = 0.0;
    double square = 0.0;
    double contraction = 0.0;
    double law = 0.0;
    for (const std::size_t m : {1u, 3u, 50u}) {
        const auto gen = laplacian(m);
        const SectionOperator& s = gen->section();
        const double h = 1.0 / static_cast<double>(m + 1);
        for (std::size_t k = 1; k <= m; ++k) {
            const double sn = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(m + 1)));
            const double mu = -4.0 / (h * h) * sn * sn;
            eig = std::max(eig, std::abs(s.eigenvalues()(static_cast<Eigen::Index>(m - k)) - mu) / std::abs(mu));
        }
        square = std::max(square, gen->square_error());
        for (const double t : {0.0, 0.1, 1.0, 10.0}) {
            contraction = std::max(contraction, norm2(gen->semigroup(t).value));
        }
        const Matrix prod = gen->semigroup(0.3).value * gen->semigroup(0.7).value;
        law = std::max(law, norm2(prod - gen->semigroup(1.0).value));
    }
    o.require(eig <= kEigenRel, "eigenvalue gap " + sci(eig));
    o.require(square <= kSquareRel, "||M^2 + A|| / ||A|| = " + sci(square));
    o.require(contraction <= 1.0, "max ||e^{tM}|| = " + sci(contraction));
    o.require(law <= kSemigroupLaw, "semigroup law gap " + sci(law));
    o.detail = o.pass ? "eig " + sci(eig) + ", square " + sci(square) + ", max norm " + sci(contraction) +
                            ", law " + sci(law)
                      : o.detail;
    return o;
}

Outcome scalar_symbols() {
    Outcome o;
    const double u = u_delta(1.0, 1.0);
    const double v = v_delta(1.0, 1.0);
    o.require(std::abs(u - 0.1289058) <= kSymbolAbs, "u_1(1) = " + sci(u));
    o.require(std::abs(v - 1.6004236) <= kSymbolAbs, "v_1(1) = " + sci(v));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> log_delta(-1.0, 1.0);
    std::uniform_real_distribution<double> log_x(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double delta = std::pow(10.0, log_delta(rng));
        const double x = std::pow(10.0, log_x(rng));
        const auto c = f_components(delta, x);
        const double scale = std::max({c.f1 * c.f3, c.f2 * c.f2, c.g});
        worst = std::max(worst, std::abs(c.f1 * c.f3 - c.f2 * c.f2 - c.g) / scale);
    }
    o.require(worst <= kDetIdentityRel, "f1 f3 - f2^2 vs g: " + sci(worst));
    const std::vector<double> grid = log_grid(1e-6, 1e6, 241);
    double min_f = INFINITY;
    for (const SymbolContext ctx : {SymbolContext{1.0, 1.0, 1.0, 1.0}, SymbolContext{2.0, 3.0, 0.1, 5.0},
                                    SymbolContext{1.0, 1.0, 1.0, 1e4}, SymbolContext{100.0, 1.0, 1.0, 1.0},
                                    SymbolContext{100.0, 1.0, 1e-2, 1e2}}) {
        const PositivityScan scan = positivity_scan(ctx, grid);
        o.require(scan.all_positive, "scan min " + sci(scan.min));
        min_f = std::min(min_f, scan.min);
    }
    if (o.pass) {
        o.detail = "identity gap " + sci(worst) + ", min f over 5 sets " + sci(min_f);
    }
    return o;
}

TransmissionOperators standard_operators(std::size_t m) {
    return assemble_operators(laplacian(m), CylinderGeometry::make(-0.7, 0.0, 1.3), Diffusivities::make(1.0, 3.0));
}

Outcome spectral_mapping() {
    Outcome o;
    const OperatorDiagnostics d = diagnose(standard_operators(8));
    o.require(d.spectral_mapping <= kSpectralRel, "spectral mapping gap " + sci(d.spectral_mapping));
    if (o.pass) {
        o.detail = "U, V, P vs scalar symbols " + sci(d.spectral_mapping);
    }
    return o;
}

Outcome determinant_identities() {
    Outcome o;
    const OperatorDiagnostics d = diagnose(standard_operators(8));
    o.require(d.block_identity <= kBlockRel, "block identity " + sci(d.block_identity));
    o.require(d.det_gap <= kBlockRel, "det vs -m f(-mu) " + sci(d.det_gap));
    o.require(d.adjugate <= kBlockRel, "Lambda adj - det I " + sci(d.adjugate));
    if (o.pass) {
        o.detail = "block " + sci(d.block_identity) + ", det " + sci(d.det_gap) + ", adjugate " + sci(d.adjugate);
    }
    return o;
}

Outcome two_routes() {
    Outcome o;
    const auto gen = laplacian(16);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    const Diffusivities k = Diffusivities::make(1.0, 3.0);
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const TransmissionSolution sol =
            solve_transmission({gen, geom, k, ModalForcing::zero(), random_bc(rng, 16)});
        worst = std::max(worst, sol.route_gap);
    }
    o.require(worst <= kRouteRel, "route gap " + sci(worst));
    const auto ops = assemble_operators(gen, geom, k);
    const InterfaceSources zero{Vector::Zero(16), Vector::Zero(16), Vector::Zero(16)};
    const InterfaceData b = solve_interface_block(ops, zero);
    const InterfaceData c = solve_interface_calculus(ops, zero);
    o.require(b.psi1.norm() == 0.0 && b.psi2.norm() == 0.0 && c.psi1.norm() == 0.0 && c.psi2.norm() == 0.0,
              "zero sources gave nonzero psi");
    if (o.pass) {
        o.detail = "max route gap over 10 data sets " + sci(worst);
    }
    return o;
}

Outcome exact_homogeneous() {
    Outcome o;
    const auto gen = laplacian(8);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    // Low-frequency modes with both e^{+s} and e^{-s} branches present.
    const ExactCase e = manufactured_homogeneous(gen, geom, Diffusivities::make(1.0, 3.0),
                                                 {{7, 1.0, 0.5}, {6, -0.3, 0.2}, {5, 0.1, 0.4}});
    const TransmissionSolution sol = solve_transmission(e.problem());
    const double field = compare(field_of(sol), field_of(e), geom, 33).sup;
    const double psi1 = sup_norm(sol.interface.psi1 - e.psi1);
    const double psi2 = sup_norm(sol.interface.psi2 - e.psi2);
    o.require(field <= kExactSup, "field error " + sci(field));
    o.require(psi1 <= kExactSup, "psi1 error " + sci(psi1));
    o.require(psi2 <= kExactSup, "psi2 error " + sci(psi2));
    double worst = 0.0;
    for (const char* key : {"bc_1", "bc_2", "bc_3", "bc_4", "tc1_u", "tc1_du", "tc2_flux2", "tc2_flux3"}) {
        worst = std::max(worst, sol.report.value(key));
    }
    o.require(worst <= kResidual, "BC/TC residual " + sci(worst));
    if (o.pass) {
        o.detail = "field " + sci(field) + ", psi " + sci(std::max(psi1, psi2)) + ", BC/TC " + sci(worst);
    }
    return o;
}

Outcome forced_convergence() {
    Outcome o;
    const auto gen = laplacian(8);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    const ExactCase e = manufactured_forced(gen, geom, Diffusivities::make(1.0, 3.0), 7, {1.0, 0.5, -2.0, 0.0, 1.0},
                                            0.3, -0.4);
    const std::vector<std::size_t> levels{65, 129, 257};
    const ConvergenceTable rep = convergence_study(e, Method::representation, levels);
    const ConvergenceTable dir = convergence_study(e, Method::direct, levels);
    std::vector<double> gaps;
    for (const std::size_t n : levels) {
        TransmissionOptions options;
        options.n_x = n;
        const TransmissionSolution sol = solve_transmission(e.problem(), options);
        const OracleSolution oracle = direct_solve(gen->section(), geom, e.k, e.forcing, e.bc, n);
        gaps.push_back(compare(field_of(sol), field_of(oracle), geom).relative_sup);
    }
    const ConvergenceTable gap = convergence_table(levels, gaps);
    o.require(!rep.floor && rep.fitted_rate >= kMinRate, "representation rate " + sci(rep.fitted_rate));
    o.require(!dir.floor && dir.fitted_rate >= kMinRate, "direct rate " + sci(dir.fitted_rate));
    o.require(!gap.floor && gap.fitted_rate >= kMinRate, "gap rate " + sci(gap.fitted_rate));
    if (o.pass) {
        o.detail = "rates: representation " + sci(rep.fitted_rate) + ", direct " + sci(dir.fitted_rate) +
                   ", gap " + sci(gap.fitted_rate);
    }
    return o;
}

Outcome symmetry() {
    Outcome o;
    const auto gen = laplacian(8);
    const auto geom = CylinderGeometry::make(-0.9, 0.0, 0.9);
    std::mt19937_64 rng(8);
    const Vector phi1 = random_vector(rng, 8);
    const Vector phi2 = random_vector(rng, 8);
    const ModalForcing forcing = ModalForcing::from_function(
        [](Side side, std::size_t mode, double x) {
            const double s = side == Side::minus ? -x : x;
            return std::exp(-s) * (1.0 + 0.2 * static_cast<double>(mode)) + s * s;
        },
        "mirrored");
    const TransmissionSolution sol =
        solve_transmission({gen, geom, Diffusivities::make(2.0, 2.0), forcing, {phi1, phi2, phi1, -phi2}});
    const double ratio = sol.interface.psi2.norm() / sol.interface.psi1.norm();
    o.require(ratio <= kSymmetryRel, "||psi2|| / ||psi1|| = " + sci(ratio));
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
        const double s = 0.9 * (static_cast<double>(i) + 0.5) / 16.0;
        const Vector l = sol.minus.evaluate(0, -s);
        const Vector r = sol.plus.evaluate(0, s);
        worst = std::max(worst, (l - r).norm() / std::max(1.0, l.norm()));
    }
    o.require(worst <= kReflection, "reflection gap " + sci(worst));
    if (o.pass) {
        o.detail = "psi2/psi1 " + sci(ratio) + ", reflection " + sci(worst);
    }
    return o;
}

Outcome leading_order() {
    Outcome o;
    const auto gen = laplacian(3);
    const Diffusivities k = Diffusivities::make(1.0, 3.0);
    std::mt19937_64 rng(9);
    const BoundaryData bc = random_bc(rng, 3);
    std::vector<double> gaps;
    for (const double len : {1.0, 2.0, 4.0, 8.0}) {
        const TransmissionSolution sol =
            solve_transmission({gen, CylinderGeometry::make(-len, 0.0, len), k, ModalForcing::zero(), bc});
        const InterfaceData lo = leading_order_interface(sol.prepared->sources, *gen, k);
        gaps.push_back(interface_gap(sol.interface, lo));
    }
    std::string list;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        list += (i ? ", " : "") + sci(gaps[i]);
        if (i > 0) {
            o.require(gaps[i] < gaps[i - 1], "gap not decreasing at step " + std::to_string(i));
        }
    }
    o.require(gaps.back() <= kLeadingOrderFinal, "gap at c = d = 8 is " + sci(gaps.back()));
    if (o.pass) {
        o.detail = "gaps " + list;
    }
    return o;
}

Outcome zero_case() {
    Outcome o;
    const auto gen = laplacian(6);
    const auto geom = CylinderGeometry::make(-0.5, 0.0, 0.8);
    const Diffusivities k = Diffusivities::make(1.0, 2.0);
    const TransmissionSolution zero = solve_transmission({gen, geom, k, ModalForcing::zero(), BoundaryData::zero(6)});
    double out = 0.0;
    for (const Side s : {Side::minus, Side::plus}) {
        for (int i = 0; i <= 8; ++i) {
            for (int order = 0; order <= 3; ++order) {
                out = std::max(out, zero.side(s).evaluate(order, geom.left(s) + geom.length(s) * i / 8.0).norm());
            }
        }
    }
    double residual = 0.0;
    for (const auto& [key, entry] : zero.report.residuals) {
        // det_gap checks the assembled operators and does not depend on the data.
        if (key != "det_gap") {
            residual = std::max(residual, entry.raw);
        }
    }
    o.require(out == 0.0, "zero problem output " + sci(out));
    o.require(residual == 0.0, "zero problem residual " + sci(residual));

    std::mt19937_64 rng(10);
    const TransmissionSolution sol = solve_transmission({gen, geom, k, ModalForcing::zero(), random_bc(rng, 6)});
    InterfaceData shifted = sol.interface;
    const Vector eps = 1e-4 * random_vector(rng, 6);
    shifted.psi1 += eps;
    const TransmissionSolution bad = assemble_solution(sol.prepared, sol.interface, shifted);
    const double recovered = residual_report(bad).residuals.at("tc1_u").raw;
    const double miss = std::abs(recovered - eps.norm());
    o.require(miss <= kInjection, "injected TC1 residual off by " + sci(miss));
    if (o.pass) {
        o.detail = "zero output exact, injection recovered to " + sci(miss);
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"hypothesis surrogates", hypothesis_surrogates},
        {"scalar symbols", scalar_symbols},
        {"spectral mapping", spectral_mapping},
        {"determinant identities", determinant_identities},
        {"two-route agreement", two_routes},
        {"exact homogeneous reproduction", exact_homogeneous},
        {"forced convergence", forced_convergence},
        {"reflection symmetry", symmetry},
        {"leading-order asymptotics", leading_order},
        {"zero case and injection", zero_case},
    };
    const auto start = std::chrono::steady_clock::now();
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of %zu criteria passed in %.2f s\n", static_cast<int>(criteria.size()) - failures,
                criteria.size(), seconds);
    return failures == 0 ? 0 : 1;
}
