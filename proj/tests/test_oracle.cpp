#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "biharm/exact_cases.hpp"
#include "biharm/oracle.hpp"

namespace biharm {
namespace {

std::shared_ptr<const GeneratorM> laplacian(std::size_t m) {
    return std::make_shared<const GeneratorM>(SectionOperator::dirichlet_laplacian_1d(m, 1.0));
}

TEST(ExactCases, ScalarHomogeneous) {
    const auto gen = std::make_shared<const GeneratorM>(
        SectionOperator::from_matrix(Matrix::Constant(1, 1, -std::numbers::pi * std::numbers::pi)));
    const auto geom = CylinderGeometry::make(-0.5, 0.0, 0.5);
    const ExactCase e = manufactured_homogeneous(gen, geom, Diffusivities::make(1.0, 2.0), 0, 1.0, 0.0);
    EXPECT_NEAR(e.psi1(0), 1.0, 1e-15);
    EXPECT_NEAR(e.psi2(0), std::numbers::pi, 1e-14);
    EXPECT_NEAR(e.value(Side::plus, 0.3)(0), std::exp(std::numbers::pi * 0.3), 1e-13);
    EXPECT_TRUE(e.zero_forcing());
    EXPECT_NEAR(e.bc.phi1_minus(0), std::exp(-std::numbers::pi * 0.5), 1e-15);

    const ExactCase c = manufactured_homogeneous(gen, geom, Diffusivities::make(1.0, 2.0), 0, 0.5, 0.5);
    EXPECT_NEAR(c.psi2(0), 0.0, 1e-15);
    EXPECT_NEAR(c.value(Side::minus, -0.2)(0), std::cosh(std::numbers::pi * 0.2), 1e-14);
}

TEST(ExactCases, HomogeneousSatisfiesTransmission) {
    const auto gen = laplacian(4);
    const auto geom = CylinderGeometry::make(-0.5, 0.0, 0.7);
    const Diffusivities k = Diffusivities::make(1.0, 5.0);
    const ExactCase e = manufactured_homogeneous(gen, geom, k, {{3, 1.0, -0.4}, {2, 0.3, 0.6}});
    const Matrix& A = gen->section().matrix();
    for (int order = 0; order <= 1; ++order) {
        const Vector flux_m = k.k_minus * (e.field(Side::minus, order + 2, 0.0) + A * e.field(Side::minus, order, 0.0));
        const Vector flux_p = k.k_plus * (e.field(Side::plus, order + 2, 0.0) + A * e.field(Side::plus, order, 0.0));
        EXPECT_LT(flux_m.norm(), 1e-10);
        EXPECT_LT(flux_p.norm(), 1e-10);
    }
}

TEST(ExactCases, InvalidInput) {
    const auto gen = laplacian(3);
    const auto geom = CylinderGeometry::make(0.0, 0.5, 1.0);
    const Diffusivities k;
    EXPECT_THROW(manufactured_homogeneous(gen, geom, k, 3, 1.0, 0.0), PreconditionError);
    EXPECT_THROW(manufactured_homogeneous(gen, geom, k, 0, 0.0, 0.0), PreconditionError);
    EXPECT_THROW(manufactured_forced(gen, geom, k, 0, std::vector<double>(8, 1.0)), PreconditionError);
    EXPECT_THROW(manufactured_forced(gen, geom, k, 5, {1.0}), PreconditionError);
}

TEST(ExactCases, ForcedConstantProfile) {
    const auto gen = std::make_shared<const GeneratorM>(SectionOperator::from_matrix(Matrix::Constant(1, 1, -1.0)));
    const auto geom = CylinderGeometry::make(-1.0, 0.0, 1.0);
    const ExactCase e = manufactured_forced(gen, geom, Diffusivities::make(1.0, 2.0), 0, {1.0});
    for (const double x : {-0.9, -0.3}) {
        EXPECT_NEAR(e.value(Side::minus, x)(0), -2.0 * (1.0 - std::cosh(x)), 1e-13);
    }
    for (const double x : {0.2, 1.0}) {
        EXPECT_NEAR(e.value(Side::plus, x)(0), -(1.0 - std::cosh(x)), 1e-13);
    }
    EXPECT_NEAR(e.forcing(Side::minus, 0, -0.5), -2.0, 1e-14);
    EXPECT_NEAR(e.forcing(Side::plus, 0, 0.5), -1.0, 1e-14);
    EXPECT_FALSE(e.zero_forcing());
}

TEST(ExactCases, ZeroProfileIsZeroCase) {
    const auto gen = laplacian(2);
    const ExactCase e =
        manufactured_forced(gen, CylinderGeometry::make(0.0, 0.5, 1.0), Diffusivities::make(1.0, 2.0), 1, {0.0});
    EXPECT_EQ(e.value(Side::minus, 0.2).norm(), 0.0);
    EXPECT_EQ(e.bc.phi1_plus.norm(), 0.0);
}

TEST(Oracle, ZeroDataGivesZero) {
    const auto gen = laplacian(3);
    const auto geom = CylinderGeometry::make(0.0, 0.5, 1.0);
    const OracleSolution o = direct_solve(gen->section(), geom, Diffusivities::make(1.0, 2.0), ModalForcing::zero(),
                                          BoundaryData::zero(3), 33);
    EXPECT_EQ(o.nodes(Side::minus).norm(), 0.0);
    EXPECT_EQ(o.nodes(Side::plus).norm(), 0.0);
    EXPECT_THROW(direct_solve(gen->section(), geom, Diffusivities{}, ModalForcing::zero(), BoundaryData::zero(3), 32),
                 ResolutionError);
}

TEST(Oracle, SolveResidualSmall) {
    const auto gen = laplacian(4);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    const ExactCase e = manufactured_homogeneous(gen, geom, Diffusivities::make(1.0, 3.0), 3, 1.0, 0.5);
    const OracleSolution o = direct_solve(gen->section(), geom, e.k, e.forcing, e.bc, 129);
    EXPECT_LT(o.solve_residual(), 1e-12);
}

TEST(Oracle, DirectSecondOrderOnHomogeneousCase) {
    const auto gen = laplacian(8);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    const ExactCase e = manufactured_homogeneous(gen, geom, Diffusivities::make(1.0, 3.0),
                                                 {{7, 1.0, 0.5}, {6, -0.3, 0.2}, {5, 0.1, 0.4}});
    const ConvergenceTable t = convergence_study(e, Method::direct, {65, 129, 257});
    EXPECT_FALSE(t.floor);
    EXPECT_NEAR(t.fitted_rate, 2.0, 0.2);
}

TEST(Oracle, RepresentationHitsFloorOnHomogeneousCase) {
    const auto gen = laplacian(8);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    const ExactCase e = manufactured_homogeneous(gen, geom, Diffusivities::make(1.0, 3.0), 7, 1.0, 0.5);
    const ConvergenceTable t = convergence_study(e, Method::representation, {65, 129, 257});
    EXPECT_TRUE(t.floor);
    EXPECT_TRUE(std::isnan(t.fitted_rate));
    for (const RateRow& r : t.rows) {
        EXPECT_LE(r.error, 1e-9);
    }
}

TEST(Oracle, ForcedCaseRates) {
    const auto gen = laplacian(8);
    const auto geom = CylinderGeometry::make(-0.7, 0.0, 1.3);
    const ExactCase e = manufactured_forced(gen, geom, Diffusivities::make(1.0, 3.0), 7, {1.0, 0.5, -2.0, 0.0, 1.0},
                                            0.3, -0.4);
    const ConvergenceTable rep = convergence_study(e, Method::representation, {65, 129, 257});
    EXPECT_FALSE(rep.floor);
    EXPECT_GE(rep.fitted_rate, 2.0);
    const ConvergenceTable dir = convergence_study(e, Method::direct, {65, 129, 257});
    EXPECT_NEAR(dir.fitted_rate, 2.0, 0.2);
}

TEST(Oracle, RepresentationAndDirectConverge) {
    const auto gen = laplacian(6);
    const auto geom = CylinderGeometry::make(-0.5, 0.0, 0.8);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BoundaryData bc = BoundaryData::zero(6);
    for (Vector* v : {&bc.phi1_minus, &bc.phi2_minus, &bc.phi1_plus, &bc.phi2_plus}) {
        for (auto& x : *v) {
            x = u(rng);
        }
    }
    const Diffusivities k = Diffusivities::make(2.0, 1.0);
    const ModalForcing forcing = ModalForcing::sine(gen->section(), geom, true, true, 1);
    const TransmissionSolution sol = solve_transmission({gen, geom, k, forcing, bc});
    const double g1 =
        compare(field_of(sol), field_of(direct_solve(gen->section(), geom, k, forcing, bc, 65)), geom).relative_sup;
    const double g2 =
        compare(field_of(sol), field_of(direct_solve(gen->section(), geom, k, forcing, bc, 129)), geom).relative_sup;
    EXPECT_GT(std::log2(g1 / g2), 1.8);
}

TEST(Compare, IdenticalIsZero) {
    const auto gen = laplacian(3);
    const auto geom = CylinderGeometry::make(0.0, 0.5, 1.0);
    const ExactCase e = manufactured_homogeneous(gen, geom, Diffusivities{}, 1, 1.0, 0.0);
    const ErrorMetrics m = compare(field_of(e), field_of(e), geom);
    EXPECT_EQ(m.sup, 0.0);
    EXPECT_EQ(m.scaled_l2, 0.0);
    EXPECT_THROW(compare(field_of(e), field_of(e), geom, 1), PreconditionError);
}

TEST(ConvergenceTable, RatesAndCsv) {
    const ConvergenceTable t = convergence_table({65, 129, 257}, {1e-3, 2.5e-4, 6.25e-5});
    EXPECT_NEAR(t.fitted_rate, 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(t.rows[0].rate));
    EXPECT_NEAR(t.rows[2].rate, 2.0, 1e-12);
    const std::string csv = t.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n_x,error,rate");
    EXPECT_THROW(convergence_table({65, 129}, {1e-3, 1e-4}), PreconditionError);
    EXPECT_THROW(convergence_table({65, 129, 100}, {1e-3, 1e-4, 1e-5}), PreconditionError);
    const ConvergenceTable f = convergence_table({65, 129, 257}, {1e-12, 2e-12, 1e-12});
    EXPECT_TRUE(f.floor);
}

TEST(Method, Parsing) {
    EXPECT_EQ(parse_method("direct"), Method::direct);
    EXPECT_EQ(parse_method("representation"), Method::representation);
    EXPECT_THROW(parse_method("fem"), InputError);
}

}  // namespace
}  // namespace biharm
