#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biharm/errors.hpp"
#include "biharm/scalar_symbols.hpp"

namespace biharm {
namespace {

// Reference values evaluated independently in 30-digit arithmetic.
constexpr double kU1 = 0.128905834420503;
constexpr double kV1 = 1.60042359910627;
constexpr double kF1 = 14.7648706852362;
constexpr double kF2 = 7.24799608131228;
constexpr double kF3 = 4.26887852261162;
constexpr double kG = 10.4959921626246;
constexpr double kF = 252.117757429371;
constexpr double kFTilde = 0.0285439148549143;

TEST(ScalarSymbols, UVAtOne) {
    EXPECT_NEAR(u_delta(1.0, 1.0), kU1, 1e-14);
    EXPECT_NEAR(v_delta(1.0, 1.0), kV1, 1e-14);
    EXPECT_NEAR(u_delta(1.0, 1.0), 1.0 - std::exp(-2.0) - 2.0 * std::exp(-1.0), 1e-15);
}

TEST(ScalarSymbols, UVanishesAtOrigin) {
    EXPECT_LT(std::abs(u_delta(1.0, 1e-30)), 1e-14);
    EXPECT_GE(u_delta(1.0, 1e-30), 0.0);
}

TEST(ScalarSymbols, ComplexMatchesReal) {
    const Complex u = u_delta(1.0, Complex(1.0, 0.0));
    EXPECT_NEAR(u.real(), kU1, 1e-14);
    EXPECT_NEAR(u.imag(), 0.0, 1e-15);
    const Complex v = v_delta(0.7, Complex(2.0, 0.0));
    EXPECT_NEAR(v.real(), v_delta(0.7, 2.0), 1e-14);
}

TEST(ScalarSymbols, BranchCutRejected) {
    EXPECT_THROW(u_delta(1.0, Complex(-1.0, 0.0)), DomainError);
    EXPECT_THROW(v_delta(1.0, Complex(0.0, 0.0)), DomainError);
    EXPECT_THROW(u_delta(1.0, -1.0), DomainError);
    EXPECT_NO_THROW(u_delta(1.0, Complex(-1.0, 0.5)));
}

TEST(ScalarSymbols, ComponentsAtOne) {
    const auto c = f_components(1.0, 1.0);
    EXPECT_NEAR(c.f1, kF1, 1e-12);
    EXPECT_NEAR(c.f2, kF2, 1e-12);
    EXPECT_NEAR(c.f3, kF3, 1e-12);
    EXPECT_NEAR(c.g, kG, 1e-12);
    EXPECT_NEAR(c.f1 * c.f3 - c.f2 * c.f2, c.g, 1e-11);
}

TEST(ScalarSymbols, ComponentsLargeArgument) {
    // Each f_i carries a u^{-1} and a v^{-1} term, both tending to 1.
    const auto c = f_components(1.0, 1e4);
    EXPECT_NEAR(c.f1, 2.0, 1e-12);
    EXPECT_NEAR(c.f2, 2.0, 1e-12);
    EXPECT_NEAR(c.f3, 2.0, 1e-12);
    EXPECT_LT(c.g, 1e-80);
}

TEST(ScalarSymbols, TotalAtOne) {
    const SymbolContext ctx{1.0, 1.0, 1.0, 1.0};
    EXPECT_NEAR(f_total(ctx, 1.0), kF, 1e-10);
    EXPECT_NEAR(f_total(ctx, 1.0), 2.0 * kG + 2.0 * kF1 * kF3 + 2.0 * kF2 * kF2, 1e-10);
}

TEST(ScalarSymbols, TotalLimit) {
    const SymbolContext ctx{0.5, 2.0, 3.0, 0.25};
    EXPECT_NEAR(f_total(ctx, 1e6), 16.0 * 3.0 * 0.25, 1e-10);
}

TEST(ScalarSymbols, TildeValues) {
    const SymbolContext ctx{1.0, 1.0, 1.0, 1.0};
    EXPECT_NEAR(f_tilde(ctx, 1.0), kFTilde, 1e-14);
    EXPECT_NEAR(f_tilde(ctx, 200.0) - 1.0, -8.34644308861631e-10, 2e-15);
    EXPECT_LT(std::abs(f_tilde(ctx, 200.0) - 1.0), 1e-6);
}

TEST(ScalarSymbols, TildeQuotientIdentity) {
    const SymbolContext ctx{0.8, 1.7, 2.0, 0.5};
    for (const double x : {0.01, 0.3, 2.0, 40.0}) {
        const double uc = u_delta(ctx.c, x);
        const double ud = u_delta(ctx.d, x);
        const double vc = v_delta(ctx.c, x);
        const double vd = v_delta(ctx.d, x);
        const double w = uc * ud * vc * vd;
        const double expected = f_total(ctx, x) * w * w / (16.0 * ctx.k_plus * ctx.k_minus);
        EXPECT_NEAR(f_tilde(ctx, x), expected, 1e-12 * std::abs(expected));
    }
}

TEST(ScalarSymbols, TildeDecayIsEventuallyMonotone) {
    const SymbolContext ctx;
    const std::vector<double> grid = log_grid(50.0, 1e4, 40);
    double prev = std::abs(1.0 - f_tilde(ctx, grid.front()));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = std::abs(1.0 - f_tilde(ctx, grid[i]));
        EXPECT_LE(cur, prev + 1e-15);
        prev = cur;
    }
}

TEST(ScalarSymbols, DeterminantIdentityRandom) {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> log_delta(-2.0, 1.0);
    std::uniform_real_distribution<double> log_x(-4.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double delta = std::pow(10.0, log_delta(rng));
        const double x = std::pow(10.0, log_x(rng));
        const auto c = f_components(delta, x);
        EXPECT_NEAR(c.f1 * c.f3 - c.f2 * c.f2, c.g, 1e-10 * std::max(1.0, std::abs(c.g)))
            << "delta=" << delta << " x=" << x;
        EXPECT_GT(c.f1, 0.0);
        EXPECT_GT(c.f2, 0.0);
        EXPECT_GT(c.f3, 0.0);
        EXPECT_GT(c.g, 0.0);
    }
}

TEST(ScalarSymbols, PositivityOnLogGrid) {
    const std::vector<double> grid = log_grid(1e-6, 1e6, 121);
    ASSERT_EQ(grid.size(), 121u);
    EXPECT_DOUBLE_EQ(grid.front(), 1e-6);
    EXPECT_NEAR(grid.back(), 1e6, 1e-6);
    for (const SymbolContext ctx : {SymbolContext{}, SymbolContext{2.0, 3.0, 0.1, 5.0},
                                    SymbolContext{100.0, 1.0, 1.0, 1e4}, SymbolContext{0.01, 1.0, 1e4, 1.0}}) {
        const PositivityScan scan = positivity_scan(ctx, grid);
        EXPECT_TRUE(scan.all_positive);
        EXPECT_GT(scan.min, 0.0);
        EXPECT_EQ(scan.grid_size, 121u);
        for (const double x : grid) {
            EXPECT_GT(u_delta(ctx.c, x), 0.0);
            EXPECT_GT(v_delta(ctx.c, x), 0.0);
            EXPECT_GT(f_tilde(ctx, x), 0.0);
        }
    }
}

TEST(ScalarSymbols, ScanPreconditions) {
    const SymbolContext ctx;
    EXPECT_THROW(positivity_scan(ctx, std::vector<double>{}), PreconditionError);
    EXPECT_THROW(positivity_scan(ctx, std::vector<double>{1.0, -1.0}), PreconditionError);
    EXPECT_THROW(f_total(SymbolContext{-1.0, 1.0, 1.0, 1.0}, 1.0), PreconditionError);
}

}  // namespace
}  // namespace biharm
