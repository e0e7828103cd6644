#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "biharm/section_operator.hpp"

namespace biharm {
namespace {

TEST(SectionOperator, SingleInteriorPoint) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(1, 1.0);
    ASSERT_EQ(s.dimension(), 1u);
    EXPECT_NEAR(s.eigenvalues()(0), -8.0, 1e-13);
}

TEST(SectionOperator, ThreePointLaplacianSpectrum) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(3, 1.0);
    EXPECT_NEAR(s.eigenvalues()(0), -54.6274169979695, 1e-11);
    EXPECT_NEAR(s.eigenvalues()(1), -32.0, 1e-11);
    EXPECT_NEAR(s.eigenvalues()(2), -9.37258300203048, 1e-11);
}

TEST(SectionOperator, ClosedFormSpectrum) {
    for (const std::size_t m : {1u, 3u, 50u}) {
        const auto s = SectionOperator::dirichlet_laplacian_1d(m, 2.0);
        const double h = 2.0 / static_cast<double>(m + 1);
        for (std::size_t k = 1; k <= m; ++k) {
            const double sn = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(m + 1)));
            const double mu = -4.0 / (h * h) * sn * sn;
            // Ascending order puts the largest k first.
            const double got = s.eigenvalues()(static_cast<Eigen::Index>(m - k));
            EXPECT_NEAR(got, mu, 1e-10 * std::abs(mu)) << "m=" << m << " k=" << k;
        }
    }
}

TEST(SectionOperator, EigenvectorsOrthonormal) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(50, 1.0);
    EXPECT_LT(s.orthogonality_error(), 1e-12);
    EXPECT_LT(s.reconstruction_error(), 1e-10);
    EXPECT_LT(s.eigenvalues().maxCoeff(), 0.0);
}

TEST(SectionOperator, EigenvectorSignConvention) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(6, 1.0);
    for (Eigen::Index j = 0; j < 6; ++j) {
        const Vector q = s.eigenvectors().col(j);
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            if (std::abs(q(i)) > 1e-12) {
                EXPECT_GT(q(i), 0.0);
                break;
            }
        }
    }
}

TEST(SectionOperator, RejectsBadGeometry) {
    EXPECT_THROW(SectionOperator::dirichlet_laplacian_1d(0, 1.0), InvalidGeometry);
    EXPECT_THROW(SectionOperator::dirichlet_laplacian_1d(3, 0.0), InvalidGeometry);
    EXPECT_THROW(SectionOperator::dirichlet_laplacian_1d(3, -1.0), InvalidGeometry);
}

TEST(SectionOperator, FromMatrixScalar) {
    const auto s = SectionOperator::from_matrix(Matrix::Constant(1, 1, -1.0));
    EXPECT_DOUBLE_EQ(s.eigenvalues()(0), -1.0);
}

TEST(SectionOperator, FromMatrixRejectsPositiveEigenvalue) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = 1.0;
    EXPECT_THROW(SectionOperator::from_matrix(a), HypothesisViolation);
}

TEST(SectionOperator, FromMatrixRejectsNearZeroEigenvalue) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -1e-14;
    EXPECT_THROW(SectionOperator::from_matrix(a), HypothesisViolation);
}

TEST(SectionOperator, FromMatrixRejectsAsymmetry) {
    Matrix a(2, 2);
    a << -2.0, 1.0, 0.5, -2.0;
    EXPECT_THROW(SectionOperator::from_matrix(a), SymmetryError);
}

TEST(SectionOperator, DenseReentryMatchesBuilder) {
    const auto built = SectionOperator::dirichlet_laplacian_1d(3, 1.0);
    const auto dense = SectionOperator::from_matrix(built.matrix());
    EXPECT_LT((built.eigenvalues() - dense.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12 * 64.0);
}

TEST(SectionOperator, MatrixTextParsing) {
    const Matrix a = parse_matrix_text("2\n-2 1\n1 -2\n");
    ASSERT_EQ(a.rows(), 2);
    EXPECT_DOUBLE_EQ(a(0, 1), 1.0);
    EXPECT_THROW(parse_matrix_text("3\n-2 1\n1 -2\n"), InputError);
    EXPECT_THROW(parse_matrix_text("2\n-2 x\n1 -2\n"), InputError);
    EXPECT_THROW(parse_matrix_text(""), InputError);
    EXPECT_THROW(read_matrix_file("/nonexistent/matrix.txt"), InputError);
}

TEST(ApplyFunction, IdentityReproducesA) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(5, 1.0);
    const OperatorMatrix a = s.apply_function([](double mu) { return mu; });
    EXPECT_LT((a.value - s.matrix()).norm() / s.matrix().norm(), 1e-13);
}

TEST(ApplyFunction, ScalarSquareRoot) {
    const auto s = SectionOperator::from_matrix(Matrix::Constant(1, 1, -4.0));
    const OperatorMatrix r = s.apply_function([](double mu) { return -std::sqrt(-mu); });
    EXPECT_DOUBLE_EQ(r.value(0, 0), -2.0);
}

TEST(ApplyFunction, ModalExponential) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(3, 1.0);
    const OperatorMatrix e = s.apply_function([](double mu) { return std::exp(-std::sqrt(-mu)); });
    const Matrix modal = s.eigenvectors().transpose() * e.value * s.eigenvectors();
    EXPECT_NEAR(modal(2, 2), 0.0468189399134983, 1e-14);
    EXPECT_NEAR(modal(1, 1), 0.00349348927664620, 1e-15);
    EXPECT_NEAR(modal(0, 0), 0.000616756502099263, 1e-15);
}

TEST(ApplyFunction, NonFiniteRejected) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(3, 1.0);
    EXPECT_THROW(s.apply_function([](double mu) { return std::log(mu); }), EvaluationError);
}

TEST(ApplyFunction, OutputsCommute) {
    const auto s = SectionOperator::dirichlet_laplacian_1d(12, 1.0);
    const Matrix f = s.apply_function([](double mu) { return std::exp(0.01 * mu); }).value;
    const Matrix g = s.apply_function([](double mu) { return 1.0 / (1.0 - mu); }).value;
    EXPECT_LT(relative_commutator(f, g), 1e-11);
}

TEST(GeneratorM, ScalarCases) {
    const GeneratorM m1(SectionOperator::from_matrix(Matrix::Constant(1, 1, -1.0)));
    EXPECT_DOUBLE_EQ(m1.matrix()(0, 0), -1.0);
    const GeneratorM m4(SectionOperator::from_matrix(Matrix::Constant(1, 1, -4.0)));
    EXPECT_DOUBLE_EQ(m4.matrix()(0, 0), -2.0);
}

TEST(GeneratorM, ThreePointEigenvalues) {
    const GeneratorM m(SectionOperator::dirichlet_laplacian_1d(3, 1.0));
    EXPECT_NEAR(m.eigenvalues()(0), -7.39103626009029, 1e-12);
    EXPECT_NEAR(m.eigenvalues()(1), -5.65685424949238, 1e-12);
    EXPECT_NEAR(m.eigenvalues()(2), -3.06146745892072, 1e-12);
    EXPECT_LT(m.square_error(), 1e-10);
}

TEST(GeneratorM, PowersConsistent) {
    const GeneratorM m(SectionOperator::dirichlet_laplacian_1d(7, 1.0));
    const auto n = static_cast<Eigen::Index>(m.dimension());
    EXPECT_LT((m.power(1) * m.power(-1) - Matrix::Identity(n, n)).norm(), 1e-12);
    EXPECT_LT((m.power(2) * m.power(-2) - Matrix::Identity(n, n)).norm(), 1e-12);
    EXPECT_LT((m.power(3) - m.power(2) * m.power(1)).norm() / m.power(3).norm(), 1e-13);
    EXPECT_THROW(m.power(4), DomainError);
}

TEST(Semigroup, IdentityAtZero) {
    const GeneratorM m(SectionOperator::dirichlet_laplacian_1d(4, 1.0));
    EXPECT_EQ(m.semigroup(0.0).value, Matrix::Identity(4, 4));
}

TEST(Semigroup, ScalarExponential) {
    const GeneratorM m(SectionOperator::from_matrix(Matrix::Constant(1, 1, -1.0)));
    EXPECT_NEAR(m.semigroup(1.0).value(0, 0), 0.367879441171442, 1e-15);
}

TEST(Semigroup, NegativeTimeRejected) {
    const GeneratorM m(SectionOperator::dirichlet_laplacian_1d(3, 1.0));
    EXPECT_THROW(m.semigroup(-0.1), DomainError);
}

TEST(Semigroup, LawAndContraction) {
    const GeneratorM m(SectionOperator::dirichlet_laplacian_1d(3, 1.0));
    const Matrix lhs = m.semigroup(0.3).value * m.semigroup(0.7).value;
    EXPECT_LT((lhs - m.semigroup(1.0).value).norm(), 1e-12);
    double prev = 1.0;
    for (const double t : {0.0, 0.1, 1.0, 10.0}) {
        const double n = norm2(m.semigroup(t).value);
        EXPECT_LE(n, 1.0 + 1e-15);
        EXPECT_LE(n, prev + 1e-15);
        prev = n;
    }
}

}  // namespace
}  // namespace biharm
