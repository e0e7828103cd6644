#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>

#include "biharm/linalg.hpp"

namespace biharm {

/// A bounded operator on the section space together with the symbol it realizes
/// (e^{tM}, U-, P1+, ...). Carried around for diagnostics.
struct OperatorMatrix {
    Matrix value;
    std::string symbol;
};

/// Finite-dimensional surrogate of the section operator A: a symmetric negative
/// definite matrix with its eigendecomposition A = Q diag(mu) Q^T.
///
/// Eigenvalues are stored ascending (most negative first). Each eigenvector is
/// sign-normalized so that its first component with magnitude above 1e-12 is
/// positive, which makes modal outputs reproducible.
///
/// Immutable after construction.
class SectionOperator {
public:
    /// Second-order central-difference Dirichlet Laplacian on (0, L) with m
    /// interior points: tridiag(1, -2, 1) / h^2, h = L / (m + 1).
    static SectionOperator dirichlet_laplacian_1d(std::size_t m, double length);

    /// Validates symmetry (1e-12 relative), decomposes, and checks the
    /// hypothesis surrogates (all eigenvalues < -1e-12 max|mu|).
    static SectionOperator from_matrix(const Matrix& a, std::string label = "user matrix");

    std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues_.size()); }
    const Vector& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }
    /// The matrix that was decomposed.
    const Matrix& matrix() const { return input_; }
    const std::string& label() const { return label_; }

    /// ||Q diag(mu) Q^T - A||_2 / ||A||_2
    double reconstruction_error() const;
    /// ||Q^T Q - I||_2
    double orthogonality_error() const;

    /// Coefficients in the eigenbasis: Q^T v.
    Vector to_modal(const Vector& v) const;
    /// Q c
    Vector from_modal(const Vector& c) const;

    /// Q diag(g(mu_j)) Q^T. Throws EvaluationError if g(mu_j) is not finite.
    OperatorMatrix apply_function(const std::function<double(double)>& g, std::string symbol = "g(A)") const;
    Eigen::MatrixXcd apply_complex_function(const std::function<std::complex<double>(double)>& g) const;

private:
    SectionOperator(Matrix input, Vector eigenvalues, Matrix eigenvectors, std::string label);

    Matrix input_;
    Vector eigenvalues_;
    Matrix eigenvectors_;
    std::string label_;
};

/// Reads the plain-text dense format: first token m, then m*m decimals.
/// Throws InputError on malformed or truncated content.
Matrix read_matrix_file(const std::string& path);
Matrix parse_matrix_text(const std::string& text);

/// M = -sqrt(-A), sharing A's eigenbasis.
class GeneratorM {
public:
    explicit GeneratorM(SectionOperator section);

    const SectionOperator& section() const { return section_; }
    std::size_t dimension() const { return section_.dimension(); }
    /// m_j = -sqrt(-mu_j), all strictly negative.
    const Vector& eigenvalues() const { return eigenvalues_; }

    /// M^k for k in {-2, -1, 0, 1, 2, 3}.
    const Matrix& power(int k) const;
    const Matrix& matrix() const { return power(1); }

    /// ||M^2 + A||_2 / ||A||_2
    double square_error() const;

    /// e^{tM}; t must be nonnegative.
    OperatorMatrix semigroup(double t) const;

private:
    SectionOperator section_;
    Vector eigenvalues_;
    Matrix powers_[6];
};

SectionOperator build_dirichlet_laplacian_1d(std::size_t m, double length);
SectionOperator from_matrix(const Matrix& a);
OperatorMatrix apply_function(const SectionOperator& s, const std::function<double(double)>& g);
GeneratorM square_root_generator(const SectionOperator& s);
OperatorMatrix semigroup(const GeneratorM& m, double t);

}  // namespace biharm
