#include "biharm/section_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

namespace biharm {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kReconstructionTol = 1e-10;
constexpr double kOrthogonalityTol = 1e-12;
constexpr double kZeroEigenvalueTol = 1e-12;

bool is_symmetric(const Matrix& a, double rel_tol) {
    const double scale = a.cwiseAbs().maxCoeff();
    return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace

double norm2(const Matrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    if (a.rows() == a.cols() && is_symmetric(a, 0.0)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double relative_commutator(const Matrix& a, const Matrix& b) {
    const double scale = std::max(norm2(a) * norm2(b), std::numeric_limits<double>::min());
    return norm2(a * b - b * a) / scale;
}

SectionOperator::SectionOperator(Matrix input, Vector eigenvalues, Matrix eigenvectors, std::string label)
    : input_(std::move(input)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      label_(std::move(label)) {}

SectionOperator SectionOperator::dirichlet_laplacian_1d(std::size_t m, double length) {
    if (m == 0) {
        throw InvalidGeometry("Dirichlet Laplacian needs at least one interior point");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw InvalidGeometry("Dirichlet Laplacian needs a positive section length");
    }
    const auto n = static_cast<Eigen::Index>(m);
    const double h = length / static_cast<double>(m + 1);
    const double inv_h2 = 1.0 / (h * h);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = -2.0 * inv_h2;
        if (i > 0) {
            a(i, i - 1) = inv_h2;
        }
        if (i + 1 < n) {
            a(i, i + 1) = inv_h2;
        }
    }
    std::ostringstream label;
    label << "laplacian-1d(m=" << m << ", L=" << length << ")";
    return from_matrix(a, label.str());
}

SectionOperator SectionOperator::from_matrix(const Matrix& a, std::string label) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        throw InvalidGeometry("section operator must be a nonempty square matrix");
    }
    if (!a.allFinite()) {
        throw InputError("section operator has non-finite entries");
    }
    if (!is_symmetric(a, kSymmetryTol)) {
        throw SymmetryError("section operator is not symmetric to 1e-12 relative; only self-adjoint A is supported");
    }
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw Anomaly("symmetric eigensolver did not converge");
    }
    Vector mu = es.eigenvalues();
    Matrix q = es.eigenvectors();

    const double mu_scale = mu.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
        if (mu(j) >= -kZeroEigenvalueTol * mu_scale) {
            std::ostringstream msg;
            msg << "eigenvalue " << mu(j) << " is not strictly negative: hypotheses (H2) 0 in rho(A) and "
                << "(H4) -A in Sect(0) fail";
            throw HypothesisViolation(msg.str());
        }
    }

    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        for (Eigen::Index i = 0; i < q.rows(); ++i) {
            if (std::abs(q(i, j)) > 1e-12) {
                if (q(i, j) < 0.0) {
                    q.col(j) *= -1.0;
                }
                break;
            }
        }
    }

    SectionOperator s(a, std::move(mu), std::move(q), std::move(label));
    if (s.reconstruction_error() > kReconstructionTol) {
        throw Anomaly("eigendecomposition reconstruction error exceeds 1e-10");
    }
    if (s.orthogonality_error() > kOrthogonalityTol) {
        throw Anomaly("eigenvector matrix is not orthonormal to 1e-12");
    }
    return s;
}

double SectionOperator::reconstruction_error() const {
    const Matrix rebuilt = eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
    return norm2(rebuilt - input_) / norm2(input_);
}

double SectionOperator::orthogonality_error() const {
    const auto n = eigenvectors_.cols();
    return norm2(eigenvectors_.transpose() * eigenvectors_ - Matrix::Identity(n, n));
}

Vector SectionOperator::to_modal(const Vector& v) const {
    require_same_size(v, eigenvalues_.size(), "to_modal");
    return eigenvectors_.transpose() * v;
}

Vector SectionOperator::from_modal(const Vector& c) const {
    require_same_size(c, eigenvalues_.size(), "from_modal");
    return eigenvectors_ * c;
}

OperatorMatrix SectionOperator::apply_function(const std::function<double(double)>& g, std::string symbol) const {
    Vector values(eigenvalues_.size());
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) {
        values(j) = g(eigenvalues_(j));
        if (!std::isfinite(values(j))) {
            std::ostringstream msg;
            msg << "function " << symbol << " is not finite at eigenvalue " << eigenvalues_(j);
            throw EvaluationError(msg.str());
        }
    }
    Matrix out = eigenvectors_ * values.asDiagonal() * eigenvectors_.transpose();
    // Exact symmetry; the product is symmetric only up to rounding.
    out = 0.5 * (out + out.transpose()).eval();
    return {std::move(out), std::move(symbol)};
}

Eigen::MatrixXcd SectionOperator::apply_complex_function(const std::function<std::complex<double>(double)>& g) const {
    Eigen::VectorXcd values(eigenvalues_.size());
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) {
        values(j) = g(eigenvalues_(j));
        if (!std::isfinite(values(j).real()) || !std::isfinite(values(j).imag())) {
            std::ostringstream msg;
            msg << "complex function is not finite at eigenvalue " << eigenvalues_(j);
            throw EvaluationError(msg.str());
        }
    }
    const Eigen::MatrixXcd q = eigenvectors_.cast<std::complex<double>>();
    return q * values.asDiagonal() * q.transpose();
}

Matrix parse_matrix_text(const std::string& text) {
    std::istringstream in(text);
    long long m = 0;
    if (!(in >> m) || m <= 0) {
        throw InputError("matrix file: first token must be a positive dimension m");
    }
    if (m > 4096) {
        throw InputError("matrix file: dimension " + std::to_string(m) + " exceeds the dense limit 4096");
    }
    const auto n = static_cast<Eigen::Index>(m);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            std::string token;
            if (!(in >> token)) {
                throw InputError("matrix file: expected " + std::to_string(m * m) + " entries, ran out at row " +
                                 std::to_string(i));
            }
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size() || !std::isfinite(value)) {
                throw InputError("matrix file: malformed entry '" + token + "'");
            }
            a(i, j) = value;
        }
    }
    std::string extra;
    if (in >> extra) {
        throw InputError("matrix file: trailing content after " + std::to_string(m * m) + " entries");
    }
    return a;
}

Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open matrix file: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_matrix_text(buffer.str());
}

GeneratorM::GeneratorM(SectionOperator section) : section_(std::move(section)) {
    const Vector& mu = section_.eigenvalues();
    eigenvalues_ = (-mu).cwiseSqrt() * -1.0;
    const Matrix& q = section_.eigenvectors();
    const int exponents[6] = {-2, -1, 0, 1, 2, 3};
    for (int i = 0; i < 6; ++i) {
        const Vector d = eigenvalues_.array().pow(exponents[i]).matrix();
        Matrix p = q * d.asDiagonal() * q.transpose();
        powers_[i] = 0.5 * (p + p.transpose());
    }
}

const Matrix& GeneratorM::power(int k) const {
    if (k < -2 || k > 3) {
        throw DomainError("GeneratorM::power supports exponents -2..3");
    }
    return powers_[k + 2];
}

double GeneratorM::square_error() const {
    const Matrix& a = section_.matrix();
    return norm2(power(1) * power(1) + a) / norm2(a);
}

OperatorMatrix GeneratorM::semigroup(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("semigroup e^{tM} is defined for finite t >= 0 only");
    }
    std::ostringstream symbol;
    symbol << "e^{" << t << "M}";
    if (t == 0.0) {
        const auto n = static_cast<Eigen::Index>(dimension());
        return {Matrix::Identity(n, n), symbol.str()};
    }
    const Vector& mj = eigenvalues_;
    Vector values = (t * mj).array().exp().matrix();
    const Matrix& q = section_.eigenvectors();
    Matrix out = q * values.asDiagonal() * q.transpose();
    out = 0.5 * (out + out.transpose()).eval();
    return {std::move(out), symbol.str()};
}

SectionOperator build_dirichlet_laplacian_1d(std::size_t m, double length) {
    return SectionOperator::dirichlet_laplacian_1d(m, length);
}

SectionOperator from_matrix(const Matrix& a) { return SectionOperator::from_matrix(a); }

OperatorMatrix apply_function(const SectionOperator& s, const std::function<double(double)>& g) {
    return s.apply_function(g);
}

GeneratorM square_root_generator(const SectionOperator& s) { return GeneratorM(s); }

OperatorMatrix semigroup(const GeneratorM& m, double t) { return m.semigroup(t); }

}  // namespace biharm
