#include "biharm/particular_solution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "biharm/errors.hpp"

namespace biharm {

Vector dirichlet_helmholtz(const Vector& rhs, double h, double mu) {
    const Eigen::Index n = rhs.size();
    Vector y = Vector::Zero(n);
    if (n <= 2) {
        return y;
    }
    const double off = 1.0 / (h * h);
    const double diag = -2.0 / (h * h) + mu;
    const Eigen::Index k = n - 2;
    // Thomas sweep on the interior nodes; strictly diagonally dominant for mu < 0.
    Vector c(k);
    Vector r(k);
    double pivot = diag;
    c(0) = off / pivot;
    r(0) = rhs(1) / pivot;
    for (Eigen::Index i = 1; i < k; ++i) {
        pivot = diag - off * c(i - 1);
        c(i) = off / pivot;
        r(i) = (rhs(i + 1) - off * r(i - 1)) / pivot;
    }
    y(k) = r(k - 1);
    for (Eigen::Index i = k - 2; i >= 0; --i) {
        y(i + 1) = r(i) - c(i) * y(i + 2);
    }
    return y;
}

Vector derivative4(const Vector& y, double h) {
    const Eigen::Index n = y.size();
    if (n < 5) {
        throw ResolutionError("fourth-order differences need at least 5 nodes");
    }
    Vector d(n);
    const double s = 1.0 / (12.0 * h);
    d(0) = s * (-25.0 * y(0) + 48.0 * y(1) - 36.0 * y(2) + 16.0 * y(3) - 3.0 * y(4));
    d(1) = s * (-3.0 * y(0) - 10.0 * y(1) + 18.0 * y(2) - 6.0 * y(3) + y(4));
    for (Eigen::Index i = 2; i < n - 2; ++i) {
        d(i) = s * (y(i - 2) - 8.0 * y(i - 1) + 8.0 * y(i + 1) - y(i + 2));
    }
    const Eigen::Index e = n - 1;
    d(e) = s * (25.0 * y(e) - 48.0 * y(e - 1) + 36.0 * y(e - 2) - 16.0 * y(e - 3) + 3.0 * y(e - 4));
    d(e - 1) = s * (3.0 * y(e) + 10.0 * y(e - 1) - 18.0 * y(e - 2) + 6.0 * y(e - 3) - y(e - 4));
    return d;
}

namespace {

struct ModeFields {
    Vector F;
    Vector w;
};

ModeFields solve_mode(const Vector& f, double h, double mu) {
    ModeFields out;
    out.w = dirichlet_helmholtz(f, h, mu);
    out.F = dirichlet_helmholtz(out.w, h, mu);
    return out;
}

Vector restrict_to_coarse(const Vector& fine) {
    const Eigen::Index n = (fine.size() + 1) / 2;
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i) = fine(2 * i);
    }
    return out;
}

}  // namespace

ParticularSolution ParticularSolution::zero(const SectionOperator& section, const CylinderGeometry& geom, Side side) {
    ParticularSolution p;
    const auto m = static_cast<Eigen::Index>(section.dimension());
    p.side_ = side;
    p.left_ = geom.left(side);
    p.right_ = geom.right(side);
    p.zero_ = true;
    p.mu_ = section.eigenvalues();
    p.Q_ = section.eigenvectors();
    p.traces_ = {Vector::Zero(m), Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
    return p;
}

ParticularSolution solve_particular(const SectionOperator& section, const CylinderGeometry& geom, Side side,
                                    const ModalForcing& forcing, std::size_t n_x) {
    if (n_x < 17) {
        throw ResolutionError("particular solution needs n_x >= 17, got " + std::to_string(n_x));
    }
    ParticularSolution p = ParticularSolution::zero(section, geom, side);
    p.n_x_ = n_x;
    const auto m = static_cast<Eigen::Index>(section.dimension());
    const auto n = static_cast<Eigen::Index>(n_x);
    const Eigen::Index nf = 2 * n - 1;
    const double left = p.left_;
    const double len = p.right_ - p.left_;
    const double h = len / static_cast<double>(n - 1);
    const double hf = h / 2.0;

    p.F_ = Matrix::Zero(n, m);
    p.dF_ = Matrix::Zero(n, m);
    p.w_ = Matrix::Zero(n, m);
    p.dw_ = Matrix::Zero(n, m);
    if (forcing.is_zero()) {
        return p;
    }
    p.zero_ = false;

    double field_sq = 0.0;
    double trace_sq = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mu = p.mu_(j);
        Vector f_fine(nf);
        for (Eigen::Index i = 0; i < nf; ++i) {
            const double x = i == nf - 1 ? p.right_ : left + hf * static_cast<double>(i);
            f_fine(i) = forcing(side, static_cast<std::size_t>(j), x);
            if (!std::isfinite(f_fine(i))) {
                throw EvaluationError("forcing is not finite at x = " + std::to_string(x));
            }
        }
        const Vector f_coarse = restrict_to_coarse(f_fine);
        const ModeFields coarse = solve_mode(f_coarse, h, mu);
        const ModeFields fine_full = solve_mode(f_fine, hf, mu);
        const Vector F_fine = restrict_to_coarse(fine_full.F);
        const Vector w_fine = restrict_to_coarse(fine_full.w);

        const Vector F = (4.0 * F_fine - coarse.F) / 3.0;
        const Vector w = (4.0 * w_fine - coarse.w) / 3.0;
        p.F_.col(j) = F;
        p.w_.col(j) = w;
        p.dF_.col(j) = derivative4(F, h);
        p.dw_.col(j) = derivative4(w, h);

        const double field_est = (F_fine - coarse.F).cwiseAbs().maxCoeff() / 3.0;
        const Vector dFc = derivative4(coarse.F, h);
        const Vector dFf = derivative4(fine_full.F, hf);
        const Vector dwc = derivative4(coarse.w, h);
        const Vector dwf = derivative4(fine_full.w, hf);
        double trace_est = 0.0;
        for (const auto& [c_end, f_end] : {std::pair{0, 0}, std::pair{int(n - 1), int(nf - 1)}}) {
            const double d1 = std::abs(dFf(f_end) - dFc(c_end));
            const double d3 = std::abs((dwf(f_end) - mu * dFf(f_end)) - (dwc(c_end) - mu * dFc(c_end)));
            trace_est = std::max({trace_est, d1 / 3.0, d3 / 3.0});
        }
        field_sq += field_est * field_est;
        trace_sq += trace_est * trace_est;
    }
    p.field_error_ = std::sqrt(field_sq);
    p.trace_error_ = std::sqrt(trace_sq);

    const Vector d1_left = p.dF_.row(0).transpose();
    const Vector d1_right = p.dF_.row(n - 1).transpose();
    const Vector d3_left = p.dw_.row(0).transpose() - p.mu_.cwiseProduct(d1_left);
    const Vector d3_right = p.dw_.row(n - 1).transpose() - p.mu_.cwiseProduct(d1_right);
    p.traces_ = {p.Q_ * d1_left, p.Q_ * d1_right, p.Q_ * d3_left, p.Q_ * d3_right};
    return p;
}

Vector ParticularSolution::modal(int order, double x) const {
    if (order < 0 || order > 3) {
        throw PreconditionError("particular solution derivative order must be 0..3");
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(right_ - left_));
    if (x < left_ - tol || x > right_ + tol) {
        throw DomainError("x = " + std::to_string(x) + " lies outside the " + to_string(side_) + " interval");
    }
    const auto m = mu_.size();
    if (zero_) {
        return Vector::Zero(m);
    }
    const auto n = F_.rows();
    const double h = (right_ - left_) / static_cast<double>(n - 1);
    const double s = (x - left_) / h;
    const double node = std::round(s);
    const bool on_node = std::abs(s - node) <= 1e-12 * std::max(1.0, std::abs(s));

    const auto sample = [&](const Matrix& field, Eigen::Index j) {
        if (on_node) {
            return field(static_cast<Eigen::Index>(node), j);
        }
        return interpolate_uniform(field.col(j).data(), static_cast<std::size_t>(n), left_, right_, x);
    };

    Vector out(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        switch (order) {
            case 0:
                out(j) = sample(F_, j);
                break;
            case 1:
                out(j) = sample(dF_, j);
                break;
            case 2:
                out(j) = sample(w_, j) - mu_(j) * sample(F_, j);
                break;
            default:
                out(j) = sample(dw_, j) - mu_(j) * sample(dF_, j);
                break;
        }
    }
    return out;
}

Vector ParticularSolution::evaluate(int order, double x) const {
    if (zero_) {
        modal(order, x);
        return Vector::Zero(mu_.size());
    }
    return Q_ * modal(order, x);
}

const Vector& ParticularSolution::interface_d1() const {
    return side_ == Side::minus ? traces_.d1_right : traces_.d1_left;
}

const Vector& ParticularSolution::interface_d3() const {
    return side_ == Side::minus ? traces_.d3_right : traces_.d3_left;
}

const Vector& ParticularSolution::outer_d1() const {
    return side_ == Side::minus ? traces_.d1_left : traces_.d1_right;
}

}  // namespace biharm
