#include "biharm/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "biharm/errors.hpp"
#include "biharm/transmission.hpp"

namespace biharm {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Unknown layout: minus nodes -1..N+1, then the plus ghost -1, then plus nodes
/// 1..N+1. Plus node 0 is minus node N.
struct Layout {
    Eigen::Index N;

    Eigen::Index size() const { return 2 * N + 5; }
    Eigen::Index minus(Eigen::Index i) const { return i + 1; }
    Eigen::Index plus(Eigen::Index i) const {
        if (i == 0) {
            return minus(N);
        }
        if (i == -1) {
            return N + 3;
        }
        return N + 3 + i;
    }
    Eigen::Index at(Side s, Eigen::Index i) const { return s == Side::minus ? minus(i) : plus(i); }
};

class Assembler {
public:
    explicit Assembler(const Layout& layout) : layout_(layout), rhs_(Vector::Zero(layout.size())) {}

    Eigen::Index next_row() { return row_++; }
    void add(Eigen::Index row, Side s, Eigen::Index i, double v) { entries_.emplace_back(row, layout_.at(s, i), v); }
    void set_rhs(Eigen::Index row, double v) { rhs_(row) = v; }

    /// weight * (second difference + mu) u at node i.
    void add_w(Eigen::Index row, Side s, Eigen::Index i, double h, double mu, double weight) {
        const double ih2 = 1.0 / (h * h);
        add(row, s, i - 1, weight * ih2);
        add(row, s, i, weight * (-2.0 * ih2 + mu));
        add(row, s, i + 1, weight * ih2);
    }

    Eigen::Index rows() const { return row_; }
    const std::vector<Triplet>& entries() const { return entries_; }
    const Vector& rhs() const { return rhs_; }

private:
    Layout layout_;
    std::vector<Triplet> entries_;
    Vector rhs_;
    Eigen::Index row_ = 0;
};

}  // namespace

OracleSolution direct_solve(const SectionOperator& section, const CylinderGeometry& geom_in, const Diffusivities& k,
                            const ModalForcing& forcing, const BoundaryData& bc, std::size_t n_x) {
    if (n_x < 33) {
        throw ResolutionError("direct oracle needs n_x >= 33, got " + std::to_string(n_x));
    }
    const CylinderGeometry geom = CylinderGeometry::make(geom_in.a, geom_in.gamma, geom_in.b);
    Diffusivities::make(k.k_minus, k.k_plus);
    const auto m = static_cast<Eigen::Index>(section.dimension());
    bc.validate(m);

    const Matrix& Q = section.eigenvectors();
    const Vector& mu_all = section.eigenvalues();
    const Vector p1m = Q.transpose() * bc.phi1_minus;
    const Vector p2m = Q.transpose() * bc.phi2_minus;
    const Vector p1p = Q.transpose() * bc.phi1_plus;
    const Vector p2p = Q.transpose() * bc.phi2_plus;

    const auto N = static_cast<Eigen::Index>(n_x) - 1;
    const Layout layout{N};
    const double hm = geom.c() / static_cast<double>(N);
    const double hp = geom.d() / static_cast<double>(N);
    const double hs = std::min(hm, hp);

    OracleSolution out;
    out.n_x_ = n_x;
    out.geom_ = geom;
    out.Q_ = Q;
    out.minus_ = Matrix::Zero(N + 1, m);
    out.plus_ = Matrix::Zero(N + 1, m);

    for (Eigen::Index j = 0; j < m; ++j) {
        const double mu = mu_all(j);
        Assembler as(layout);

        for (const Side s : {Side::minus, Side::plus}) {
            const double h = s == Side::minus ? hm : hp;
            const double left = geom.left(s);
            const double h2mu = mu * h * h;
            const double stencil[5] = {1.0, -4.0 + 2.0 * h2mu, 6.0 - 4.0 * h2mu + h2mu * h2mu, -4.0 + 2.0 * h2mu,
                                       1.0};
            for (Eigen::Index i = 1; i < N; ++i) {
                const Eigen::Index row = as.next_row();
                for (int o = 0; o < 5; ++o) {
                    as.add(row, s, i + o - 2, stencil[o]);
                }
                const double x = left + h * static_cast<double>(i);
                const double f = forcing.is_zero() ? 0.0 : forcing(s, static_cast<std::size_t>(j), x);
                as.set_rhs(row, h * h * h * h * f);
            }
        }

        Eigen::Index row = as.next_row();
        as.add(row, Side::minus, 0, 1.0);
        as.set_rhs(row, p1m(j));
        row = as.next_row();
        as.add(row, Side::minus, 1, 1.0);
        as.add(row, Side::minus, -1, -1.0);
        as.set_rhs(row, 2.0 * hm * p2m(j));
        row = as.next_row();
        as.add(row, Side::plus, N, 1.0);
        as.set_rhs(row, p1p(j));
        row = as.next_row();
        as.add(row, Side::plus, N + 1, 1.0);
        as.add(row, Side::plus, N - 1, -1.0);
        as.set_rhs(row, 2.0 * hp * p2p(j));

        // Matching centered first differences at gamma.
        row = as.next_row();
        as.add(row, Side::minus, N + 1, hs / (2.0 * hm));
        as.add(row, Side::minus, N - 1, -hs / (2.0 * hm));
        as.add(row, Side::plus, 1, -hs / (2.0 * hp));
        as.add(row, Side::plus, -1, hs / (2.0 * hp));

        // k- w-(gamma) = k+ w+(gamma), w = u'' + mu u.
        row = as.next_row();
        as.add_w(row, Side::minus, N, hm, mu, k.k_minus * hs * hs);
        as.add_w(row, Side::plus, 0, hp, mu, -k.k_plus * hs * hs);

        // k- w-'(gamma) = k+ w+'(gamma), one-sided second order.
        row = as.next_row();
        const double sm = k.k_minus * hs * hs * hs / (2.0 * hm);
        const double sp = k.k_plus * hs * hs * hs / (2.0 * hp);
        as.add_w(row, Side::minus, N, hm, mu, 3.0 * sm);
        as.add_w(row, Side::minus, N - 1, hm, mu, -4.0 * sm);
        as.add_w(row, Side::minus, N - 2, hm, mu, sm);
        as.add_w(row, Side::plus, 0, hp, mu, 3.0 * sp);
        as.add_w(row, Side::plus, 1, hp, mu, -4.0 * sp);
        as.add_w(row, Side::plus, 2, hp, mu, sp);

        if (as.rows() != layout.size()) {
            throw Anomaly("oracle assembly produced " + std::to_string(as.rows()) + " rows for " +
                          std::to_string(layout.size()) + " unknowns");
        }
        Eigen::SparseMatrix<double> K(layout.size(), layout.size());
        K.setFromTriplets(as.entries().begin(), as.entries().end());
        K.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success) {
            throw Anomaly("direct oracle system is singular at mode " + std::to_string(j));
        }
        const Vector u = lu.solve(as.rhs());
        if (lu.info() != Eigen::Success || !u.allFinite()) {
            throw Anomaly("direct oracle solve failed at mode " + std::to_string(j));
        }
        const double scale = K.norm() * u.norm() + as.rhs().norm();
        const double res = scale > 0.0 ? (K * u - as.rhs()).norm() / scale : 0.0;
        out.residual_ = std::max(out.residual_, res);

        for (Eigen::Index i = 0; i <= N; ++i) {
            out.minus_(i, j) = u(layout.minus(i));
            out.plus_(i, j) = u(layout.plus(i));
        }
    }
    return out;
}

Vector OracleSolution::evaluate(Side side, double x) const {
    const Matrix& nodes = side == Side::minus ? minus_ : plus_;
    const double left = geom_.left(side);
    const double right = geom_.right(side);
    const double tol = 1e-12 * std::max(1.0, right - left);
    if (x < left - tol || x > right + tol) {
        throw DomainError("x = " + std::to_string(x) + " lies outside the " + to_string(side) + " interval");
    }
    const auto n = nodes.rows();
    Vector modal(nodes.cols());
    for (Eigen::Index j = 0; j < nodes.cols(); ++j) {
        modal(j) = interpolate_uniform(nodes.col(j).data(), static_cast<std::size_t>(n), left, right,
                                       std::clamp(x, left, right));
    }
    return Q_ * modal;
}

ErrorMetrics compare(const FieldFn& a, const FieldFn& b, const CylinderGeometry& geom, std::size_t probes) {
    if (probes < 2) {
        throw PreconditionError("comparison needs at least 2 probes per side");
    }
    double sup = 0.0;
    double sum_sq = 0.0;
    double ref = 0.0;
    std::size_t count = 0;
    for (const Side s : {Side::minus, Side::plus}) {
        const double left = geom.left(s);
        const double len = geom.length(s);
        for (std::size_t i = 0; i < probes; ++i) {
            const double x =
                i + 1 == probes ? geom.right(s) : left + len * static_cast<double>(i) / static_cast<double>(probes - 1);
            const Vector va = a(s, x);
            const Vector vb = b(s, x);
            if (va.size() != vb.size()) {
                throw DimensionMismatch("compared fields have different section dimensions");
            }
            const double e = (va - vb).norm();
            sup = std::max(sup, e);
            sum_sq += e * e;
            ref = std::max(ref, vb.norm());
            ++count;
        }
    }
    ErrorMetrics out;
    out.sup = sup;
    out.relative_sup = sup / std::max(1.0, ref);
    out.scaled_l2 = std::sqrt(sum_sq / static_cast<double>(count)) / std::max(1.0, ref);
    return out;
}

FieldFn field_of(const TransmissionSolution& solution) {
    return [solution](Side s, double x) { return solution.side(s).evaluate(0, x); };
}

FieldFn field_of(const OracleSolution& solution) {
    return [solution](Side s, double x) { return solution.evaluate(s, x); };
}

FieldFn field_of(const ExactCase& exact) {
    return [field = exact.field](Side s, double x) { return field(s, 0, x); };
}

Method parse_method(const std::string& name) {
    if (name == "representation") {
        return Method::representation;
    }
    if (name == "direct") {
        return Method::direct;
    }
    throw InputError("method must be representation or direct, got '" + name + "'");
}

const char* to_string(Method m) { return m == Method::representation ? "representation" : "direct"; }

ConvergenceTable convergence_table(const std::vector<std::size_t>& levels, const std::vector<double>& errors) {
    if (levels.size() < 3) {
        throw PreconditionError("a convergence study needs at least 3 refinement levels");
    }
    if (levels.size() != errors.size()) {
        throw PreconditionError("convergence table: levels and errors differ in length");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 2 || (i > 0 && levels[i] <= levels[i - 1])) {
            throw PreconditionError("refinement levels must be increasing and at least 2");
        }
    }
    ConvergenceTable t;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.floor = std::all_of(errors.begin(), errors.end(), [](double e) { return e <= 1e-9; });
    const auto h_log = [](std::size_t n) { return -std::log(static_cast<double>(n - 1)); };
    const auto e_log = [](double e) { return std::log(std::max(e, std::numeric_limits<double>::min())); };
    for (std::size_t i = 0; i < levels.size(); ++i) {
        RateRow row{levels[i], errors[i], nan};
        if (i > 0 && !t.floor) {
            row.rate = (e_log(errors[i - 1]) - e_log(errors[i])) / (h_log(levels[i - 1]) - h_log(levels[i]));
        }
        t.rows.push_back(row);
    }
    if (t.floor) {
        t.fitted_rate = nan;
        return t;
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        mx += h_log(levels[i]);
        my += e_log(errors[i]);
    }
    mx /= static_cast<double>(levels.size());
    my /= static_cast<double>(levels.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double dx = h_log(levels[i]) - mx;
        sxy += dx * (e_log(errors[i]) - my);
        sxx += dx * dx;
    }
    t.fitted_rate = sxy / sxx;
    return t;
}

std::string ConvergenceTable::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "n_x,error,rate\n";
    for (const auto& r : rows) {
        out << r.n_x << ',' << r.error << ',';
        if (std::isnan(r.rate)) {
            out << "nan";
        } else {
            out << r.rate;
        }
        out << '\n';
    }
    return out.str();
}

ConvergenceTable convergence_study(const ExactCase& exact, Method method, const std::vector<std::size_t>& levels,
                                   std::size_t probes) {
    if (levels.size() < 3) {
        throw PreconditionError("a convergence study needs at least 3 refinement levels");
    }
    const FieldFn reference = field_of(exact);
    std::vector<double> errors;
    for (const std::size_t n_x : levels) {
        if (method == Method::representation) {
            TransmissionOptions options;
            options.n_x = n_x;
            const TransmissionSolution sol = solve_transmission(exact.problem(), options);
            errors.push_back(compare(field_of(sol), reference, exact.geom, probes).relative_sup);
        } else {
            const OracleSolution sol =
                direct_solve(exact.generator->section(), exact.geom, exact.k, exact.forcing, exact.bc, n_x);
            errors.push_back(compare(field_of(sol), reference, exact.geom, probes).relative_sup);
        }
    }
    return convergence_table(levels, errors);
}

}  // namespace biharm
