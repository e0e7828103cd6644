#include "biharm/exact_cases.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "biharm/errors.hpp"

namespace biharm {

TransmissionProblem ExactCase::problem() const { return TransmissionProblem{generator, geom, k, forcing, bc}; }

namespace {

using Poly = std::vector<double>;

Poly derivative(const Poly& p) {
    if (p.size() <= 1) {
        return {0.0};
    }
    Poly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) {
        d[i - 1] = static_cast<double>(i) * p[i];
    }
    return d;
}

double horner(const Poly& p, double t) {
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        v = v * t + *it;
    }
    return v;
}

Poly scaled(const Poly& p, double s) {
    Poly out = p;
    for (double& v : out) {
        v *= s;
    }
    return out;
}

Poly add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[i] += b[i];
    }
    return out;
}

void check_mode(const GeneratorM& gen, std::size_t mode) {
    if (mode >= gen.dimension()) {
        throw PreconditionError("mode index " + std::to_string(mode) + " outside the spectrum of size " +
                                std::to_string(gen.dimension()));
    }
}

}  // namespace

ExactCase manufactured_homogeneous(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                   const Diffusivities& k, const std::vector<HomogeneousTerm>& terms) {
    if (!generator) {
        throw PreconditionError("manufactured case needs a generator");
    }
    if (terms.empty()) {
        throw PreconditionError("manufactured homogeneous case needs at least one term");
    }
    for (const auto& t : terms) {
        check_mode(*generator, t.mode);
        if (t.A1 == 0.0 && t.A2 == 0.0) {
            throw PreconditionError("coefficients A1, A2 must not both vanish");
        }
    }
    const Matrix Q = generator->section().eigenvectors();
    const Vector s = -generator->eigenvalues();
    const double gamma = geom.gamma;

    ExactCase out;
    out.name = "homogeneous";
    out.generator = generator;
    out.geom = CylinderGeometry::make(geom.a, geom.gamma, geom.b);
    out.k = Diffusivities::make(k.k_minus, k.k_plus);
    out.field = [Q, s, terms, gamma](Side, int order, double x) {
        Vector v = Vector::Zero(Q.rows());
        for (const auto& t : terms) {
            const double sj = s(static_cast<Eigen::Index>(t.mode));
            const double scale = std::pow(sj, order);
            const double sign = order % 2 == 0 ? 1.0 : -1.0;
            const double value =
                scale * (t.A1 * std::exp(sj * (x - gamma)) + sign * t.A2 * std::exp(-sj * (x - gamma)));
            v += value * Q.col(static_cast<Eigen::Index>(t.mode));
        }
        return v;
    };
    out.bc.phi1_minus = out.field(Side::minus, 0, geom.a);
    out.bc.phi2_minus = out.field(Side::minus, 1, geom.a);
    out.bc.phi1_plus = out.field(Side::plus, 0, geom.b);
    out.bc.phi2_plus = out.field(Side::plus, 1, geom.b);
    out.psi1 = out.field(Side::minus, 0, gamma);
    out.psi2 = out.field(Side::minus, 1, gamma);
    return out;
}

ExactCase manufactured_homogeneous(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                                   const Diffusivities& k, std::size_t mode, double A1, double A2) {
    return manufactured_homogeneous(std::move(generator), geom, k, {HomogeneousTerm{mode, A1, A2}});
}

ExactCase manufactured_forced(std::shared_ptr<const GeneratorM> generator, const CylinderGeometry& geom,
                              const Diffusivities& k, std::size_t mode, const std::vector<double>& profile, double U0,
                              double U1) {
    if (!generator) {
        throw PreconditionError("manufactured case needs a generator");
    }
    check_mode(*generator, mode);
    if (profile.empty() || profile.size() > 7) {
        throw PreconditionError("forced profile must be a polynomial of degree 0..6");
    }
    const CylinderGeometry g = CylinderGeometry::make(geom.a, geom.gamma, geom.b);
    const Diffusivities kk = Diffusivities::make(k.k_minus, k.k_plus);
    const auto j = static_cast<Eigen::Index>(mode);
    const double mu = generator->section().eigenvalues()(j);
    const double s = std::sqrt(-mu);
    const Vector q = generator->section().eigenvectors().col(j);

    struct SideData {
        Poly w;
        Poly f;
        Poly P[4];
        double C = 0.0;
        double D = 0.0;
    };
    const auto build = [&](double weight) {
        SideData sd;
        sd.w = scaled(profile, weight);
        sd.f = add(derivative(derivative(sd.w)), scaled(sd.w, mu));
        // P = -(1/s^2) sum_k (D^2 / s^2)^k w solves P'' - s^2 P = w.
        Poly term = sd.w;
        Poly P = {0.0};
        double factor = -1.0 / (s * s);
        for (int i = 0; i < 4; ++i) {
            P = add(P, scaled(term, factor));
            term = derivative(derivative(term));
            factor /= s * s;
        }
        sd.P[0] = P;
        for (int i = 1; i < 4; ++i) {
            sd.P[i] = derivative(sd.P[i - 1]);
        }
        sd.C = U0 - horner(sd.P[0], 0.0);
        sd.D = (U1 - horner(sd.P[1], 0.0)) / s;
        return sd;
    };
    const SideData minus = build(kk.k_plus);
    const SideData plus = build(kk.k_minus);

    ExactCase out;
    out.name = "forced";
    out.generator = generator;
    out.geom = g;
    out.k = kk;
    const double gamma = g.gamma;
    out.field = [minus, plus, q, s, gamma](Side side, int order, double x) {
        const SideData& sd = side == Side::minus ? minus : plus;
        const double t = x - gamma;
        const double sn = std::pow(s, order);
        const double ch = std::cosh(s * t);
        const double sh = std::sinh(s * t);
        const double hyper = order % 2 == 0 ? sn * (sd.C * ch + sd.D * sh) : sn * (sd.C * sh + sd.D * ch);
        return Vector((horner(sd.P[order], t) + hyper) * q);
    };
    const Poly f_minus = minus.f;
    const Poly f_plus = plus.f;
    out.forcing = ModalForcing::from_function(
        [f_minus, f_plus, mode, gamma](Side side, std::size_t m, double x) {
            if (m != mode) {
                return 0.0;
            }
            return horner(side == Side::minus ? f_minus : f_plus, x - gamma);
        },
        "manufactured forced");
    out.bc.phi1_minus = out.field(Side::minus, 0, g.a);
    out.bc.phi2_minus = out.field(Side::minus, 1, g.a);
    out.bc.phi1_plus = out.field(Side::plus, 0, g.b);
    out.bc.phi2_plus = out.field(Side::plus, 1, g.b);
    out.psi1 = U0 * q;
    out.psi2 = U1 * q;
    return out;
}

}  // namespace biharm
