#include "spraykit/vlasov.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spraykit {

Vec VlasovField::tangent(const PhasePoint& u) const {
    const int n = u.dim();
    Vec t(2 * n);
    t.head(n) = u.v;
    t.tail(n) = phi(u);
    return t;
}

VlasovField geodesic_field(const SpacetimeModel& model) {
    return {"geodesic", [model](const PhasePoint& u) -> Vec {
                return -christoffel_at(model, u.x).contract(u.v, u.v);
            }};
}

VlasovField lorentz_field(const SpacetimeModel& model) {
    return {"lorentz", [model](const PhasePoint& u) -> Vec {
                const Mat g = metric_at(model, u.x);
                const double fh = -u.v.dot(g * u.v);
                const int sigma = causal_indicator(model, u);
                Vec phi = -christoffel_at(model, u.x).contract(u.v, u.v);
                if (model.charge_to_mass != 0.0 && model.faraday) {
                    const Vec force = inverse_metric_at(model, u.x) * (faraday_at(model, u.x) * u.v);
                    phi += model.charge_to_mass * sigma * std::sqrt(fh) * force;
                }
                return phi;
            }};
}

namespace {

int orientation_sign(const SpacetimeModel& model, const PhasePoint& u) {
    const double tdot = model.time_orientation ? scalar_lift(*model.time_orientation, u) : u.v[0];
    return tdot > 0 ? 1 : -1;
}

Vec join(double v0, const Vec& spatial) {
    Vec v(spatial.size() + 1);
    v[0] = v0;
    v.tail(spatial.size()) = spatial;
    return v;
}

// Future root of g(v, v) = -target with v = (v0, spatial).
Vec hyperboloid_completion(const SpacetimeModel& model, const Vec& x, const Vec& spatial, double target) {
    const Mat g = metric_at(model, x);
    const int n = model.dim;
    const double a = g(0, 0);
    const double b = 2.0 * g.row(0).tail(n - 1).dot(spatial);
    const double c = spatial.dot(g.bottomRightCorner(n - 1, n - 1) * spatial) + target;
    const double disc = b * b - 4 * a * c;
    if (!(disc >= 0) || a == 0.0)
        throw QuadratureDomainError("no timelike completion of the spatial velocity on the mass shell");
    const double sq = std::sqrt(disc);
    for (double r : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
        PhasePoint u{x, join(r, spatial)};
        if (u.v.dot(g * u.v) < -kTimelikeEps && orientation_sign(model, u) > 0) return u.v;
    }
    throw QuadratureDomainError("no future-pointing completion on the mass shell");
}

} // namespace

KinematicIndicator indicator_hyperboloid(const SpacetimeModel& model) {
    KinematicIndicator k;
    k.name = "hyperboloid";
    k.degree = 2;
    k.F.name = "F_H";
    k.F.degree = 2;
    k.F.eval = [model](const PhasePoint& u) { return -u.v.dot(metric_at(model, u.x) * u.v); };
    k.F.gradient = [model](const PhasePoint& u) {
        const int n = u.dim();
        const Tensor3 dg = metric_derivative_at(model, u.x);
        BundleGradient gr{Vec(n), -2.0 * (metric_at(model, u.x) * u.v)};
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += dg(l, a, b) * u.v[a] * u.v[b];
            gr.dx[l] = -s;
        }
        return gr;
    };
    k.orientation = [model](const PhasePoint& u) { return orientation_sign(model, u); };
    k.complete = [model](const Vec& x, const Vec& s, double level) {
        return hyperboloid_completion(model, x, s, level);
    };
    return k;
}

KinematicIndicator indicator_hyperboloid_linear(const SpacetimeModel& model) {
    const KinematicIndicator quad = indicator_hyperboloid(model);
    KinematicIndicator k;
    k.name = "hyperboloid_linear";
    k.degree = 1;
    k.F.name = "sigma*sqrt(F_H)";
    k.F.degree = 1;
    k.F.eval = [model, quad](const PhasePoint& u) {
        const int sigma = causal_indicator(model, u);
        return sigma * std::sqrt(quad.F.eval(u));
    };
    k.F.gradient = [model, quad](const PhasePoint& u) {
        const int sigma = causal_indicator(model, u);
        const double root = std::sqrt(quad.F.eval(u));
        BundleGradient g = quad.F.gradient(u);
        const double c = sigma / (2.0 * root);
        return BundleGradient{c * g.dx, c * g.dv};
    };
    k.orientation = nullptr;
    k.complete = [model](const Vec& x, const Vec& s, double level) {
        return hyperboloid_completion(model, x, s, level * level);
    };
    return k;
}

KinematicIndicator indicator_labtime(const SpacetimeModel& model) {
    if (!model.labtime) throw MissingLabTimeError(fmt::format("{}: no lab time registered", model.name));
    const BaseScalar t = *model.labtime;
    KinematicIndicator k;
    k.name = "labtime";
    k.degree = 1;
    k.F = lift(t);
    k.F.name = "tdot";
    k.complete = [t](const Vec& x, const Vec& s, double level) {
        const Vec grad = t.grad(x);
        if (grad[0] == 0.0) throw QuadratureDomainError("lab time gradient has no x^0 component");
        const double v0 = (level - grad.tail(s.size()).dot(s)) / grad[0];
        return join(v0, s);
    };
    return k;
}

KinematicIndicator indicator_coordinate(const SpacetimeModel& model) {
    KinematicIndicator k;
    k.name = "coordinate";
    k.degree = 2;
    k.F.name = "F_crd";
    k.F.degree = 2;
    k.F.eval = [](const PhasePoint& u) { return u.v.squaredNorm(); };
    k.F.gradient = [](const PhasePoint& u) {
        return BundleGradient{Vec::Zero(u.dim()), 2.0 * u.v};
    };
    k.orientation = [model](const PhasePoint& u) { return orientation_sign(model, u); };
    k.complete = [](const Vec&, const Vec& s, double level) {
        const double r = level - s.squaredNorm();
        if (!(r > 0)) throw QuadratureDomainError("spatial velocity exceeds the coordinate sphere");
        return join(std::sqrt(r), s);
    };
    return k;
}

Vec complete_velocity(const SpacetimeModel& model, const KinematicIndicator& f, const Vec& x, const Vec& spatial,
                      double level) {
    if (f.complete) return f.complete(x, spatial, level);
    // Bracket v^0 in (0, hi] and bisect.
    auto resid = [&](double v0) { return f.F.eval({x, join(v0, spatial)}) - level; };
    double lo = 1e-12, hi = 1.0;
    const double rlo = resid(lo);
    int guard = 0;
    while (std::signbit(resid(hi)) == std::signbit(rlo)) {
        hi *= 2;
        if (++guard > 60) throw QuadratureDomainError(fmt::format("{}: no root for v^0 on level set", f.name));
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::signbit(resid(mid)) == std::signbit(rlo) ? lo : hi) = mid;
    }
    (void)model;
    return join(0.5 * (lo + hi), spatial);
}

double apply_field(const VlasovField& w, const BundleScalar& f, const PhasePoint& u) {
    const BundleGradient g = gradient_of(f, u);
    return u.v.dot(g.dx) + w.phi(u).dot(g.dv);
}

VlasovField transform_to_domain(const VlasovField& w, const KinematicIndicator& f) {
    const KinematicIndicator fc = f;
    return {w.label + "|" + f.name, [w, fc](const PhasePoint& u) -> Vec {
                const BundleGradient g = gradient_of(fc.F, u);
                const Vec phi = w.phi(u);
                const double wf = u.v.dot(g.dx) + phi.dot(g.dv);
                const double rf = fc.degree * fc.F.eval(u);
                if (rf == 0.0 || !std::isfinite(wf / rf))
                    throw NonFiniteDerivativeError(fmt::format("{}: indicator vanishes at sample", fc.name));
                return phi - (wf / rf) * u.v;
            }};
}

VlasovField add_radial(const VlasovField& w, const BundleScalar& k, std::string label) {
    if (label.empty()) label = w.label + "+(" + k.name + ")R";
    return {label, [w, k](const PhasePoint& u) -> Vec { return w.phi(u) + k.eval(u) * u.v; }};
}

double compatibility_defect(const VlasovField& w, const BundleScalar& f, const std::vector<PhasePoint>& samples) {
    double m = 0.0;
    for (const auto& u : samples) m = std::max(m, std::abs(apply_field(w, f, u)) / std::max(1.0, std::abs(f.eval(u))));
    return m;
}

BracketReport bracket_defect(const VlasovField& w, const std::vector<PhasePoint>& samples, double tol) {
    BracketReport r;
    for (const auto& u : samples) {
        const double s = fiber_step(u.v) / inf_norm(u.v);
        const Vec phi = w.phi(u);
        const Vec rphi = (w.phi(u.scaled(1 + s)) - w.phi(u.scaled(1 - s))) / (2 * s);
        if (!rphi.allFinite()) throw NonFiniteDerivativeError(w.label + ": non-finite radial derivative");
        const double d = inf_norm(rphi - 2.0 * phi);
        r.max_abs = std::max(r.max_abs, d);
        r.max_rel = std::max(r.max_rel, d / std::max(1.0, inf_norm(phi)));
    }
    r.pass = !samples.empty() && r.max_rel < tol;
    return r;
}

HomogeneityReport radial_quadraticity(const VlasovField& w, const std::vector<PhasePoint>& samples, double tol) {
    HomogeneityReport rep;
    rep.samples = samples.size();
    for (const auto& u : samples) {
        const Vec base = w.phi(u);
        const double scale = std::max(inf_norm(base), 1e-300);
        for (double lam : {0.5, 2.0}) {
            const Vec expected = lam * lam * base;
            const double e = inf_norm(w.phi(u.scaled(lam)) - expected) / (lam * lam * scale);
            const double err = inf_norm(base) == 0.0 && inf_norm(w.phi(u.scaled(lam))) == 0.0 ? 0.0 : e;
            if (!(err <= rep.max_rel_error)) {
                rep.max_rel_error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
                rep.worst_lambda = lam;
            }
        }
    }
    rep.pass = !samples.empty() && rep.max_rel_error < tol;
    return rep;
}

VlasovBivector bivector_from_field(const VlasovField& w) { return {w}; }

Vec pairing(const VlasovBivector& psi, const BundleScalar& f, const PhasePoint& u) {
    const int n = u.dim();
    const BundleGradient g = gradient_of(f, u);
    const Vec phi = psi.representative.phi(u);
    const double rf = u.v.dot(g.dv);
    const double wf = u.v.dot(g.dx) + phi.dot(g.dv);
    Vec out(2 * n);
    out.head(n) = rf * u.v;
    out.tail(n) = rf * phi - wf * u.v;
    return out;
}

VlasovField field_from_bivector(const VlasovBivector& psi, const KinematicIndicator& f) {
    const KinematicIndicator fc = f;
    return {"W_" + f.name + "[" + psi.representative.label + "]", [psi, fc](const PhasePoint& u) -> Vec {
                const int n = u.dim();
                const double kf = fc.degree * fc.F.eval(u);
                if (kf == 0.0) throw NonFiniteDerivativeError(fmt::format("{}: indicator vanishes", fc.name));
                return pairing(psi, fc.F, u).tail(n) / kf;
            }};
}

namespace {

double least_squares_k(const Vec& d, const Vec& v) { return d.dot(v) / v.dot(v); }

} // namespace

ProjectiveReport projectively_equivalent(const VlasovField& w1, const VlasovField& w2,
                                         const std::vector<PhasePoint>& samples) {
    ProjectiveReport r;
    bool parallel = !samples.empty();
    for (const auto& u : samples) {
        const Vec p1 = w1.phi(u);
        const Vec d = w2.phi(u) - p1;
        const double k = least_squares_k(d, u.v);
        r.k_values.push_back(k);
        const double scale = std::max(1.0, inf_norm(p1));
        const double res = inf_norm(d - k * u.v) / scale;
        r.max_residual = std::max(r.max_residual, res);
        if (!(res < 1e-9)) parallel = false;

        // Natural scale of k at u: |phi| / |v|.
        const double kscale = scale / inf_norm(u.v);
        for (double lam : {0.5, 2.0}) {
            const PhasePoint ul = u.scaled(lam);
            const double kl = least_squares_k(w2.phi(ul) - w1.phi(ul), ul.v);
            const double err = std::abs(kl - lam * k) / (std::abs(lam) * std::max(std::abs(k), kscale));
            r.max_k_homogeneity_error = std::max(r.max_k_homogeneity_error, err);
        }
    }
    r.k_homogeneity_pass = !samples.empty() && r.max_k_homogeneity_error < 1e-8;
    r.pass = parallel && r.k_homogeneity_pass;
    return r;
}

bool bivectors_equal(const VlasovBivector& a, const VlasovBivector& b, const std::vector<PhasePoint>& samples) {
    return projectively_equivalent(a.representative, b.representative, samples).pass;
}

bool wedge_pair_equal(const Vec& x1, const Vec& x2, const Vec& y1, const Vec& y2, double tol) {
    const Mat a = x1 * x2.transpose() - x2 * x1.transpose();
    const Mat b = y1 * y2.transpose() - y2 * y1.transpose();
    const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
    return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace spraykit
