#include "spraykit/phase_space.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spraykit {

const char* to_string(BundleKind kind) {
    switch (kind) {
    case BundleKind::Timelike: return "timelike";
    case BundleKind::All: return "all";
    case BundleKind::Null: return "null";
    }
    return "?";
}

BundleKind bundle_kind_from_string(const std::string& s) {
    if (s == "timelike") return BundleKind::Timelike;
    if (s == "all") return BundleKind::All;
    if (s == "null") return BundleKind::Null;
    throw ConfigError(fmt::format("unknown bundle kind '{}'", s));
}

bool in_bundle(const SpacetimeModel& model, const PhasePoint& u, BundleKind kind, double null_tol) {
    if (!model.bounds.contains(u.x) || inf_norm(u.v) == 0.0) return false;
    if (kind == BundleKind::All) return true;
    const double q = u.v.dot(metric_at(model, u.x) * u.v);
    if (kind == BundleKind::Timelike) return q < -kTimelikeEps;
    return std::abs(q) <= null_tol * std::max(1.0, u.v.squaredNorm());
}

double fiber_step(const Vec& v) { return 1e-6 * std::max(1.0, inf_norm(v)); }
double base_step(const Vec& x) { return 1e-6 * std::max(1.0, inf_norm(x)); }

BundleGradient gradient_of(const BundleScalar& g, const PhasePoint& u) {
    if (g.gradient) return g.gradient(u);
    const int n = u.dim();
    BundleGradient out{Vec(n), Vec(n)};
    const double hx = base_step(u.x), hv = fiber_step(u.v);
    for (int i = 0; i < n; ++i) {
        PhasePoint p = u, m = u;
        p.x[i] += hx;
        m.x[i] -= hx;
        out.dx[i] = (g.eval(p) - g.eval(m)) / (2 * hx);
        p = u;
        m = u;
        p.v[i] += hv;
        m.v[i] -= hv;
        out.dv[i] = (g.eval(p) - g.eval(m)) / (2 * hv);
    }
    if (!out.dx.allFinite() || !out.dv.allFinite())
        throw NonFiniteDerivativeError(fmt::format("{}: non-finite gradient", g.name));
    return out;
}

double scalar_lift(const BaseScalar& h, const PhasePoint& u) { return u.v.dot(h.grad(u.x)); }

BundleScalar lift(const BaseScalar& h) {
    BundleScalar s;
    s.name = "lift(" + h.name + ")";
    s.degree = 1;
    s.eval = [h](const PhasePoint& u) { return scalar_lift(h, u); };
    s.gradient = [h](const PhasePoint& u) {
        return BundleGradient{h.hess(u.x) * u.v, h.grad(u.x)};
    };
    return s;
}

BundleScalar pullback(const BaseScalar& h) {
    BundleScalar s;
    s.name = "pullback(" + h.name + ")";
    s.degree = 0;
    s.eval = [h](const PhasePoint& u) { return h.value(u.x); };
    s.gradient = [h](const PhasePoint& u) {
        return BundleGradient{h.grad(u.x), Vec::Zero(u.dim())};
    };
    return s;
}

double radial_derivative(const BundleScalar& g, const PhasePoint& u) {
    // d/ds G(x, (1+s) v) at s = 0, sampled at v +- h_v v/|v|_inf.
    const double hv = fiber_step(u.v);
    const double s = hv / inf_norm(u.v);
    const double d = (g.eval(u.scaled(1 + s)) - g.eval(u.scaled(1 - s))) / (2 * s);
    if (!std::isfinite(d)) throw NonFiniteDerivativeError(fmt::format("{}: non-finite radial derivative", g.name));
    return d;
}

int causal_indicator(const SpacetimeModel& model, const PhasePoint& u, BundleKind kind) {
    if (kind == BundleKind::All)
        throw NotTimeOrientableError("causal indicator undefined on the all-vectors bundle");
    const double q = u.v.dot(metric_at(model, u.x) * u.v);
    if (!(q < -kTimelikeEps))
        throw NonTimelikeError(fmt::format("causal indicator needs a timelike vector, g(v,v) = {:.6g}", q));
    const double tdot = model.time_orientation ? scalar_lift(*model.time_orientation, u) : u.v[0];
    return tdot > 0 ? 1 : -1;
}

HomogeneityReport check_homogeneity(const BundleScalar& g, int k, const std::vector<PhasePoint>& samples,
                                    bool include_reversal, double tol) {
    HomogeneityReport rep;
    rep.samples = samples.size();
    std::vector<double> lambdas{0.5, 2.0};
    if (include_reversal) lambdas.push_back(-1.0);
    for (const auto& u : samples) {
        const double base = g.eval(u);
        for (double lam : lambdas) {
            const double expected = std::pow(lam, k) * base;
            const double got = g.eval(u.scaled(lam));
            const double err = std::abs(got - expected) / std::max(std::abs(expected), 1e-300);
            const double e = (expected == 0.0 && got == 0.0) ? 0.0 : err;
            if (e > rep.max_rel_error || !std::isfinite(e)) {
                rep.max_rel_error = std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
                rep.worst_lambda = lam;
            }
        }
    }
    rep.pass = !samples.empty() && rep.max_rel_error < tol;
    return rep;
}

} // namespace spraykit
