#include "spraykit/density.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spraykit/sampling.hpp"

namespace spraykit {

std::string DomainTag::str() const {
    return on_E ? fmt::format("on_E({},{})", indicator, level) : std::string("on_U");
}

double ParticleEnsemble::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

ParticleEnsemble project_to_domain(const ParticleEnsemble& ens, const KinematicIndicator& f, double a) {
    ParticleEnsemble out = ens;
    const bool even = f.degree % 2 == 0;
    for (auto& u : out.samples) {
        const double fv = f.F.eval(u);
        double lam;
        if (even) {
            if (!(fv > 0) || !(a > 0))
                throw SignError(fmt::format("{}: non-positive value {:.6g} for even degree", f.name, fv));
            if (f.orientation && f.orientation(u) != 1)
                throw SignError(fmt::format("{}: past-pointing sample cannot be gated onto the domain", f.name));
            lam = std::pow(a / fv, 1.0 / f.degree);
        } else {
            const double r = a / fv;
            lam = std::copysign(std::pow(std::abs(r), 1.0 / f.degree), r);
        }
        if (!std::isfinite(lam)) throw SignError(fmt::format("{}: indicator vanishes on a sample", f.name));
        u.v *= lam;
    }
    out.tag = {true, f.name, a};
    return out;
}

AdvectResult advect(const ParticleEnsemble& ens, const VlasovField& w, double dt, int steps,
                    const KinematicIndicator* tagged, unsigned threads, double retain_tol) {
    AdvectResult r;
    const bool check_tag = tagged && ens.tag.on_E;
    if (check_tag) r.compatibility_defect = compatibility_defect(w, tagged->F, ens.samples);

    const auto paths = integrate_batch(w, ens.samples, 0.0, dt, steps, threads);
    r.ensemble.tag = ens.tag;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (paths[i].truncated) {
            r.dropped.push_back(i);
            r.dropped_weight += ens.weights[i];
            continue;
        }
        r.ensemble.samples.push_back(paths[i].points.back());
        r.ensemble.weights.push_back(ens.weights[i]);
    }
    if (check_tag) {
        for (const auto& u : r.ensemble.samples)
            r.max_indicator_drift = std::max(r.max_indicator_drift, std::abs(tagged->F.eval(u) - ens.tag.level));
        r.tag_retained = r.compatibility_defect < 1e-8 && r.max_indicator_drift < retain_tol;
    }
    if (!r.tag_retained) r.ensemble.tag = DomainTag{};
    return r;
}

ParticleEnsemble seed_from_analytic(const SpacetimeModel& model, const AnalyticDensity& f, std::size_t count,
                                    std::uint64_t seed, const SeedOptions& opts) {
    const int n = model.dim;
    const int d = n - 1;
    if (opts.x_lo.size() != d || opts.x_hi.size() != d || f.v_lo.size() != d || f.v_hi.size() != d)
        throw ConfigError("seed_from_analytic: boxes must have n-1 components");
    CounterRng rng(seed);
    double volume = 1.0;
    for (int i = 0; i < d; ++i) volume *= (opts.x_hi[i] - opts.x_lo[i]) * (f.v_hi[i] - f.v_lo[i]);

    auto propose = [&](std::uint64_t idx, PhasePoint& u) {
        Vec x(n), s(d);
        x[0] = opts.t0;
        for (int i = 0; i < d; ++i) {
            x[i + 1] = opts.x_lo[i] + rng.uniform(idx, i) * (opts.x_hi[i] - opts.x_lo[i]);
            s[i] = f.v_lo[i] + rng.uniform(idx, d + i) * (f.v_hi[i] - f.v_lo[i]);
        }
        u.x = x;
        u.v = complete_velocity(model, f.domain, x, s, f.domain.level);
        const Mat g = metric_at(model, x);
        const double lower0 = g.row(0).dot(u.v);
        return f.f(u) * u.v[0] * std::sqrt(-g.determinant()) / std::abs(lower0);
    };

    double peak = 0.0, sum = 0.0;
    std::uint64_t idx = 0;
    for (; idx < opts.pilot; ++idx) {
        PhasePoint u;
        const double rho = propose(idx, u);
        peak = std::max(peak, rho);
        sum += rho;
    }
    if (!(peak > 0)) throw DegenerateDensityError(fmt::format("{}: density vanishes on the sampling region", f.name));
    // A proposal above the envelope raises it and restarts acceptance; the result stays deterministic.
    ParticleEnsemble ens;
    double envelope = 1.25 * peak;
    const std::uint64_t limit = opts.pilot + 10000 * static_cast<std::uint64_t>(std::max<std::size_t>(count, 1));
    for (bool done = false; !done;) {
        done = true;
        ens = ParticleEnsemble{};
        ens.tag = {true, f.domain.name, f.domain.level};
        idx = opts.pilot;
        double main_sum = 0.0;
        while (ens.samples.size() < count) {
            if (idx >= limit) throw DegenerateDensityError(fmt::format("{}: rejection sampler stalled", f.name));
            PhasePoint u;
            const double rho = propose(idx, u);
            main_sum += rho;
            ++idx;
            if (rho > envelope) {
                envelope = 1.25 * rho;
                done = false;
                break;
            }
            if (rng.uniform(idx - 1, 2 * d) * envelope < rho) ens.samples.push_back(std::move(u));
        }
        if (done) sum += main_sum;
    }
    const double integral = volume * sum / static_cast<double>(idx);
    ens.weights.assign(ens.samples.size(), count ? integral / static_cast<double>(count) : 0.0);
    return ens;
}

} // namespace spraykit
