#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spraykit/trajectories.hpp"

namespace spraykit {

struct DomainTag {
    bool on_E = false;
    std::string indicator;
    double level = 1.0;

    std::string str() const;
};

struct ParticleEnsemble {
    std::vector<PhasePoint> samples;
    std::vector<double> weights;
    DomainTag tag;

    std::size_t size() const { return samples.size(); }
    double total_weight() const;
};

// f_E on a kinematic domain, with a bounded box for the spatial velocity components.
struct AnalyticDensity {
    std::string name;
    std::function<double(const PhasePoint&)> f;
    KinematicIndicator domain;
    Vec v_lo;
    Vec v_hi;
};

// Scales each sample onto {F = a}; even degree requires F > 0 and a future-pointing sample.
ParticleEnsemble project_to_domain(const ParticleEnsemble& ens, const KinematicIndicator& f, double a);

struct AdvectResult {
    ParticleEnsemble ensemble;
    std::vector<std::size_t> dropped;   // indices into the input ensemble
    double dropped_weight = 0.0;
    double max_indicator_drift = 0.0;   // max |F - level| after advection, when the input was tagged
    double compatibility_defect = 0.0;  // W<F> at the input samples, when the input was tagged
    bool tag_retained = false;
};

// Moves every sample along W for parameter span dt. Weights are never modified.
// `tagged` is the indicator the input tag refers to; the tag survives only when W is compatible
// with it and the samples stay within `retain_tol` of the level.
AdvectResult advect(const ParticleEnsemble& ens, const VlasovField& w, double dt, int steps,
                    const KinematicIndicator* tagged = nullptr, unsigned threads = 0, double retain_tol = 1e-7);

struct SeedOptions {
    Vec x_lo;      // spatial position box, n-1 components
    Vec x_hi;
    double t0 = 0.0;
    std::size_t pilot = 4096;
};

// Rejection sampling of f_E against the coordinate-time slice density f v^0 sqrt(-det g) / |v_0|.
ParticleEnsemble seed_from_analytic(const SpacetimeModel& model, const AnalyticDensity& f, std::size_t count,
                                    std::uint64_t seed, const SeedOptions& opts);

} // namespace spraykit
