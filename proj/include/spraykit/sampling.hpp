#pragma once

#include <cstdint>
#include <vector>

#include "spraykit/phase_space.hpp"

namespace spraykit {

// Stateless counter-based generator: draw(i, j) depends only on (seed, i, j).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t index, std::uint64_t stream = 0) const;
    // Uniform on [0, 1).
    double uniform(std::uint64_t index, std::uint64_t stream = 0) const;
    double normal(std::uint64_t index, std::uint64_t stream = 0) const;
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t z);

// Radical inverse of `index` in base `base`.
double radical_inverse(std::uint64_t index, unsigned base);

struct PhaseBox {
    Vec x_lo, x_hi;
    Vec v_lo, v_hi;
};

struct SampleSet {
    std::vector<PhasePoint> points;
    std::uint64_t seed = 0;
    std::size_t proposals = 0;
};

// Halton points with a seeded Cranley-Patterson shift, kept when they satisfy the bundle predicate.
SampleSet sample_bundle(const SpacetimeModel& model, const PhaseBox& box, BundleKind kind, std::size_t count,
                        std::uint64_t seed, std::size_t max_proposals = 1'000'000);

// The model sample hint when present, else a box around the origin with future-directed velocities.
PhaseBox default_phase_box(const SpacetimeModel& model);

} // namespace spraykit
