#include "spraykit/sampling.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace spraykit {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t index, std::uint64_t stream) const {
    return splitmix64(splitmix64(splitmix64(seed_) ^ index) ^ (stream * 0xd6e8feb86659fd93ULL));
}

double CounterRng::uniform(std::uint64_t index, std::uint64_t stream) const {
    return static_cast<double>(bits(index, stream) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index, std::uint64_t stream) const {
    // Box-Muller on two decorrelated streams.
    const double u1 = 1.0 - uniform(index, 2 * stream + 1000003);
    const double u2 = uniform(index, 2 * stream + 1000004);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

namespace {

unsigned nth_prime(int k) {
    static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    return primes[k];
}

} // namespace

SampleSet sample_bundle(const SpacetimeModel& model, const PhaseBox& box, BundleKind kind, std::size_t count,
                        std::uint64_t seed, std::size_t max_proposals) {
    const int n = model.dim;
    if (2 * n > 16) throw ConfigError("sample_bundle supports dimension up to 8");
    CounterRng rng(seed);
    std::vector<double> shift(2 * n);
    for (int d = 0; d < 2 * n; ++d) shift[d] = rng.uniform(d, 7);

    SampleSet out;
    out.seed = seed;
    out.points.reserve(count);
    for (std::uint64_t i = 1; out.points.size() < count; ++i) {
        if (out.proposals >= max_proposals)
            throw ConfigError(fmt::format("sample_bundle: only {} of {} samples found in the box after {} proposals",
                                          out.points.size(), count, out.proposals));
        ++out.proposals;
        PhasePoint u{Vec(n), Vec(n)};
        for (int d = 0; d < 2 * n; ++d) {
            double q = radical_inverse(i, nth_prime(d)) + shift[d];
            q -= std::floor(q);
            if (d < n)
                u.x[d] = box.x_lo[d] + q * (box.x_hi[d] - box.x_lo[d]);
            else
                u.v[d - n] = box.v_lo[d - n] + q * (box.v_hi[d - n] - box.v_lo[d - n]);
        }
        if (in_bundle(model, u, kind)) out.points.push_back(std::move(u));
    }
    return out;
}

PhaseBox default_phase_box(const SpacetimeModel& model) {
    if (model.sample_hint) return {model.sample_hint->x_lo, model.sample_hint->x_hi, model.sample_hint->v_lo,
                                   model.sample_hint->v_hi};
    const int n = model.dim;
    PhaseBox b{Vec::Constant(n, -1.0), Vec::Constant(n, 1.0), Vec::Constant(n, -0.6), Vec::Constant(n, 0.6)};
    b.v_lo[0] = 0.8;
    b.v_hi[0] = 2.0;
    return b;
}

} // namespace spraykit
