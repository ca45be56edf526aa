#include <doctest.h>

#include <cmath>

#include "spraykit/sampling.hpp"
#include "spraykit/spray.hpp"

using namespace spraykit;

TEST_CASE("semi-spray to spray and back reproduces the coefficients") {
    SemiSpray k;
    k.label = "damped";
    k.dim = 4;
    k.coeffs = [](double s, const Vec& x, const Vec& u) -> Vec {
        Vec out(3);
        out << -0.3 * u[0] * u.squaredNorm() + std::sin(s), -x[1] + 0.1 * u[2], std::exp(-u[1] * u[1]) * x[0];
        return out;
    };
    const VlasovField w = spray_from_semispray(k);
    const SemiSpray back = semispray_from_spray(w, 4);
    CounterRng rng(5);
    for (int i = 0; i < 100; ++i) {
        const double s = rng.uniform(i, 0) * 2 - 1;
        Vec x(3), u(3);
        for (int a = 0; a < 3; ++a) {
            x[a] = rng.uniform(i, 1 + a) * 2 - 1;
            u[a] = rng.uniform(i, 4 + a) - 0.5;
        }
        CHECK(inf_norm(back.coeffs(s, x, u) - k.coeffs(s, x, u)) <= 1e-12);
    }
}

TEST_CASE("the constructed spray is radially quadratic and compatible with v^0") {
    SemiSpray k;
    k.label = "cubic";
    k.dim = 4;
    k.coeffs = [](double, const Vec& x, const Vec& u) -> Vec { return -x + u.cwiseProduct(u); };
    const VlasovField w = spray_from_semispray(k);
    const SpacetimeModel m = minkowski(4);
    const auto samples = sample_bundle(m, default_phase_box(m), BundleKind::Timelike, 100, 3).points;
    CHECK(radial_quadraticity(w, samples).pass);
    CHECK(compatibility_defect(w, indicator_labtime(m).F, samples) == 0.0);
}

TEST_CASE("restriction of a lab-time adapted Lorentz spray extends back to itself") {
    const SpacetimeModel m = minkowski_electric(0.2, 1.0);
    const VlasovField lt = transform_to_domain(lorentz_field(m), indicator_labtime(m));
    const VlasovField rebuilt = spray_from_semispray(semispray_from_spray(lt, 4));
    const auto samples = sample_bundle(m, default_phase_box(m), BundleKind::Timelike, 100, 9).points;
    for (const auto& u : samples) CHECK(inf_norm(rebuilt(u) - lt(u)) < 1e-12 * std::max(1.0, inf_norm(lt(u))));
}

TEST_CASE("quadratic_extension from the mass shell") {
    const SpacetimeModel m = minkowski_electric(0.2, 1.0);
    const VlasovField w = lorentz_field(m);
    const KinematicIndicator fh = indicator_hyperboloid(m);
    const VlasovField ext = quadratic_extension(w.phi, fh, "ext");
    const auto samples = sample_bundle(m, default_phase_box(m), BundleKind::Timelike, 50, 2).points;
    for (const auto& u : samples) CHECK(inf_norm(ext(u) - w(u)) < 1e-12);
}
