#include <doctest.h>

#include <cmath>

#include "spraykit/sampling.hpp"
#include "spraykit/vlasov.hpp"

using namespace spraykit;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

std::vector<PhasePoint> samples_for(const SpacetimeModel& m, std::size_t count = 100, std::uint64_t seed = 17) {
    return sample_bundle(m, default_phase_box(m), BundleKind::Timelike, count, seed).points;
}

} // namespace

TEST_CASE("geodesic_field") {
    const SpacetimeModel mk = minkowski(4);
    for (const auto& u : samples_for(mk, 10)) CHECK(geodesic_field(mk)(u) == Vec::Zero(4));

    const SpacetimeModel s = schwarzschild(1.0);
    const Vec phi = geodesic_field(s)({vec({0, 10, 1.0, 0}), vec({1, 0, 0, 0})});
    CHECK(std::abs(phi[1] - (-0.008)) < 1e-6);

    CHECK(radial_quadraticity(geodesic_field(minkowski_nonmetric(0.05, 0.5)), samples_for(mk)).pass);
}

TEST_CASE("lorentz_field") {
    const SpacetimeModel mk = minkowski(4);
    for (const auto& u : samples_for(mk, 20)) CHECK(lorentz_field(mk)(u) == geodesic_field(mk)(u));

    const double e0 = 0.3, qm = 1.7;
    const SpacetimeModel me = minkowski_electric(e0, qm);
    const Vec phi = lorentz_field(me)({vec({0.2, 1, -1, 3}), vec({1, 0, 0, 0})});
    CHECK(std::abs(phi[1] - qm * e0) < 1e-12);
    CHECK(std::abs(phi[0]) < 1e-12);

    CHECK(radial_quadraticity(lorentz_field(me), samples_for(me)).pass);
    CHECK_THROWS_AS(lorentz_field(me)({Vec::Zero(4), vec({0.5, 1, 0, 0})}), NonTimelikeError);
}

TEST_CASE("kinematic indicators") {
    const SpacetimeModel mk = minkowski(4);
    const auto fh = indicator_hyperboloid(mk);
    const auto fl = indicator_hyperboloid_linear(mk);
    CHECK(fh({Vec::Zero(4), vec({1, 0, 0, 0})}) == 1.0);
    CHECK(fh({Vec::Zero(4), vec({2, 0, 0, 0})}) == 4.0);
    CHECK(fl({Vec::Zero(4), vec({2, 0, 0, 0})}) == 2.0);
    CHECK(indicator_hyperboloid(schwarzschild(1.0))({vec({0, 10, 1, 0}), vec({1, 0, 0, 0})}) ==
          doctest::Approx(0.8).epsilon(1e-15));

    CHECK(indicator_labtime(mk)({Vec::Zero(4), vec({1, 2, 0, 0})}) == 1.0);
    BaseScalar t;
    t.name = "t+0.1x";
    t.value = [](const Vec& x) { return x[0] + 0.1 * x[1]; };
    const SpacetimeModel tilted = with_labtime(mk, t);
    CHECK(indicator_labtime(tilted)({Vec::Zero(4), vec({1, 2, 0, 0})}) == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(check_homogeneity(indicator_labtime(tilted).F, 1, samples_for(mk)).pass);

    SpacetimeModel bare = mk;
    bare.labtime.reset();
    CHECK_THROWS_AS(indicator_labtime(bare), MissingLabTimeError);

    CHECK(indicator_coordinate(mk)({Vec::Zero(4), vec({1, 2, 0, 0})}) == 5.0);
    CHECK(check_homogeneity(indicator_coordinate(mk).F, 2, samples_for(mk), true).pass);

    // Non-vanishing on the bundle samples.
    for (const auto& u : samples_for(mk))
        for (const auto& k : {fh, fl, indicator_labtime(mk), indicator_coordinate(mk)}) CHECK(k(u) != 0.0);
}

TEST_CASE("exact indicator gradients match central differences") {
    const SpacetimeModel s = schwarzschild(1.0);
    const PhasePoint u{vec({0, 9, 1.1, 0.2}), vec({1.3, 0.1, 0.01, -0.02})};
    for (const auto& k : {indicator_hyperboloid(s), indicator_hyperboloid_linear(s), indicator_labtime(s),
                          indicator_coordinate(s)}) {
        BundleScalar fd = k.F;
        fd.gradient = nullptr;
        const BundleGradient a = gradient_of(k.F, u), b = gradient_of(fd, u);
        CHECK(inf_norm(a.dx - b.dx) < 1e-6);
        CHECK(inf_norm(a.dv - b.dv) < 1e-6);
    }
}

TEST_CASE("complete_velocity lands on the level set") {
    const SpacetimeModel s = schwarzschild(1.0);
    const Vec x = vec({0, 8, 1.0, 0});
    const Vec sp = vec({0.1, 0.01, 0.02});
    for (const auto& k : {indicator_hyperboloid(s), indicator_labtime(s), indicator_coordinate(s)}) {
        const Vec v = complete_velocity(s, k, x, sp, 2.0);
        CHECK(k({x, v}) == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(v[0] > 0);
        KinematicIndicator generic = k;
        generic.complete = nullptr;
        const Vec w = complete_velocity(s, generic, x, sp, 2.0);
        CHECK(std::abs(w[0] - v[0]) < 1e-12);
    }
}

TEST_CASE("transform_to_domain") {
    const SpacetimeModel mk = minkowski(4);
    const VlasovField g = geodesic_field(mk);
    const VlasovField gt = transform_to_domain(g, indicator_labtime(mk));
    for (const auto& u : samples_for(mk, 20)) CHECK(gt(u) == g(u));

    const double e0 = 0.25, qm = 0.8;
    const SpacetimeModel me = minkowski_electric(e0, qm);
    const VlasovField lf = lorentz_field(me);
    const KinematicIndicator lab = indicator_labtime(me);
    const VlasovField lt = transform_to_domain(lf, lab);
    for (const auto& u : samples_for(me)) {
        // Lab-time coefficients written out: phi - ((q/m) sigma sqrt(F_H) (g^-1 F v)^0 - Gamma^0 v v) v / v^0.
        const double fh = u.v[0] * u.v[0] - u.v.tail(3).squaredNorm();
        Vec force = Vec::Zero(4);
        force[0] = -(-e0) * u.v[1];  // g^{00} F_{01} v^1
        force[1] = e0 * u.v[0];      // g^{11} F_{10} v^0
        const Vec phi = qm * std::sqrt(fh) * force;
        const Vec expect = phi - (qm * std::sqrt(fh) * force[0]) * u.v / u.v[0];
        CHECK(inf_norm(lt(u) - expect) < 1e-10);
        CHECK(inf_norm(lf(u) - phi) < 1e-12);
    }
    // Idempotence.
    const VlasovField lt2 = transform_to_domain(lt, lab);
    for (const auto& u : samples_for(me, 30)) CHECK(inf_norm(lt2(u) - lt(u)) < 1e-10);
    CHECK(bracket_defect(lt, samples_for(me)).pass);
}

TEST_CASE("compatibility_defect") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const auto ss = samples_for(me);
    CHECK(compatibility_defect(lorentz_field(me), indicator_hyperboloid(me).F, ss) < 1e-8);

    const SpacetimeModel nm = minkowski_nonmetric(0.05, 0.5);
    const auto sn = samples_for(nm);
    const VlasovField g = geodesic_field(nm);
    const KinematicIndicator fh = indicator_hyperboloid(nm);
    CHECK(compatibility_defect(g, fh.F, sn) > 1e-3);
    for (const auto& u : sn) {
        // W<F_H> = -Q(v, v, v) along the non-metric geodesic field.
        const double q = nonmetricity_at(nm, u.x).contract3(u.v, u.v, u.v);
        CHECK(std::abs(apply_field(g, fh.F, u) + q) < 1e-6);
    }
    for (const auto& k : {indicator_hyperboloid(me), indicator_labtime(me), indicator_coordinate(me)})
        CHECK(compatibility_defect(transform_to_domain(lorentz_field(me), k), k.F, ss) < 1e-9);
}

TEST_CASE("bracket_defect") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const auto ss = samples_for(me);
    CHECK(bracket_defect(lorentz_field(me), ss).pass);
    VlasovField quad{"v|v|", [](const PhasePoint& u) -> Vec { return u.v * u.v.norm(); }};
    CHECK(bracket_defect(quad, ss).pass);
    VlasovField lin{"v", [](const PhasePoint& u) -> Vec { return u.v; }};
    const auto r = bracket_defect(lin, ss);
    CHECK_FALSE(r.pass);
    // Defect equals |phi| for the degree-1 field.
    double worst = 0.0;
    for (const auto& u : ss) worst = std::max(worst, inf_norm(u.v));
    CHECK(r.max_abs == doctest::Approx(worst).epsilon(1e-6));
}

TEST_CASE("bivectors and projective equivalence") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const auto ss = samples_for(me);
    const VlasovField w = lorentz_field(me);
    const KinematicIndicator fl = indicator_hyperboloid_linear(me);
    const VlasovField w2 = add_radial(w, fl.F);

    const ProjectiveReport r = projectively_equivalent(w, w2, ss);
    CHECK(r.pass);
    for (std::size_t i = 0; i < ss.size(); ++i) CHECK(std::abs(r.k_values[i] - fl(ss[i])) < 1e-10);

    CHECK_FALSE(projectively_equivalent(geodesic_field(me), w, ss).pass);
    const ProjectiveReport self = projectively_equivalent(w, w, ss);
    CHECK(self.pass);
    for (double k : self.k_values) CHECK(k == 0.0);

    CHECK(bivectors_equal(bivector_from_field(w), bivector_from_field(w2), ss));

    // Compatible field from the bivector.
    const KinematicIndicator fh = indicator_hyperboloid(me);
    const VlasovField wh = field_from_bivector(bivector_from_field(w), fh);
    CHECK(compatibility_defect(wh, fh.F, ss) < 1e-8);

    // Round trip against transform_to_domain, for several indicators.
    for (const auto& k : {fh, indicator_labtime(me), indicator_coordinate(me), fl}) {
        const VlasovField a = field_from_bivector(bivector_from_field(w), k);
        const VlasovField b = transform_to_domain(w, k);
        for (const auto& u : ss) CHECK(inf_norm(a(u) - b(u)) <= 1e-12);
    }

    // Coordinate based field: (R<F> X - X<F> R) / (2 F) with F = sum v^2, written out directly.
    const VlasovField wc = field_from_bivector(bivector_from_field(w2), indicator_coordinate(me));
    for (const auto& u : ss) {
        const Vec x = w2(u);
        const double f = u.v.squaredNorm();
        const Vec expect = (2 * f * x - 2 * u.v.dot(x) * u.v) / (2 * f);
        CHECK(inf_norm(wc(u) - expect) < 1e-12);
        // Its horizontal part is exactly v: R<F_crd>/(2 F_crd) = 1.
        const Vec pair = pairing(bivector_from_field(w2), indicator_coordinate(me).F, u);
        CHECK(inf_norm(pair.head(4) / (2 * f) - u.v) < 1e-14);
    }
}

TEST_CASE("bivector equality is an equivalence relation on a catalog of fields") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const auto ss = samples_for(me, 40);
    const VlasovField w = lorentz_field(me);
    std::vector<VlasovBivector> fields{
        bivector_from_field(w),
        bivector_from_field(add_radial(w, indicator_hyperboloid_linear(me).F)),
        bivector_from_field(transform_to_domain(w, indicator_labtime(me))),
        bivector_from_field(geodesic_field(me)),
        bivector_from_field(transform_to_domain(geodesic_field(me), indicator_coordinate(me))),
    };
    const std::size_t k = fields.size();
    std::vector<std::vector<bool>> eq(k, std::vector<bool>(k));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) eq[a][b] = bivectors_equal(fields[a], fields[b], ss);
    for (std::size_t a = 0; a < k; ++a) {
        CHECK(eq[a][a]);
        for (std::size_t b = 0; b < k; ++b) {
            CHECK(eq[a][b] == eq[b][a]);
            for (std::size_t c = 0; c < k; ++c)
                if (eq[a][b] && eq[b][c]) CHECK(eq[a][c]);
        }
    }
    CHECK(eq[0][1]);
    CHECK(eq[0][2]);
    CHECK(eq[3][4]);
    CHECK_FALSE(eq[0][3]);
}

TEST_CASE("wedge_pair_equal") {
    CounterRng rng(3);
    Vec x1(8), x2(8);
    for (int i = 0; i < 8; ++i) {
        x1[i] = rng.uniform(0, i) - 0.5;
        x2[i] = rng.uniform(1, i) - 0.5;
    }
    CHECK(wedge_pair_equal(x1, x2, x1, x2));
    CHECK(wedge_pair_equal(x1, x2, 2 * x1, 0.5 * x2));
    CHECK_FALSE(wedge_pair_equal(x1, x2, 2 * x1, x2));
    // Random determinant-one family.
    for (int t = 0; t < 50; ++t) {
        const double a = rng.uniform(t, 20) * 2 - 1, b = rng.uniform(t, 21) * 2 - 1, c = rng.uniform(t, 22) * 2 - 1;
        if (std::abs(a) < 0.1) continue;
        const double d = (1 + b * c) / a;
        CHECK(wedge_pair_equal(x1, x2, a * x1 + b * x2, c * x1 + d * x2));
        CHECK_FALSE(wedge_pair_equal(x1, x2, a * x1 + b * x2, 1.5 * (c * x1 + d * x2)));
    }
}
