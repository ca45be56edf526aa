#include <doctest.h>

#include <cmath>

#include "spraykit/sampling.hpp"
#include "spraykit/trajectories.hpp"

using namespace spraykit;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

PhasePoint at_rest() { return {Vec::Zero(4), vec({1, 0, 0, 0})}; }

// Hyperbolic motion under a constant field with proper acceleration a.
Vec hyperbolic(double a, double tau) { return vec({std::sinh(a * tau) / a, (std::cosh(a * tau) - 1) / a, 0, 0}); }

double end_error(double a, int steps) {
    const SpacetimeModel m = minkowski_electric(a, 1.0);
    const Prolongation p = integrate(lorentz_field(m), at_rest(), 0.0, 1.0, steps);
    return (p.points.back().x - hyperbolic(a, 1.0)).norm();
}

} // namespace

TEST_CASE("integrate: straight lines and hyperbolic motion") {
    const SpacetimeModel mk = minkowski(4);
    const Prolongation p = integrate(geodesic_field(mk), {Vec::Zero(4), vec({1, 0.5, 0, 0})}, 0.0, 1.0, 50);
    REQUIRE(p.size() == 51);
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK((p.points[i].x - p.params[i] * vec({1, 0.5, 0, 0})).norm() < 1e-12);
    CHECK(p.field_label == "geodesic");

    CHECK(end_error(0.1, 1000) < 1e-8);
}

TEST_CASE("RK4 step halving") {
    const double ratio = end_error(1.0, 40) / end_error(1.0, 80);
    CHECK(ratio >= 14);
    CHECK(ratio <= 18);
}

TEST_CASE("prolongation property") {
    const SpacetimeModel m = minkowski_electric(0.5, 1.0);
    const int steps = 200;
    const Prolongation p = integrate(lorentz_field(m), at_rest(), 0.0, 1.0, steps);
    const double dt = 1.0 / steps;
    CHECK(prolongation_defect(p) < 10 * dt * dt);
}

TEST_CASE("chart exit truncates") {
    const SpacetimeModel s = schwarzschild(1.0);
    // Radial infall from r = 3 reaches the horizon bound.
    const PhasePoint u{vec({0, 3, 1.5, 0}), vec({2.0, -1.0, 0, 0})};
    const Prolongation p = integrate(geodesic_field(s), u, 0.0, 20.0, 2000);
    CHECK(p.truncated);
    CHECK(p.size() < 2001);
    ChartBounds box{vec({-10, -0.5, -10, -10}), vec({10, 0.5, 10, 10})};
    const Prolongation q = integrate(geodesic_field(minkowski(4)), {Vec::Zero(4), vec({1, 1, 0, 0}) * 0.9}, 0, 2, 100,
                                     &box);
    CHECK(q.truncated);
    for (const auto& pt : q.points) CHECK(box.contains(pt.x));
}

TEST_CASE("non-finite state throws") {
    VlasovField blow{"blow", [](const PhasePoint& u) -> Vec { return 1e300 * u.v.cwiseProduct(u.v); }};
    CHECK_THROWS_AS(integrate(blow, {Vec::Zero(2), vec({1, 1})}, 0, 1, 10), NonFiniteStateError);
}

TEST_CASE("batch integration preserves input order") {
    const SpacetimeModel m = minkowski_electric(0.2, 1.0);
    const auto s = sample_bundle(m, default_phase_box(m), BundleKind::Timelike, 16, 4).points;
    const VlasovField w = lorentz_field(m);
    const auto batch = integrate_batch(w, s, 0, 1, 50, 4);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Prolongation single = integrate(w, s[i], 0, 1, 50);
        CHECK(batch[i].points.back().x == single.points.back().x);
    }
}

TEST_CASE("reparameterize") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const Prolongation p = integrate(lorentz_field(me), at_rest(), 0.0, 1.0, 400);
    const BundleScalar zero{"0", [](const PhasePoint&) { return 0.0; }, 1, nullptr};
    const Prolongation same = reparameterize(p, zero);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::abs(same.params[i] - p.params[i]) < 1e-12);
        CHECK((same.points[i].x - p.points[i].x).norm() < 1e-12);
        CHECK((same.points[i].v - p.points[i].v).norm() < 1e-12);
    }

    // Geodesic with k = sigma sqrt(F_H) = c0 constant: s(t) = (1 - exp(-c0 t)) / c0.
    const SpacetimeModel mk = minkowski(4);
    const PhasePoint u{Vec::Zero(4), vec({1.5, 0.3, -0.2, 0.1})};
    const double c0 = std::sqrt(1.5 * 1.5 - 0.09 - 0.04 - 0.01);
    const Prolongation g = integrate(geodesic_field(mk), u, 0.0, 1.0, 200);
    const Reparameterization r = reparameterize_detailed(g, indicator_hyperboloid_linear(mk).F);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(r.s_of_t[i] - (1 - std::exp(-c0 * g.params[i])) / c0) < 1e-8);

    // Against direct integration of W + kR.
    const KinematicIndicator fl = indicator_hyperboloid_linear(me);
    const VlasovField w = lorentz_field(me);
    const PhasePoint u0{Vec::Zero(4), vec({1.2, 0.4, 0.1, 0})};
    const Prolongation pw = integrate(w, u0, 0.0, 1.0, 1000);
    const Reparameterization rw = reparameterize_detailed(pw, fl.F);
    const Prolongation direct = integrate(add_radial(w, fl.F), u0, 0.0, rw.s_of_t.back(), 1000);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
        worst = std::max(worst, (direct.points[i].x - rw.curve.points[i].x).norm());
    CHECK(worst < 1e-6);
    CHECK(prolongation_defect(rw.curve) < 10 * 1e-6);
}

TEST_CASE("reparameterize rejects a collapsing parameter") {
    const SpacetimeModel mk = minkowski(4);
    const Prolongation g = integrate(geodesic_field(mk), {Vec::Zero(4), vec({1, 0, 0, 0})}, 0.0, 1.0, 10);
    // s' = 1 - t / 0.5 crosses zero; k = 1/(0.5 - t) realised through the path coordinate.
    const BundleScalar k{"blowup", [](const PhasePoint& u) { return 1.0 / (0.5 - u.x[0]) * u.v[0]; }, 1, nullptr};
    CHECK_THROWS_AS(reparameterize(g, k), ReparamDegenerateError);
}

TEST_CASE("magic formula: transformed trajectories match as point sets") {
    const SpacetimeModel me = minkowski_electric(0.4, 1.0);
    const VlasovField w = lorentz_field(me);
    const PhasePoint u0{vec({0, 0.1, 0, 0}), vec({1.1, 0.3, 0.2, -0.1})};
    for (const auto& f : {indicator_hyperboloid(me), indicator_labtime(me), indicator_coordinate(me)}) {
        PhasePoint start = u0;
        start.v *= std::pow(f.level / f(u0), 1.0 / f.degree);
        const VlasovField wh = transform_to_domain(w, f);
        BundleScalar k{"k", [&](const PhasePoint& u) { return -apply_field(w, f.F, u) / (f.degree * f(u)); }, 1,
                       nullptr};
        const Prolongation pw = integrate(w, start, 0, 1, 1000);
        const Reparameterization r = reparameterize_detailed(pw, k);
        const Prolongation ph = integrate(wh, start, 0, r.s_of_t.back(), 1000);
        const CurveDistance d = compare_base_curves(pw, ph);
        CHECK(d.chordal < 1e-6);
        CHECK(d.hausdorff < 1e-6);
        const DriftSeries drift = indicator_drift(ph, f.F);
        CHECK(drift.max_deviation < 1e-9);
    }
}

TEST_CASE("indicator_drift") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const Prolongation p = integrate(lorentz_field(me), at_rest(), 0, 1, 1000);
    CHECK(indicator_drift(p, indicator_hyperboloid(me).F).max_deviation < 1e-8);

    const SpacetimeModel mk = minkowski(4);
    const Prolongation g = integrate(geodesic_field(mk), {Vec::Zero(4), vec({1, 0.5, 0, 0})}, 0, 1, 100);
    CHECK(indicator_drift(g, indicator_coordinate(mk).F).max_deviation < 1e-12);

    const SpacetimeModel nm = minkowski_nonmetric(0.05, 0.5);
    const Prolongation q = integrate(geodesic_field(nm), {vec({0, 0.3, 0, 0}), vec({1.0, 0.4, 0.2, 0})}, 0, 1, 1000);
    const DriftSeries d = indicator_drift(q, indicator_hyperboloid(nm).F);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Vec& v = q.points[i].v;
        const double oracle = -nonmetricity_at(nm, q.points[i].x).contract3(v, v, v);
        worst = std::max(worst, std::abs(d.rates[i] - oracle));
        scale = std::max(scale, std::abs(oracle));
    }
    CHECK(worst < 1e-5);
    CHECK(scale > 1e-3);
}

TEST_CASE("null lab-time defect") {
    const PhasePoint u0{vec({0, 0.3}), vec({1, 1})};
    const NullLabtimeReport ref = null_labtime_defect(minkowski(2), u0, 6.0, 6000);
    CHECK(ref.max_residual < 1e-10);
    CHECK(ref.reference_max_residual < 1e-10);

    const NullLabtimeReport r = null_labtime_defect(minkowski2_labtime(0.2), u0, 6.0, 6000);
    CHECK(r.max_residual > 1e-3);
    CHECK(r.max_oracle_gap < 1e-5);
    CHECK(r.reference_max_residual < 1e-10);
    // Closed form for s = t + 0.2 sin x along n = (1, 1): |C''| = sqrt(2) 0.2 |sin x| / (1 + 0.2 cos x)^3.
    for (std::size_t i = 1; i + 1 < r.params.size(); i += 500) {
        const double x = r.path.points[i].x[1];
        const double c = 1 + 0.2 * std::cos(x);
        CHECK(std::abs(r.oracle[i] - std::sqrt(2.0) * 0.2 * std::abs(std::sin(x)) / (c * c * c)) < 1e-12);
    }
    const NullLabtimeReport r2 = null_labtime_defect(minkowski2_labtime(0.2), u0, 6.0, 12000);
    CHECK(std::abs(r2.max_residual - r.max_residual) < 1e-3 * r.max_residual);
}

TEST_CASE("integrate_leaf") {
    const SpacetimeModel me = minkowski_electric(0.3, 1.0);
    const VlasovField w = lorentz_field(me);
    const PhasePoint u0{Vec::Zero(4), vec({1.2, 0.3, 0.1, 0})};
    std::vector<double> tg, lg;
    for (int i = 0; i <= 40; ++i) tg.push_back(0.025 * i);
    for (int j = 0; j <= 6; ++j) lg.push_back(0.5 + 0.25 * j);
    const Leaf leaf = integrate_leaf(bivector_from_field(w), u0, tg, lg);
    CHECK(leaf.tangent);
    CHECK(leaf.max_tangency_ratio < 1e-5);

    const Prolongation p = integrate(w, u0, 0, 1, 400);
    const std::size_t one = 2;
    REQUIRE(lg[one] == 1.0);
    for (std::size_t i = 0; i < tg.size(); ++i) CHECK((leaf.nodes[one][i].x - p.points[10 * i].x).norm() < 1e-14);
    for (std::size_t j = 0; j < lg.size(); ++j)
        for (std::size_t i = 0; i < tg.size(); ++i) {
            CHECK(leaf.nodes[j][i].x == leaf.nodes[one][i].x);
            CHECK((leaf.nodes[j][i].v - lg[j] * leaf.nodes[one][i].v).norm() < 1e-14);
        }

    // Projectively equivalent representative sweeps the same surface.
    const KinematicIndicator fl = indicator_hyperboloid_linear(me);
    const VlasovField w2 = add_radial(w, fl.F);
    const Reparameterization r = reparameterize_detailed(integrate(w, u0, 0, 1, 1000), fl.F);
    std::vector<double> tg2;
    for (int i = 0; i <= 40; ++i) tg2.push_back(r.s_of_t.back() * i / 40.0);
    const Leaf leaf2 = integrate_leaf(bivector_from_field(w2), u0, tg2, lg);
    CHECK(leaf2.max_tangency_ratio < 1e-5);
    CHECK(leaf_hausdorff(leaf, leaf2) < 1e-5);

    // A different bivector gives a different surface.
    const Leaf other = integrate_leaf(bivector_from_field(geodesic_field(me)), u0, tg, lg);
    CHECK(leaf_hausdorff(leaf, other) > 1e-3);
}
