#include <doctest.h>

#include <cmath>

#include "spraykit/geometry.hpp"
#include "spraykit/sampling.hpp"

using namespace spraykit;

namespace {

Vec pt(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

// Closed-form Schwarzschild Christoffels (t, r, theta, phi), hand-derived.
Tensor3 schwarzschild_gamma(double m, const Vec& x) {
    const double r = x[1], th = x[2];
    const double f = 1 - 2 * m / r;
    Tensor3 g(4);
    auto set = [&](int a, int b, int c, double v) {
        g(a, b, c) = v;
        g(a, c, b) = v;
    };
    set(0, 0, 1, m / (r * (r - 2 * m)));
    set(1, 0, 0, m * f / (r * r));
    set(1, 1, 1, -m / (r * (r - 2 * m)));
    set(1, 2, 2, -(r - 2 * m));
    set(1, 3, 3, -(r - 2 * m) * std::sin(th) * std::sin(th));
    set(2, 1, 2, 1 / r);
    set(2, 3, 3, -std::sin(th) * std::cos(th));
    set(3, 1, 3, 1 / r);
    set(3, 2, 3, std::cos(th) / std::sin(th));
    return g;
}

std::vector<Vec> chart_points(const SpacetimeModel& m, int count, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
        Vec x(m.dim);
        for (int k = 0; k < m.dim; ++k) x[k] = -2 + 4 * rng.uniform(i, k);
        if (m.name == "schwarzschild") {
            x[1] = 4 + 20 * rng.uniform(i, 1);
            x[2] = 0.3 + 2.5 * rng.uniform(i, 2);
        }
        out.push_back(x);
    }
    return out;
}

std::vector<SpacetimeModel> catalog() {
    return {minkowski(2), minkowski(4), schwarzschild(1.0), minkowski_electric(0.1, 1.0),
            minkowski_nonmetric(0.05, 0.5), minkowski2_labtime(0.2)};
}

} // namespace

TEST_CASE("metric_at evaluates the catalog metrics") {
    const Mat g = metric_at(minkowski(4), Vec::Zero(4));
    Mat eta = Mat::Identity(4, 4);
    eta(0, 0) = -1;
    CHECK(g == eta);

    const Mat gs = metric_at(schwarzschild(1.0), pt({0, 10, 1.2, 0.3}));
    CHECK(gs(0, 0) == doctest::Approx(-0.8).epsilon(1e-15));

    const SpacetimeModel m = minkowski(4);
    for (const Vec& x : chart_points(m, 10, 3)) CHECK(metric_at(m, x) == g);
}

TEST_CASE("metric_at rejects points outside the chart") {
    CHECK_THROWS_AS(metric_at(schwarzschild(1.0), pt({0, 1.5, 1.0, 0})), ChartDomainError);
    CHECK_THROWS_AS(metric_at(schwarzschild(1.0), pt({0, 10, 4.0, 0})), ChartDomainError);
    CHECK_THROWS_AS(metric_at(minkowski(4), Vec::Zero(3)), ChartDomainError);
}

TEST_CASE("inverse_metric_at") {
    CHECK(inverse_metric_at(minkowski(4), Vec::Zero(4)) == metric_at(minkowski(4), Vec::Zero(4)));
    const Mat gi = inverse_metric_at(schwarzschild(1.0), pt({0, 10, 1.0, 0}));
    CHECK(gi(0, 0) == doctest::Approx(-1.25).epsilon(1e-14));

    CounterRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Mat p(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) p(a, b) = 0.1 * (rng.uniform(trial, 4 * a + b) - 0.5);
        Mat base = Mat::Identity(4, 4);
        base(0, 0) = -1;
        const Mat gp = base + 0.5 * (p + p.transpose());
        SpacetimeModel m = minkowski(4);
        m.metric = [gp](const Vec&) { return gp; };
        const Mat prod = inverse_metric_at(m, Vec::Zero(4)) * metric_at(m, Vec::Zero(4));
        CHECK((prod - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }

    SpacetimeModel sing = minkowski(2);
    sing.metric = [](const Vec&) {
        Mat g(2, 2);
        g << -1, 1, 1, -1;
        return g;
    };
    CHECK_THROWS_AS(inverse_metric_at(sing, Vec::Zero(2)), SingularMetricError);
}

TEST_CASE("type invariants hold for every catalog model at 100 points") {
    for (const auto& m : catalog()) {
        for (const Vec& x : chart_points(m, 100, 5)) {
            const Mat g = metric_at(m, x);
            CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(negative_eigenvalue_count(g) == 1);
            const Mat f = faraday_at(m, x);
            CHECK((f + f.transpose()).cwiseAbs().maxCoeff() == 0.0);
            if (m.labtime) CHECK(m.labtime->grad(x).norm() > 0);
        }
    }
}

TEST_CASE("christoffel_at") {
    CHECK(christoffel_at(minkowski(4), pt({0.3, -1, 2, 5})).max_abs() < 1e-12);

    const SpacetimeModel s = schwarzschild(1.0);
    const Vec x = pt({0, 10, 1.1, 0.4});
    const Tensor3 g = christoffel_at(s, x);
    CHECK(g(0, 0, 1) == doctest::Approx(0.0125).epsilon(1e-6 / 0.0125));
    const Tensor3 oracle = schwarzschild_gamma(1.0, x);
    CHECK((g - oracle).max_abs() < 1e-6);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) CHECK(g(a, b, c) == g(a, c, b));

    SpacetimeModel e = with_explicit_connection(schwarzschild(1.0), [](const Vec& y) {
        Tensor3 t = schwarzschild_gamma(1.0, y);
        t(2, 0, 3) += 0.01;
        return t;
    });
    const Tensor3 direct = e.explicit_connection(x);
    CHECK(christoffel_at(e, x).raw() == direct.raw());
}

TEST_CASE("christoffel stencil leaving the chart") {
    SpacetimeModel s = schwarzschild(1.0);
    s.fd_step = 0.5;
    CHECK_THROWS_AS(christoffel_at(s, pt({0, 2.2, 1.0, 0})), NonFiniteDerivativeError);
}

TEST_CASE("finite-difference Christoffels converge at second order") {
    const SpacetimeModel s = schwarzschild(1.0);
    const Vec x = pt({0, 10, 1.1, 0.4});
    const Tensor3 oracle = schwarzschild_gamma(1.0, x);
    const double e1 = (christoffel_at(s, x, 0.2) - oracle).max_abs();
    const double e2 = (christoffel_at(s, x, 0.1) - oracle).max_abs();
    const double ratio = e1 / e2;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("nonmetricity_at") {
    // Levi-Civita: compatible to 10 h^2 at 100 points.
    for (const auto& m : {schwarzschild(1.0), minkowski(4)}) {
        for (const Vec& x : chart_points(m, 100, 9)) {
            const double h = default_fd_step(m, x);
            CHECK(nonmetricity_at(m, x).max_abs() < 10 * h * h);
        }
    }
    // Gamma^0_{00} = eps: Q_000 = -2 eps g_00 = 2 eps.
    const double eps = 0.03;
    SpacetimeModel m = with_explicit_connection(minkowski(4), [eps](const Vec&) {
        Tensor3 t(4);
        t(0, 0, 0) = eps;
        return t;
    });
    const Tensor3 q = nonmetricity_at(m, pt({0.1, 0.2, 0.3, 0.4}));
    CHECK(std::abs(q(0, 0, 0) - 2 * eps) < 1e-10);
    for (int l = 0; l < 4; ++l)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                CHECK(q(l, a, b) == q(l, b, a));
                if (l + a + b > 0) CHECK(q(l, a, b) == 0.0);
            }

    const SpacetimeModel nm = minkowski_nonmetric(0.05, 0.5);
    const Vec y = pt({0, 0.7, 0, 0});
    const Tensor3 qn = nonmetricity_at(nm, y);
    const double c = 0.05 * (1 + 0.5 * std::sin(0.7));
    // Q_{mu mu mu} = -2 c g_{mu mu}
    CHECK(qn(0, 0, 0) == doctest::Approx(2 * c));
    CHECK(qn(1, 1, 1) == doctest::Approx(-2 * c));
}
