#include "spraykit/geometry.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace spraykit {

namespace {

std::string fmt_point(const Vec& x) {
    std::string s = "(";
    for (int i = 0; i < x.size(); ++i) s += fmt::format("{}{:.6g}", i ? ", " : "", x[i]);
    return s + ")";
}

} // namespace

bool ChartBounds::contains(const Vec& x) const {
    if (lower.size() == 0 && upper.size() == 0) return true;
    for (int i = 0; i < x.size(); ++i) {
        if (lower.size() > i && !(x[i] > lower[i])) return false;
        if (upper.size() > i && !(x[i] < upper[i])) return false;
    }
    return true;
}

Vec BaseScalar::grad(const Vec& x) const {
    if (gradient) return gradient(x);
    const int n = static_cast<int>(x.size());
    Vec g(n);
    const double h = 1e-6 * std::max(1.0, inf_norm(x));
    for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (value(xp) - value(xm)) / (2 * h);
    }
    return g;
}

Mat BaseScalar::hess(const Vec& x) const {
    if (hessian) return hessian(x);
    const int n = static_cast<int>(x.size());
    Mat H(n, n);
    const double h = 1e-5 * std::max(1.0, inf_norm(x));
    for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        H.col(i) = (grad(xp) - grad(xm)) / (2 * h);
    }
    return 0.5 * (H + H.transpose());
}

BaseScalar coordinate_scalar(int index, int dim) {
    BaseScalar s;
    s.name = fmt::format("x{}", index);
    s.value = [index](const Vec& x) { return x[index]; };
    s.gradient = [index, dim](const Vec&) {
        Vec g = Vec::Zero(dim);
        g[index] = 1.0;
        return g;
    };
    s.hessian = [dim](const Vec&) { return Mat::Zero(dim, dim).eval(); };
    return s;
}

void check_chart(const SpacetimeModel& model, const Vec& x) {
    if (x.size() != model.dim)
        throw ChartDomainError(fmt::format("{}: point has {} components, model dimension is {}", model.name,
                                           x.size(), model.dim));
    if (!x.allFinite() || !model.bounds.contains(x))
        throw ChartDomainError(fmt::format("{}: point {} outside chart", model.name, fmt_point(x)));
}

Mat metric_at(const SpacetimeModel& model, const Vec& x) {
    check_chart(model, x);
    Mat g = model.metric(x);
    // Symmetrize so the invariant holds bit-exactly.
    return 0.5 * (g + g.transpose());
}

Mat inverse_metric_at(const SpacetimeModel& model, const Vec& x) {
    const Mat g = metric_at(model, x);
    Eigen::PartialPivLU<Mat> lu(g);
    const double rc = lu.rcond();
    if (!(rc > 1e-13))
        throw SingularMetricError(fmt::format("{}: metric at {} is singular (rcond {:.3g})", model.name,
                                              fmt_point(x), rc));
    Mat gi = lu.inverse();
    return 0.5 * (gi + gi.transpose());
}

Mat faraday_at(const SpacetimeModel& model, const Vec& x) {
    check_chart(model, x);
    if (!model.faraday) return Mat::Zero(model.dim, model.dim);
    Mat f = model.faraday(x);
    return 0.5 * (f - f.transpose());
}

double default_fd_step(const SpacetimeModel& model, const Vec& x) {
    if (model.fd_step > 0) return model.fd_step;
    return 1e-6 * std::max(1.0, inf_norm(x));
}

Tensor3 metric_derivative_at(const SpacetimeModel& model, const Vec& x, double step) {
    check_chart(model, x);
    const int n = model.dim;
    Tensor3 dg(n);
    if (model.metric_derivative && step <= 0) {
        dg = model.metric_derivative(x);
    } else {
        const double h = step > 0 ? step : default_fd_step(model, x);
        for (int l = 0; l < n; ++l) {
            Vec xp = x, xm = x;
            xp[l] += h;
            xm[l] -= h;
            if (!model.bounds.contains(xp) || !model.bounds.contains(xm))
                throw NonFiniteDerivativeError(
                    fmt::format("{}: difference stencil at {} leaves the chart", model.name, fmt_point(x)));
            const Mat d = (model.metric(xp) - model.metric(xm)) / (2 * h);
            for (int m = 0; m < n; ++m)
                for (int k = 0; k < n; ++k) dg(l, m, k) = 0.5 * (d(m, k) + d(k, m));
        }
    }
    for (double v : dg.raw())
        if (!std::isfinite(v))
            throw NonFiniteDerivativeError(fmt::format("{}: non-finite metric derivative at {}", model.name,
                                                       fmt_point(x)));
    return dg;
}

Tensor3 levi_civita_at(const SpacetimeModel& model, const Vec& x, double step) {
    const int n = model.dim;
    const Mat gi = inverse_metric_at(model, x);
    const Tensor3 dg = metric_derivative_at(model, x, step);
    Tensor3 gamma(n);
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                double s = 0.0;
                for (int r = 0; r < n; ++r) s += gi(m, r) * (dg(a, r, b) + dg(b, r, a) - dg(r, a, b));
                gamma(m, a, b) = 0.5 * s;
                gamma(m, b, a) = 0.5 * s;
            }
    return gamma;
}

Tensor3 christoffel_at(const SpacetimeModel& model, const Vec& x, double step) {
    if (model.connection == ConnectionKind::Explicit) {
        check_chart(model, x);
        return model.explicit_connection(x);
    }
    return levi_civita_at(model, x, step);
}

Tensor3 nonmetricity_at(const SpacetimeModel& model, const Vec& x, double step) {
    const int n = model.dim;
    const Mat g = metric_at(model, x);
    const Tensor3 dg = metric_derivative_at(model, x, step);
    const Tensor3 gamma = christoffel_at(model, x, step);
    Tensor3 q(n);
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
            for (int k = m; k < n; ++k) {
                double s = dg(l, m, k);
                for (int r = 0; r < n; ++r) s -= gamma(r, l, m) * g(r, k) + gamma(r, l, k) * g(m, r);
                q(l, m, k) = s;
                q(l, k, m) = s;
            }
    return q;
}

int negative_eigenvalue_count(const Mat& g) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    int c = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < 0) ++c;
    return c;
}

namespace {

Mat eta(int dim) {
    Mat g = Mat::Identity(dim, dim);
    g(0, 0) = -1.0;
    return g;
}

SpacetimeModel flat_base(int dim, std::string name) {
    SpacetimeModel m;
    m.name = std::move(name);
    m.dim = dim;
    m.metric = [dim](const Vec&) { return eta(dim); };
    m.metric_derivative = [dim](const Vec&) { return Tensor3(dim); };
    m.labtime = coordinate_scalar(0, dim);
    return m;
}

} // namespace

SpacetimeModel minkowski(int dim) {
    if (dim < 2) throw ConfigError("minkowski: dimension must be at least 2");
    return flat_base(dim, fmt::format("minkowski{}", dim));
}

SpacetimeModel schwarzschild(double mass) {
    if (!(mass > 0)) throw ConfigError("schwarzschild: mass must be positive");
    SpacetimeModel m;
    m.name = "schwarzschild";
    m.dim = 4;
    m.metric = [mass](const Vec& x) {
        const double r = x[1];
        const double f = 1.0 - 2.0 * mass / r;
        const double s = std::sin(x[2]);
        Mat g = Mat::Zero(4, 4);
        g(0, 0) = -f;
        g(1, 1) = 1.0 / f;
        g(2, 2) = r * r;
        g(3, 3) = r * r * s * s;
        return g;
    };
    const double inf = std::numeric_limits<double>::infinity();
    m.bounds.lower = Vec(4);
    m.bounds.lower << -inf, 2.0 * mass, 0.0, -inf;
    m.bounds.upper = Vec(4);
    m.bounds.upper << inf, inf, std::numbers::pi, inf;
    m.labtime = coordinate_scalar(0, 4);
    SampleHint h{Vec(4), Vec(4), Vec(4), Vec(4)};
    h.x_lo << -1.0, 6.0 * mass, 0.8, -1.0;
    h.x_hi << 1.0, 12.0 * mass, 2.3, 1.0;
    h.v_lo << 1.0, -0.3, -0.03 / mass, -0.03 / mass;
    h.v_hi << 2.0, 0.3, 0.03 / mass, 0.03 / mass;
    m.sample_hint = h;
    return m;
}

SpacetimeModel minkowski_electric(double e0, double charge_to_mass, int dim) {
    SpacetimeModel m = flat_base(dim, "minkowski_electric");
    m.charge_to_mass = charge_to_mass;
    m.faraday = [e0, dim](const Vec&) {
        Mat f = Mat::Zero(dim, dim);
        f(1, 0) = e0;
        f(0, 1) = -e0;
        return f;
    };
    return m;
}

SpacetimeModel minkowski_nonmetric(double eps, double bump, int dim) {
    SpacetimeModel m = flat_base(dim, "minkowski_nonmetric");
    m.connection = ConnectionKind::Explicit;
    m.explicit_connection = [eps, bump, dim](const Vec& x) {
        Tensor3 g(dim);
        const double c = eps * (1.0 + bump * std::sin(x[1]));
        for (int i = 0; i < dim; ++i) g(i, i, i) = c;
        return g;
    };
    return m;
}

SpacetimeModel minkowski2_labtime(double amplitude) {
    SpacetimeModel m = flat_base(2, "minkowski2_labtime");
    BaseScalar s;
    s.name = fmt::format("t+{}*sin(x)", amplitude);
    s.value = [amplitude](const Vec& x) { return x[0] + amplitude * std::sin(x[1]); };
    s.gradient = [amplitude](const Vec& x) {
        Vec g(2);
        g << 1.0, amplitude * std::cos(x[1]);
        return g;
    };
    s.hessian = [amplitude](const Vec& x) {
        Mat h = Mat::Zero(2, 2);
        h(1, 1) = -amplitude * std::sin(x[1]);
        return h;
    };
    m.labtime = s;
    return m;
}

SpacetimeModel with_explicit_connection(SpacetimeModel model, std::function<Tensor3(const Vec&)> gamma,
                                        std::string suffix) {
    model.connection = ConnectionKind::Explicit;
    model.explicit_connection = std::move(gamma);
    model.name += "+" + suffix;
    return model;
}

SpacetimeModel with_labtime(SpacetimeModel model, BaseScalar labtime) {
    model.labtime = std::move(labtime);
    return model;
}

} // namespace spraykit
