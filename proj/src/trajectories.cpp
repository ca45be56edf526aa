#include "spraykit/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <Eigen/SVD>
#include <fmt/format.h>

namespace spraykit {

namespace {

struct State {
    Vec x, v;
};

struct Deriv {
    Vec dx, dv;
};

Deriv eval(const VlasovField& w, const Vec& x, const Vec& v, const ChartBounds* bounds) {
    if (bounds && !bounds->contains(x)) throw ChartDomainError("stage point outside integration bounds");
    return {v, w.phi({x, v})};
}

// Cubic Hermite on [0, h] with values (p0, p1) and slopes (m0, m1) at fraction tau.
template <class T>
T hermite(const T& p0, const T& m0, const T& p1, const T& m1, double h, double tau) {
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * p0 + (h10 * h) * m0 + h01 * p1 + (h11 * h) * m1;
}

template <class T>
T hermite_slope(const T& p0, const T& m0, const T& p1, const T& m1, double h, double tau) {
    const double t2 = tau * tau;
    const double d00 = 6 * t2 - 6 * tau, d10 = 3 * t2 - 4 * tau + 1;
    const double d01 = -6 * t2 + 6 * tau, d11 = 3 * t2 - 2 * tau;
    return (d00 / h) * p0 + d10 * m0 + (d01 / h) * p1 + d11 * m1;
}

// Four-point Lagrange interpolation of samples y(t_i) at t.
double lagrange4(const std::vector<double>& t, const std::vector<double>& y, double at) {
    const std::size_t n = t.size();
    if (n == 1) return y[0];
    if (n < 4) {
        std::size_t i = std::min<std::size_t>(n - 2, std::upper_bound(t.begin(), t.end(), at) - t.begin() - 1);
        const double f = (at - t[i]) / (t[i + 1] - t[i]);
        return (1 - f) * y[i] + f * y[i + 1];
    }
    std::size_t i = std::upper_bound(t.begin(), t.end(), at) - t.begin();
    std::size_t lo = i >= 2 ? i - 2 : 0;
    lo = std::min(lo, n - 4);
    double s = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
        double l = 1.0;
        for (std::size_t b = lo; b < lo + 4; ++b)
            if (b != a) l *= (at - t[b]) / (t[a] - t[b]);
        s += l * y[a];
    }
    return s;
}

Vec node_acceleration(const Prolongation& p, std::size_t i) {
    // Second-order differences of v when accelerations were not recorded.
    const std::size_t n = p.size();
    if (n < 3) return Vec::Zero(p.points[i].dim());
    if (i == 0)
        return (-3 * p.points[0].v + 4 * p.points[1].v - p.points[2].v) / (p.params[2] - p.params[0]);
    if (i == n - 1)
        return (3 * p.points[n - 1].v - 4 * p.points[n - 2].v + p.points[n - 3].v) /
               (p.params[n - 1] - p.params[n - 3]);
    return (p.points[i + 1].v - p.points[i - 1].v) / (p.params[i + 1] - p.params[i - 1]);
}

} // namespace

Prolongation integrate(const VlasovField& w, const PhasePoint& u0, double t0, double t1, int steps,
                       const ChartBounds* bounds) {
    if (steps < 1) throw ConfigError("integrate: steps must be positive");
    if (!(t1 > t0)) throw ConfigError("integrate: t1 must exceed t0");
    Prolongation out;
    out.field_label = w.label;
    out.params.reserve(steps + 1);
    out.points.reserve(steps + 1);
    const double h = (t1 - t0) / steps;
    Vec x = u0.x, v = u0.v;
    out.params.push_back(t0);
    out.points.push_back(u0);
    try {
        if (bounds && !bounds->contains(x)) throw ChartDomainError("initial point outside integration bounds");
        for (int i = 0; i < steps; ++i) {
            const Deriv k1 = eval(w, x, v, bounds);
            const Deriv k2 = eval(w, x + 0.5 * h * k1.dx, v + 0.5 * h * k1.dv, bounds);
            const Deriv k3 = eval(w, x + 0.5 * h * k2.dx, v + 0.5 * h * k2.dv, bounds);
            const Deriv k4 = eval(w, x + h * k3.dx, v + h * k3.dv, bounds);
            Vec xn = x + (h / 6) * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
            Vec vn = v + (h / 6) * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv);
            if (!xn.allFinite() || !vn.allFinite())
                throw NonFiniteStateError(fmt::format("{}: non-finite state at t = {:.6g}", w.label, t0 + i * h));
            if (bounds && !bounds->contains(xn)) throw ChartDomainError("path left integration bounds");
            x = std::move(xn);
            v = std::move(vn);
            out.params.push_back(i + 1 == steps ? t1 : t0 + (i + 1) * h);
            out.points.push_back({x, v});
        }
    } catch (const ChartDomainError& e) {
        out.truncated = true;
        out.truncation_reason = e.what();
    } catch (const NonFiniteDerivativeError& e) {
        out.truncated = true;
        out.truncation_reason = e.what();
    }
    return out;
}

std::vector<Prolongation> integrate_batch(const VlasovField& w, const std::vector<PhasePoint>& u0s, double t0,
                                          double t1, int steps, unsigned threads, const ChartBounds* bounds) {
    std::vector<Prolongation> out(u0s.size());
    std::vector<std::exception_ptr> errors(u0s.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(1, u0s.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < u0s.size();) {
            try {
                out[i] = integrate(w, u0s[i], t0, t1, steps, bounds);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

double prolongation_defect(const Prolongation& p) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const Vec d = (p.points[i + 1].x - p.points[i - 1].x) / (p.params[i + 1] - p.params[i - 1]);
        m = std::max(m, inf_norm(d - p.points[i].v));
    }
    return m;
}

Reparameterization reparameterize_detailed(const Prolongation& p, const BundleScalar& k) {
    const std::size_t n = p.size();
    if (n < 2) throw ConfigError("reparameterize: need at least two nodes");
    std::vector<double> kv(n);
    for (std::size_t i = 0; i < n; ++i) kv[i] = k.eval(p.points[i]);
    auto kt = [&](double t) { return lagrange4(p.params, kv, t); };

    // RK4 on (s, w = s').
    Reparameterization r;
    r.s_of_t.resize(n);
    r.ds_dt.resize(n);
    r.s_of_t[0] = p.params[0];
    r.ds_dt[0] = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = p.params[i], h = p.params[i + 1] - t;
        const double s = r.s_of_t[i], w = r.ds_dt[i];
        const double km = kt(t + 0.5 * h);
        const double a1 = w, b1 = -kv[i] * w;
        const double a2 = w + 0.5 * h * b1, b2 = -km * a2;
        const double a3 = w + 0.5 * h * b2, b3 = -km * a3;
        const double a4 = w + h * b3, b4 = -kv[i + 1] * a4;
        r.s_of_t[i + 1] = s + (h / 6) * (a1 + 2 * a2 + 2 * a3 + a4);
        r.ds_dt[i + 1] = w + (h / 6) * (b1 + 2 * b2 + 2 * b3 + b4);
        if (!(r.ds_dt[i + 1] > 0) || !(r.s_of_t[i + 1] > s))
            throw ReparamDegenerateError(fmt::format("ds/dt = {:.6g} at t = {:.6g}", r.ds_dt[i + 1], p.params[i + 1]));
    }

    std::vector<Vec> acc(n);
    for (std::size_t i = 0; i < n; ++i) acc[i] = node_acceleration(p, i);
    auto wprime = [&](std::size_t i) { return -kv[i] * r.ds_dt[i]; };

    Prolongation& c = r.curve;
    c.field_label = p.field_label + "+kR";
    c.truncated = p.truncated;
    c.truncation_reason = p.truncation_reason;
    const double s0 = r.s_of_t.front(), s1 = r.s_of_t.back();
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double sj = j == 0 ? s0 : (j + 1 == n ? s1 : s0 + (s1 - s0) * static_cast<double>(j) / (n - 1));
        while (seg + 2 < n && r.s_of_t[seg + 1] < sj) ++seg;
        const double h = p.params[seg + 1] - p.params[seg];
        // Invert the Hermite model of s(t) on this interval by Newton iteration.
        double tau = (sj - r.s_of_t[seg]) / (r.s_of_t[seg + 1] - r.s_of_t[seg]);
        for (int it = 0; it < 50; ++it) {
            const double f = hermite(r.s_of_t[seg], r.ds_dt[seg], r.s_of_t[seg + 1], r.ds_dt[seg + 1], h, tau) - sj;
            const double d = hermite_slope(r.s_of_t[seg], r.ds_dt[seg], r.s_of_t[seg + 1], r.ds_dt[seg + 1], h, tau) * h;
            const double step = f / d;
            tau -= step;
            if (std::abs(step) < 1e-16) break;
        }
        tau = std::clamp(tau, 0.0, 1.0);
        const PhasePoint& a = p.points[seg];
        const PhasePoint& b = p.points[seg + 1];
        const Vec x = hermite<Vec>(a.x, a.v, b.x, b.v, h, tau);
        const Vec v = hermite<Vec>(a.v, acc[seg], b.v, acc[seg + 1], h, tau);
        const double w = hermite(r.ds_dt[seg], wprime(seg), r.ds_dt[seg + 1], wprime(seg + 1), h, tau);
        c.params.push_back(sj);
        c.points.push_back({x, v / w});
    }
    return r;
}

Prolongation reparameterize(const Prolongation& p, const BundleScalar& k) { return reparameterize_detailed(p, k).curve; }

namespace {

std::vector<double> chord_lengths(const Prolongation& p) {
    std::vector<double> c(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) c[i] = c[i - 1] + (p.points[i].x - p.points[i - 1].x).norm();
    return c;
}

Vec at_chord(const Prolongation& p, const std::vector<double>& c, double target) {
    std::size_t i = std::upper_bound(c.begin(), c.end(), target) - c.begin();
    if (i == 0) return p.points.front().x;
    if (i >= c.size()) return p.points.back().x;
    const double len = c[i] - c[i - 1];
    const double f = len > 0 ? (target - c[i - 1]) / len : 0.0;
    return (1 - f) * p.points[i - 1].x + f * p.points[i].x;
}

double point_to_polyline(const Vec& q, const Prolongation& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const Vec& a = p.points[i].x;
        const Vec d = p.points[i + 1].x - a;
        const double dd = d.squaredNorm();
        const double f = dd > 0 ? std::clamp((q - a).dot(d) / dd, 0.0, 1.0) : 0.0;
        best = std::min(best, (a + f * d - q).norm());
    }
    if (p.size() == 1) best = (p.points[0].x - q).norm();
    return best;
}

} // namespace

CurveDistance compare_base_curves(const Prolongation& a, const Prolongation& b, int resample) {
    CurveDistance d;
    const auto ca = chord_lengths(a), cb = chord_lengths(b);
    for (int j = 0; j < resample; ++j) {
        const double f = resample > 1 ? static_cast<double>(j) / (resample - 1) : 0.0;
        const Vec pa = at_chord(a, ca, f * ca.back());
        const Vec pb = at_chord(b, cb, f * cb.back());
        d.chordal = std::max(d.chordal, (pa - pb).norm());
    }
    for (const auto& u : a.points) d.hausdorff = std::max(d.hausdorff, point_to_polyline(u.x, b));
    for (const auto& u : b.points) d.hausdorff = std::max(d.hausdorff, point_to_polyline(u.x, a));
    return d;
}

DriftSeries indicator_drift(const Prolongation& p, const BundleScalar& f) {
    DriftSeries s;
    s.params = p.params;
    const std::size_t n = p.size();
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values[i] = f.eval(p.points[i]);
    s.rates.assign(n, 0.0);
    if (n >= 3) {
        for (std::size_t i = 1; i + 1 < n; ++i)
            s.rates[i] = (s.values[i + 1] - s.values[i - 1]) / (p.params[i + 1] - p.params[i - 1]);
        s.rates[0] = (-3 * s.values[0] + 4 * s.values[1] - s.values[2]) / (p.params[2] - p.params[0]);
        s.rates[n - 1] =
            (3 * s.values[n - 1] - 4 * s.values[n - 2] + s.values[n - 3]) / (p.params[n - 1] - p.params[n - 3]);
    } else if (n == 2) {
        s.rates[0] = s.rates[1] = (s.values[1] - s.values[0]) / (p.params[1] - p.params[0]);
    }
    for (double v : s.values) s.max_deviation = std::max(s.max_deviation, std::abs(v - s.values[0]));
    return s;
}

namespace {

struct NullRun {
    Prolongation path;
    std::vector<Vec> accel;
};

NullRun run_null(const SpacetimeModel& model, const PhasePoint& u0, double span, int steps) {
    const KinematicIndicator s = indicator_labtime(model);
    const VlasovField w = transform_to_domain(geodesic_field(model), s);
    PhasePoint start = u0;
    start.v /= s.F.eval(u0);
    NullRun r{integrate(w, start, 0.0, span, steps), {}};
    const Prolongation& p = r.path;
    for (std::size_t i = 0; i < p.size(); ++i) {
        Vec a = node_acceleration(p, i);
        a += christoffel_at(model, p.points[i].x).contract(p.points[i].v, p.points[i].v);
        r.accel.push_back(a);
    }
    return r;
}

} // namespace

NullLabtimeReport null_labtime_defect(const SpacetimeModel& model, const PhasePoint& u0, double span, int steps) {
    if (model.dim != 2 || !model.labtime) throw ConfigError("null_labtime_defect needs a 2D model with a lab time");
    const BaseScalar& s = *model.labtime;
    NullLabtimeReport rep;
    NullRun run = run_null(model, u0, span, steps);
    const Vec n = u0.v / u0.v[0];
    for (std::size_t i = 0; i < run.path.size(); ++i) {
        const Vec& x = run.path.points[i].x;
        // Affine null line X(tau) = X0 + tau n; s-parameterisation gives C'' = -(n.H n)/D^3 n, D = n.grad s.
        const double d = n.dot(s.grad(x));
        const double dd = n.dot(s.hess(x) * n);
        const Vec oracle = -(dd / (d * d * d)) * n;
        rep.params.push_back(run.path.params[i]);
        rep.residual.push_back(run.accel[i].norm());
        rep.oracle.push_back(oracle.norm());
        // Endpoints use one-sided differences; compare on interior nodes.
        if (i > 0 && i + 1 < run.path.size()) {
            rep.max_residual = std::max(rep.max_residual, run.accel[i].norm());
            rep.max_oracle_gap = std::max(rep.max_oracle_gap, (run.accel[i] - oracle).norm());
        }
    }
    rep.path = run.path;

    SpacetimeModel ref = with_labtime(model, coordinate_scalar(0, 2));
    NullRun rr = run_null(ref, u0, span, steps);
    for (std::size_t i = 1; i + 1 < rr.path.size(); ++i)
        rep.reference_max_residual = std::max(rep.reference_max_residual, rr.accel[i].norm());
    return rep;
}

Leaf integrate_leaf(const VlasovBivector& psi, const PhasePoint& u0, const std::vector<double>& t_grid,
                    const std::vector<double>& lambda_grid, int substeps, double tol) {
    if (t_grid.size() < 2 || lambda_grid.empty()) throw ConfigError("integrate_leaf: grids too small");
    const VlasovField& w = psi.representative;
    std::vector<PhasePoint> eta{u0};
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
        const Prolongation seg = integrate(w, eta.back(), t_grid[i], t_grid[i + 1], substeps);
        if (seg.truncated) throw ChartExitError("leaf integration left the chart: " + seg.truncation_reason);
        eta.push_back(seg.points.back());
    }
    Leaf leaf;
    leaf.t = t_grid;
    leaf.lambda = lambda_grid;
    for (double lam : lambda_grid) {
        std::vector<PhasePoint> row;
        for (const auto& u : eta) row.push_back(u.scaled(lam));
        leaf.nodes.push_back(std::move(row));
    }
    const int n = u0.dim();
    auto flat = [n](const PhasePoint& p) {
        Vec z(2 * n);
        z << p.x, p.v;
        return z;
    };
    for (std::size_t j = 1; j + 1 < lambda_grid.size(); ++j)
        for (std::size_t i = 1; i + 1 < t_grid.size(); ++i) {
            const PhasePoint& p = leaf.nodes[j][i];
            Mat m(4, 2 * n);
            const auto& rowj = leaf.nodes[j];
            const std::size_t nt = t_grid.size();
            const double h = 0.5 * (t_grid[i + 1] - t_grid[i - 1]);
            // Fourth-order stencils (one-sided next to the ends), second order on short grids.
            if (nt >= 5 && i >= 2 && i + 2 < nt) {
                m.row(0) = (flat(rowj[i - 2]) - 8 * flat(rowj[i - 1]) + 8 * flat(rowj[i + 1]) - flat(rowj[i + 2])) /
                           (12 * h);
            } else if (nt >= 5 && i == 1) {
                m.row(0) = (-3 * flat(rowj[0]) - 10 * flat(rowj[1]) + 18 * flat(rowj[2]) - 6 * flat(rowj[3]) +
                            flat(rowj[4])) /
                           (12 * h);
            } else if (nt >= 5 && i + 2 == nt) {
                m.row(0) = (3 * flat(rowj[i + 1]) + 10 * flat(rowj[i]) - 18 * flat(rowj[i - 1]) +
                            6 * flat(rowj[i - 2]) - flat(rowj[i - 3])) /
                           (12 * h);
            } else {
                m.row(0) = (flat(rowj[i + 1]) - flat(rowj[i - 1])) / (2 * h);
            }
            m.row(1) = (flat(leaf.nodes[j + 1][i]) - flat(leaf.nodes[j - 1][i])) /
                       (lambda_grid[j + 1] - lambda_grid[j - 1]);
            Vec r(2 * n);
            r << Vec::Zero(n), p.v;
            m.row(2) = r;
            m.row(3) = w.tangent(p);
            for (int k = 0; k < 4; ++k) m.row(k).normalize();
            Eigen::JacobiSVD<Mat> svd(m);
            const Vec sv = svd.singularValues();
            leaf.max_tangency_ratio = std::max(leaf.max_tangency_ratio, sv[2] / sv[0]);
        }
    leaf.tangent = leaf.max_tangency_ratio < tol;
    return leaf;
}

double leaf_distance(const Leaf& a, const Leaf& b) {
    // Reference rays: lambda = 1 row of `a` when present, first row otherwise.
    std::size_t ref = 0;
    for (std::size_t j = 0; j < a.lambda.size(); ++j)
        if (a.lambda[j] == 1.0) ref = j;
    const double lref = a.lambda[ref];
    const auto& coarse = a.nodes[ref];
    const std::size_t m = coarse.size();

    // Densify: Hermite in x (slope v / lambda), four-point Lagrange in v.
    constexpr int kSub = 16;
    std::vector<PhasePoint> row;
    const int n = coarse.front().dim();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = a.t[i + 1] - a.t[i];
        const std::size_t lo = m < 4 ? 0 : std::min(i >= 1 ? i - 1 : 0, m - 4);
        const std::size_t cnt = std::min<std::size_t>(4, m);
        for (int k = 0; k < kSub + (i + 2 == m ? 1 : 0); ++k) {
            const double tau = static_cast<double>(k) / kSub;
            const double t = a.t[i] + tau * h;
            PhasePoint p;
            p.x = hermite<Vec>(coarse[i].x, coarse[i].v / lref, coarse[i + 1].x, coarse[i + 1].v / lref, h, tau);
            p.v = Vec::Zero(n);
            for (std::size_t q = lo; q < lo + cnt; ++q) {
                double l = 1.0;
                for (std::size_t r = lo; r < lo + cnt; ++r)
                    if (r != q) l *= (t - a.t[r]) / (a.t[q] - a.t[r]);
                p.v += l * coarse[q].v / lref;
            }
            row.push_back(std::move(p));
        }
    }
    if (m == 1) row.push_back({coarse[0].x, coarse[0].v / lref});

    double worst = 0.0;
    for (const auto& brow : b.nodes)
        for (const auto& q : brow) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < row.size(); ++i) {
                const Vec d = row[i + 1].x - row[i].x;
                const double dd = d.squaredNorm();
                const double f = dd > 0 ? std::clamp((q.x - row[i].x).dot(d) / dd, 0.0, 1.0) : 0.0;
                const Vec x = row[i].x + f * d;
                const Vec va = (1 - f) * row[i].v + f * row[i + 1].v;
                const double lam = std::max(0.0, va.dot(q.v) / va.squaredNorm());
                best = std::min(best, std::sqrt((x - q.x).squaredNorm() + (lam * va - q.v).squaredNorm()));
            }
            worst = std::max(worst, best);
        }
    return worst;
}

double leaf_hausdorff(const Leaf& a, const Leaf& b) { return std::max(leaf_distance(a, b), leaf_distance(b, a)); }

} // namespace spraykit
