#include "spraykit/observables.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spraykit/quadrature.hpp"

namespace spraykit {

double SupportForm::integral(int nodes) const {
    const QuadratureRule rule = composite_gauss_legendre(nodes, r_min, r_max, breakpoints);
    return integrate_1d([this](double r) { return (*this)(r); }, rule);
}

SupportForm SupportForm::make(std::string name, std::function<double(double)> raw, double r_min, double r_max,
                              std::vector<double> breakpoints) {
    if (!(r_max > r_min)) throw ConfigError(fmt::format("support form {}: empty support", name));
    SupportForm s{std::move(name), std::move(raw), r_min, r_max, std::move(breakpoints), 1.0};
    const double total = s.integral();
    if (!(total > 0)) throw ConfigError(fmt::format("support form {}: profile integrates to zero", s.name));
    s.scale = 1.0 / total;
    return s;
}

SupportForm support_bump(double center, double half_width) {
    // (1 - u^2)^3 is C^2 at u = +-1.
    return SupportForm::make(
        fmt::format("bump[{},{}]", center - half_width, center + half_width),
        [center, half_width](double r) {
            const double u = (r - center) / half_width;
            const double q = 1.0 - u * u;
            return q > 0 ? q * q * q : 0.0;
        },
        center - half_width, center + half_width);
}

SupportForm support_box(double a, double b) {
    return SupportForm::make(fmt::format("box[{},{}]", a, b), [](double) { return 1.0; }, a, b);
}

SupportForm support_triangle(double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    return SupportForm::make(
        fmt::format("triangle[{},{}]", a, b),
        [mid, half](double r) { return std::max(0.0, 1.0 - std::abs(r - mid) / half); }, a, b, {mid});
}

std::vector<SupportForm> default_support_catalog() {
    return {support_bump(0.0, 0.5), support_box(-1.0, 0.0), support_triangle(0.0, 1.0)};
}

namespace {

// Visits every node of the (n-1)-fold tensor rule over the box, in lexicographic order.
template <class Fn>
void for_each_node(const Vec& lo, const Vec& hi, int nodes, Fn&& fn) {
    const int d = static_cast<int>(lo.size());
    std::vector<QuadratureRule> rules;
    for (int i = 0; i < d; ++i) rules.push_back(gauss_legendre(nodes, lo[i], hi[i]));
    std::vector<int> idx(d, 0);
    Vec s(d);
    while (true) {
        double w = 1.0;
        bool edge = false;
        for (int i = 0; i < d; ++i) {
            s[i] = rules[i].nodes[idx[i]];
            w *= rules[i].weights[idx[i]];
            edge = edge || idx[i] == 0 || idx[i] == nodes - 1;
        }
        fn(s, w, edge);
        int k = d - 1;
        while (k >= 0 && ++idx[k] == nodes) idx[k--] = 0;
        if (k < 0) break;
    }
}

void check_density(const SpacetimeModel& model, const AnalyticDensity& density) {
    if (density.v_lo.size() != model.dim - 1 || density.v_hi.size() != model.dim - 1)
        throw ConfigError(fmt::format("{}: velocity box needs {} components", density.name, model.dim - 1));
}

struct Accum {
    Vec J;
    Mat T;
    double fmax = 0.0, fedge = 0.0;

    explicit Accum(int n) : J(Vec::Zero(n)), T(Mat::Zero(n, n)) {}

    Moments finish() const {
        Moments m{J, 0.5 * (T + T.transpose()), false, 0.0};
        m.boundary_ratio = fmax > 0 ? fedge / fmax : 0.0;
        m.truncation_warning = m.boundary_ratio > 1e-12;
        return m;
    }
};

} // namespace

Moments moments_from_E(const SpacetimeModel& model, const AnalyticDensity& density, const Vec& x,
                       const QuadratureSpec& spec) {
    check_density(model, density);
    const Mat g = metric_at(model, x);
    const double root = std::sqrt(-g.determinant());
    Accum acc(model.dim);
    for_each_node(density.v_lo, density.v_hi, spec.nodes, [&](const Vec& s, double w, bool edge) {
        const Vec v = complete_velocity(model, density.domain, x, s, density.domain.level);
        const double f = density.f({x, v});
        acc.fmax = std::max(acc.fmax, std::abs(f));
        if (edge) acc.fedge = std::max(acc.fedge, std::abs(f));
        const double c = w * f * root / std::abs(g.row(0).dot(v));
        acc.J += c * v;
        acc.T += c * (v * v.transpose());
    });
    return acc.finish();
}

Vec current_from_E(const SpacetimeModel& model, const AnalyticDensity& density, const Vec& x,
                   const QuadratureSpec& spec) {
    return moments_from_E(model, density, x, spec).J;
}

Mat stress_energy_at(const SpacetimeModel& model, const AnalyticDensity& density, const Vec& x,
                     const QuadratureSpec& spec) {
    return moments_from_E(model, density, x, spec).T;
}

Moments moments_from_U(const SpacetimeModel& model, const AnalyticDensity& density, const SupportForm& chi,
                       const Vec& x, const QuadratureSpec& spec, const KinematicIndicator* alt_domain) {
    check_density(model, density);
    const KinematicIndicator& dom = density.domain;
    const int n = model.dim;
    const Mat g = metric_at(model, x);
    const double root = std::sqrt(-g.determinant());
    const QuadratureRule radial = composite_gauss_legendre(spec.radial_nodes, chi.r_min, chi.r_max, chi.breakpoints);
    Accum acc(n);
    for (std::size_t q = 0; q < radial.nodes.size(); ++q) {
        const double r = radial.nodes[q];
        const double weight_r = radial.weights[q] * chi(r);
        if (weight_r == 0.0) continue;
        // Slice where the 1-homogeneous form of the domain indicator equals ell.
        const double ell = std::exp(r);
        const double slice_level = dom.level * std::pow(ell, dom.degree);
        const Vec lo = ell * density.v_lo, hi = ell * density.v_hi;
        Vec J = Vec::Zero(n);
        Mat T = Mat::Zero(n, n);
        for_each_node(lo, hi, spec.nodes, [&](const Vec& s, double w, bool edge) {
            const PhasePoint u{x, complete_velocity(model, dom, x, s, slice_level)};
            // Pi(u) = u (a / F(u))^(1/k): the 0-homogeneous lift evaluates f_E there.
            const double lam = std::pow(dom.level / dom.F.eval(u), 1.0 / dom.degree);
            const PhasePoint y = u.scaled(lam);
            const double f = density.f(y);
            acc.fmax = std::max(acc.fmax, std::abs(f));
            if (edge) acc.fedge = std::max(acc.fedge, std::abs(f));
            const double c = w * f * root / std::abs(g.row(0).dot(u.v)) * std::pow(ell, -(n - 1));
            J += c * u.v;
            double alt = 1.0;
            if (alt_domain) {
                const double fa = alt_domain->F.eval(y);
                alt = std::pow(alt_domain->level / fa, 1.0 / alt_domain->degree);
            }
            T += (c * alt) * (u.v * u.v.transpose());
        });
        acc.J += weight_r * J;
        acc.T += weight_r * T;
    }
    return acc.finish();
}

Vec current_from_U(const SpacetimeModel& model, const AnalyticDensity& density, const SupportForm& chi,
                   const Vec& x, const QuadratureSpec& spec) {
    return moments_from_U(model, density, chi, x, spec).J;
}

AnalyticDensity normalized(const SpacetimeModel& model, AnalyticDensity density, const Vec& x,
                           const QuadratureSpec& spec) {
    check_density(model, density);
    const Mat g = metric_at(model, x);
    const double root = std::sqrt(-g.determinant());
    double total = 0.0;
    for_each_node(density.v_lo, density.v_hi, spec.nodes, [&](const Vec& s, double w, bool) {
        const Vec v = complete_velocity(model, density.domain, x, s, density.domain.level);
        total += w * density.f({x, v}) * root / std::abs(g.row(0).dot(v));
    });
    if (!(total > 0)) throw DegenerateDensityError(fmt::format("{}: zero total on the velocity box", density.name));
    auto f = density.f;
    density.f = [f, total](const PhasePoint& u) { return f(u) / total; };
    return density;
}

namespace {

double rel_diff(const Mat& a, const Mat& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    return scale > 0 ? (a - b).cwiseAbs().maxCoeff() / scale : 0.0;
}

} // namespace

DependenceReport stress_energy_dependence_report(const SpacetimeModel& model, const AnalyticDensity& density,
                                                 const Vec& x, const std::vector<KinematicIndicator>& domains,
                                                 const std::vector<SupportForm>& chis, const QuadratureSpec& spec) {
    DependenceReport rep;
    for (const auto& d : domains)
        for (const auto& c : chis) {
            const Moments m = moments_from_U(model, density, c, x, spec, &d);
            rep.entries.push_back({d.name, c.name, m.J, m.T});
        }
    const auto k = static_cast<Eigen::Index>(rep.entries.size());
    rep.T_rel_diff = Mat::Zero(k, k);
    rep.J_rel_diff = Mat::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            rep.T_rel_diff(i, j) = rel_diff(rep.entries[i].T, rep.entries[j].T);
            rep.J_rel_diff(i, j) = rel_diff(rep.entries[i].J, rep.entries[j].J);
        }
    if (k > 0) {
        rep.max_T_rel_diff = rep.T_rel_diff.maxCoeff();
        rep.max_J_rel_diff = rep.J_rel_diff.maxCoeff();
    }
    return rep;
}

std::size_t GridSpec::cell_count() const {
    std::size_t c = 1;
    for (int k : cells) c *= static_cast<std::size_t>(k);
    return c;
}

Vec GridSpec::cell_center(std::size_t flat) const {
    const int d = static_cast<int>(cells.size());
    Vec c(d);
    for (int i = d - 1; i >= 0; --i) {
        const int idx = static_cast<int>(flat % cells[i]);
        flat /= cells[i];
        c[i] = lo[i] + (idx + 0.5) * spacing(i);
    }
    return c;
}

namespace {

void check_grid(const GridSpec& g, int dim) {
    if (static_cast<int>(g.cells.size()) != dim - 1 || g.lo.size() != dim - 1 || g.hi.size() != dim - 1)
        throw ConfigError("grid spec must have n-1 spatial axes");
    for (int c : g.cells)
        if (c < 1) throw ConfigError("grid cells must be positive");
    if (g.times.empty()) throw ConfigError("grid needs at least one time slice");
}

} // namespace

MomentGrid current_grid_from_ensemble(const ParticleEnsemble& ens, const GridSpec& grid, double width) {
    if (ens.samples.empty()) throw EmptyEnsembleError("current_grid_from_ensemble: ensemble is empty");
    const int n = ens.samples.front().dim();
    const int d = n - 1;
    check_grid(grid, n);
    if (!(width > 0)) throw ConfigError("kernel width must be positive");
    MomentGrid out;
    out.spec = grid;
    out.dim = n;
    const std::size_t cells = grid.cell_count();
    for (double t : grid.times) {
        std::vector<Vec> slice(cells, Vec::Zero(n));
        for (std::size_t p = 0; p < ens.size(); ++p) {
            const PhasePoint& u = ens.samples[p];
            const Vec dir = u.v / u.v[0];
            Vec pos = u.x.tail(d) + (t - u.x[0]) * dir.tail(d);
            // Per-axis list of (cell, kernel value).
            std::vector<std::vector<std::pair<int, double>>> axis(d);
            for (int a = 0; a < d; ++a) {
                const double h = grid.spacing(a), len = grid.hi[a] - grid.lo[a];
                if (grid.periodic) pos[a] = grid.lo[a] + std::fmod(std::fmod(pos[a] - grid.lo[a], len) + len, len);
                if (grid.cells[a] == 1) {
                    // Unresolved axis: average over the slab.
                    if (grid.periodic || (pos[a] >= grid.lo[a] && pos[a] <= grid.hi[a])) axis[a].push_back({0, 1.0 / len});
                    continue;
                }
                const int reach = static_cast<int>(std::ceil(width / h)) + 1;
                const int home = static_cast<int>(std::floor((pos[a] - grid.lo[a]) / h));
                for (int c = home - reach; c <= home + reach; ++c) {
                    int cc = c;
                    double center = grid.lo[a] + (c + 0.5) * h;
                    if (grid.periodic) {
                        cc = ((c % grid.cells[a]) + grid.cells[a]) % grid.cells[a];
                    } else if (c < 0 || c >= grid.cells[a]) {
                        continue;
                    }
                    const double k = std::max(0.0, 1.0 - std::abs(center - pos[a]) / width) / width;
                    if (k > 0) axis[a].push_back({cc, k});
                }
            }
            const Vec contrib = ens.weights[p] * dir;
            std::vector<std::size_t> pick(d, 0);
            bool empty = false;
            for (int a = 0; a < d; ++a) empty = empty || axis[a].empty();
            if (empty) continue;
            while (true) {
                std::size_t flat = 0;
                double k = 1.0;
                for (int a = 0; a < d; ++a) {
                    flat = flat * grid.cells[a] + axis[a][pick[a]].first;
                    k *= axis[a][pick[a]].second;
                }
                slice[flat] += k * contrib;
                int a = d - 1;
                while (a >= 0 && ++pick[a] == axis[a].size()) pick[a--] = 0;
                if (a < 0) break;
            }
        }
        out.J.push_back(std::move(slice));
    }
    return out;
}

MomentGrid moment_grid_from_density(const SpacetimeModel& model, const AnalyticDensity& density,
                                    const GridSpec& grid, const QuadratureSpec& spec, bool with_T) {
    check_grid(grid, model.dim);
    MomentGrid out;
    out.spec = grid;
    out.dim = model.dim;
    for (double t : grid.times) {
        std::vector<Vec> js;
        std::vector<Mat> ts;
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            Vec x(model.dim);
            x[0] = t;
            x.tail(model.dim - 1) = grid.cell_center(c);
            const Moments m = moments_from_E(model, density, x, spec);
            js.push_back(m.J);
            if (with_T) ts.push_back(m.T);
        }
        out.J.push_back(std::move(js));
        if (with_T) out.T.push_back(std::move(ts));
    }
    return out;
}

ContinuityReport continuity_residual(const MomentGrid& grid) {
    const GridSpec& g = grid.spec;
    const std::size_t nt = g.times.size();
    if (nt < 2) throw ConfigError("continuity_residual needs at least two time slices");
    const int d = static_cast<int>(g.cells.size());
    ContinuityReport rep;
    double sq = 0.0;

    auto flat_of = [&](const std::vector<int>& idx) {
        std::size_t f = 0;
        for (int a = 0; a < d; ++a) f = f * g.cells[a] + idx[a];
        return f;
    };
    auto spatial_div = [&](std::size_t k, const std::vector<int>& idx, bool& ok) {
        double div = 0.0;
        for (int a = 0; a < d; ++a) {
            if (g.cells[a] == 1) continue;
            std::vector<int> up = idx, dn = idx;
            up[a] += 1;
            dn[a] -= 1;
            if (g.periodic) {
                up[a] = (up[a] + g.cells[a]) % g.cells[a];
                dn[a] = (dn[a] + g.cells[a]) % g.cells[a];
            } else if (up[a] >= g.cells[a] || dn[a] < 0) {
                ok = false;
                return 0.0;
            }
            div += (grid.J[k][flat_of(up)][a + 1] - grid.J[k][flat_of(dn)][a + 1]) / (2 * g.spacing(a));
        }
        return div;
    };

    std::vector<int> idx(d, 0);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        std::size_t rem = c;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % g.cells[a]);
            rem /= g.cells[a];
        }
        if (nt == 2) {
            bool ok = true;
            const double dt = (grid.J[1][c][0] - grid.J[0][c][0]) / (g.times[1] - g.times[0]);
            const double div = 0.5 * (spatial_div(0, idx, ok) + spatial_div(1, idx, ok));
            if (!ok) continue;
            const double r = std::abs(dt + div);
            rep.max_abs = std::max(rep.max_abs, r);
            sq += r * r;
            ++rep.points;
        } else {
            for (std::size_t k = 1; k + 1 < nt; ++k) {
                bool ok = true;
                const double dt = (grid.J[k + 1][c][0] - grid.J[k - 1][c][0]) / (g.times[k + 1] - g.times[k - 1]);
                const double div = spatial_div(k, idx, ok);
                if (!ok) continue;
                const double r = std::abs(dt + div);
                rep.max_abs = std::max(rep.max_abs, r);
                sq += r * r;
                ++rep.points;
            }
        }
    }
    rep.l2 = rep.points ? std::sqrt(sq / rep.points) : 0.0;
    return rep;
}

} // namespace spraykit
