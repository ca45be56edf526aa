#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "scenario_detail.hpp"
#include "spraykit/io.hpp"
#include "spraykit/sampling.hpp"
#include "spraykit/spray.hpp"

namespace spraykit::detail {

namespace {

std::string idx(std::size_t i) { return fmt::format("{:03d}", i); }

double rel_inf(const Vec& a, const Vec& b) { return inf_norm(a - b) / std::max(1.0, inf_norm(b)); }

PhasePoint onto_level(const PhasePoint& u, const KinematicIndicator& f, const Node& where) {
    const double val = f(u);
    if (!(val > 0)) where.fail(fmt::format("initial condition has {} = {}, expected a positive value", f.F.name, val));
    PhasePoint out = u;
    out.v *= std::pow(f.level / val, 1.0 / f.degree);
    return out;
}

std::vector<double> uniform_grid(double a, double b, int intervals) {
    std::vector<double> g;
    for (int i = 0; i <= intervals; ++i) g.push_back(a + (b - a) * i / intervals);
    return g;
}

std::vector<ModelSpec> model_list(const Ctx& c) {
    if (!c.params.has("models")) return {c.cfg.model};
    std::vector<ModelSpec> out;
    const Node list = c.params["models"];
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(model_spec(list.at(i)));
    return out;
}

std::vector<SupportForm> support_list(const Ctx& c) {
    if (!c.params.has("supports")) return default_support_catalog();
    std::vector<SupportForm> out;
    const Node list = c.params["supports"];
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(support_from(list.at(i)));
    if (out.empty()) list.fail("at least one support form is required");
    return out;
}

} // namespace

Ctx::Ctx(const ScenarioConfig& c, RunReport& r)
    : cfg(c), model(build_model(c.model)), src{&c.text, &c.source}, params(src, &c.params, "/params"), report(r),
      checks(r) {
    if (c.charge_to_mass) model.charge_to_mass = *c.charge_to_mass;
}

std::vector<PhasePoint> Ctx::samples(std::size_t count, std::uint64_t salt) const {
    PhaseBox box = default_phase_box(model);
    if (params.has("box")) {
        const Node b = params["box"];
        b.allow({"x_lo", "x_hi", "v_lo", "v_hi"});
        box.x_lo = b.vec_or("x_lo", box.x_lo);
        box.x_hi = b.vec_or("x_hi", box.x_hi);
        box.v_lo = b.vec_or("v_lo", box.v_lo);
        box.v_hi = b.vec_or("v_hi", box.v_hi);
    }
    return sample_bundle(model, box, cfg.bundle, count, cfg.numeric.seed + 0x9e3779b97f4a7c15ULL * salt).points;
}

std::vector<KinematicIndicator> Ctx::indicators() const {
    std::vector<KinematicIndicator> out;
    if (cfg.indicators.empty()) return {indicator_hyperboloid(model)};
    for (const auto& s : cfg.indicators) out.push_back(build_indicator(model, s));
    return out;
}

VlasovField Ctx::field() const { return build_field(model, cfg.field); }

QuadratureSpec Ctx::quadrature() const { return {cfg.numeric.nodes, cfg.numeric.radial_nodes}; }

std::vector<PhasePoint> Ctx::initial_conditions(std::size_t fallback) const {
    if (!params.has("initial")) return samples(fallback, 101);
    std::vector<PhasePoint> out;
    const Node list = params["initial"];
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(phase_point(list.at(i), model.dim));
    if (out.empty()) list.fail("at least one initial condition is required");
    return out;
}

AnalyticDensity density_from(const Node& n, const SpacetimeModel& model, const KinematicIndicator& domain) {
    n.allow({"kind", "center", "sigma", "half_width", "modulation"});
    const std::string kind = n.str_or("kind", "gaussian");
    if (kind != "gaussian") n["kind"].fail(fmt::format("unknown density kind '{}' (known: gaussian)", kind));
    const int d = model.dim - 1;
    const Vec center = n.vec_or("center", Vec::Zero(d));
    const double sigma = n["sigma"].positive();
    const double half = n.positive_or("half_width", 8 * sigma);
    int axis = 0;
    double amp = 0.0, wave = 2 * std::numbers::pi;
    if (n.has("modulation")) {
        const Node m = n["modulation"];
        m.allow({"axis", "amplitude", "wavenumber"});
        axis = m["axis"].integer();
        if (axis < 1 || axis > d) m["axis"].fail(fmt::format("axis must be a spatial coordinate index in [1, {}]", d));
        amp = m["amplitude"].number();
        if (std::abs(amp) >= 1) m["amplitude"].fail("|amplitude| must be below 1 to keep f positive");
        wave = m.number_or("wavenumber", wave);
    }
    AnalyticDensity a;
    a.name = amp != 0.0 ? fmt::format("gaussian(sigma={}, modulated x{})", sigma, axis)
                        : fmt::format("gaussian(sigma={})", sigma);
    a.domain = domain;
    a.f = [center, sigma, axis, amp, wave](const PhasePoint& u) {
        const double mod = amp != 0.0 ? 1.0 + amp * std::sin(wave * u.x[axis]) : 1.0;
        return mod * std::exp(-(u.v.tail(center.size()) - center).squaredNorm() / (2 * sigma * sigma));
    };
    a.v_lo = center.array() - half;
    a.v_hi = center.array() + half;
    return a;
}

SupportForm support_from(const Node& n) {
    const std::string kind = n.is_string() ? n.str() : n["kind"].str();
    if (!n.is_string()) n.allow({"kind", "center", "half_width", "a", "b"});
    if (kind == "bump") {
        return n.is_string() ? support_bump(0.0, 0.5) : support_bump(n.number_or("center", 0.0), n.positive_or("half_width", 0.5));
    }
    if (kind == "box" || kind == "triangle") {
        double a = kind == "box" ? -1.0 : 0.0, b = kind == "box" ? 0.0 : 1.0;
        if (!n.is_string()) {
            a = n.number_or("a", a);
            b = n.number_or("b", b);
            if (!(b > a)) n.fail("support needs a < b");
        }
        return kind == "box" ? support_box(a, b) : support_triangle(a, b);
    }
    (n.is_string() ? n : n["kind"]).fail(fmt::format("unknown support form '{}' (known: bump, box, triangle)", kind));
}

GridSpec grid_from(const Node& n, int dim) {
    n.allow({"times", "lo", "hi", "cells", "periodic"});
    GridSpec g;
    g.times = n["times"].numbers();
    g.lo = n["lo"].vec(dim - 1);
    g.hi = n["hi"].vec(dim - 1);
    const Node cells = n["cells"];
    if (static_cast<int>(cells.size()) != dim - 1) cells.fail(fmt::format("expected {} cell counts", dim - 1));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const int k = cells.at(i).integer();
        if (k < 1) cells.at(i).fail("cell counts must be positive");
        g.cells.push_back(k);
    }
    for (int a = 0; a < dim - 1; ++a)
        if (!(g.hi[a] > g.lo[a])) n["hi"].fail("grid needs lo < hi on every axis");
    if (g.times.empty()) n["times"].fail("at least one time slice is required");
    g.periodic = n.bool_or("periodic", true);
    return g;
}

// ---------------------------------------------------------------------------------------------

void run_trajectories(Ctx& c) {
    c.params.allow({"initial", "count", "project", "conserved", "killing", "circular_radius", "circular_tol",
                    "expect_truncated", "box"});
    const VlasovField w = c.field();
    const auto inds = c.indicators();
    auto starts = c.initial_conditions(static_cast<std::size_t>(c.params.integer_or("count", 4)));
    if (c.params.bool_or("project", true))
        for (auto& s : starts) s = onto_level(s, inds[0], c.params);
    const auto paths = integrate_batch(w, starts, 0.0, c.cfg.numeric.span, c.cfg.numeric.steps, c.cfg.numeric.threads);

    int truncated = 0;
    std::vector<double> drift(inds.size(), 0.0);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        c.report.artifacts["traj_" + idx(i) + ".csv"] = trajectory_csv(c.model, paths[i]);
        truncated += paths[i].truncated ? 1 : 0;
        for (std::size_t k = 0; k < inds.size(); ++k)
            drift[k] = std::max(drift[k], indicator_drift(paths[i], inds[k].F).max_deviation);
    }
    if (c.params.bool_or("conserved", true))
        for (std::size_t k = 0; k < inds.size(); ++k)
            c.checks.below("indicator_drift[" + inds[k].name + "]", drift[k], c.cfg.numeric.tol);
    c.checks.equal("truncated_paths", truncated, c.params.integer_or("expect_truncated", 0));

    if (c.params.bool_or("killing", false)) {
        if (c.cfg.model.name != "schwarzschild") c.params["killing"].fail("Killing checks need the schwarzschild model");
        const double mass = c.cfg.model.params.count("mass") ? c.cfg.model.params.at("mass") : 1.0;
        double de = 0.0, dl = 0.0;
        for (const auto& p : paths) {
            auto energy = [&](const PhasePoint& u) { return (1 - 2 * mass / u.x[1]) * u.v[0]; };
            auto ang = [&](const PhasePoint& u) {
                const double s = std::sin(u.x[2]);
                return u.x[1] * u.x[1] * s * s * u.v[3];
            };
            const double e0 = energy(p.points.front()), l0 = ang(p.points.front());
            for (const auto& u : p.points) {
                de = std::max(de, std::abs(energy(u) - e0) / std::max(1e-12, std::abs(e0)));
                dl = std::max(dl, std::abs(ang(u) - l0) / std::max(1.0, std::abs(l0)));
            }
        }
        c.checks.below("killing_energy", de, c.cfg.numeric.tol);
        c.checks.below("killing_angular_momentum", dl, c.cfg.numeric.tol);
    }

    if (c.params.has("circular_radius")) {
        if (c.cfg.model.name != "schwarzschild")
            c.params["circular_radius"].fail("circular orbits need the schwarzschild model");
        const double mass = c.cfg.model.params.count("mass") ? c.cfg.model.params.at("mass") : 1.0;
        const double r0 = c.params["circular_radius"].positive();
        if (r0 <= 3 * mass) c.params["circular_radius"].fail("timelike circular orbits need r > 3M");
        PhasePoint u{Vec::Zero(4), Vec::Zero(4)};
        u.x << 0.0, r0, std::numbers::pi / 2, 0.0;
        const double omega = std::sqrt(mass / (r0 * r0 * r0));
        u.v[0] = 1.0 / std::sqrt(1 - 3 * mass / r0);
        u.v[3] = omega * u.v[0];
        const Prolongation p = integrate(w, u, 0.0, c.cfg.numeric.span, c.cfg.numeric.steps);
        double dr = 0.0;
        for (const auto& q : p.points) dr = std::max(dr, std::abs(q.x[1] - r0));
        const double rate = p.points.back().x[3] / p.points.back().x[0];
        const double tol = c.params.positive_or("circular_tol", 1e-6);
        c.checks.below("circular_orbit_radius", dr, tol);
        c.checks.below("circular_orbit_frequency", std::abs(rate - omega) / omega, tol);
        c.report.artifacts["traj_circular.csv"] = trajectory_csv(c.model, p);
    }
    c.report.data["paths"] = paths.size();
    c.report.data["indicators"] = Json::array();
    for (std::size_t k = 0; k < inds.size(); ++k)
        c.report.data["indicators"].push_back({{"name", inds[k].name}, {"max_drift", drift[k]}});
}

void run_leaf(Ctx& c) {
    c.params.allow({"initial", "t_nodes", "lambda", "substeps", "surface_tol", "contrast_field", "contrast_min", "box"});
    const VlasovField w = c.field();
    const PhasePoint u0 = c.initial_conditions(1).front();
    const double span = c.cfg.numeric.span;
    const int t_nodes = c.params.integer_or("t_nodes", 40);
    const auto tg = uniform_grid(0.0, span, t_nodes);
    const std::vector<double> lg =
        c.params.has("lambda") ? c.params["lambda"].numbers() : std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    const int substeps = c.params.integer_or("substeps", 10);
    const double tol = c.cfg.numeric.tol;

    const Leaf leaf = integrate_leaf(bivector_from_field(w), u0, tg, lg, substeps, tol);
    c.checks.below("tangency_ratio", leaf.max_tangency_ratio, tol);
    c.report.artifacts["leaf.csv"] = leaf_csv(leaf);

    // Representative shifted by sigma sqrt(F_H) R, integrated over the matching parameter range.
    const KinematicIndicator fl = indicator_hyperboloid_linear(c.model);
    const VlasovField w2 = add_radial(w, fl.F);
    const Reparameterization r = reparameterize_detailed(integrate(w, u0, 0.0, span, c.cfg.numeric.steps), fl.F);
    const Leaf leaf2 = integrate_leaf(bivector_from_field(w2), u0, uniform_grid(0.0, r.s_of_t.back(), t_nodes), lg,
                                      substeps, tol);
    c.checks.below("equivalent_tangency_ratio", leaf2.max_tangency_ratio, tol);
    c.checks.below("equivalent_surface_distance", leaf_hausdorff(leaf, leaf2), c.params.positive_or("surface_tol", 1e-5));
    c.report.artifacts["leaf_equivalent.csv"] = leaf_csv(leaf2);

    if (c.params.has("contrast_field")) {
        const VlasovField other = build_field(c.model, c.params["contrast_field"].str());
        const Leaf leaf3 = integrate_leaf(bivector_from_field(other), u0, tg, lg, substeps, tol);
        c.checks.above("contrast_surface_distance", leaf_hausdorff(leaf, leaf3),
                       c.params.positive_or("contrast_min", 1e-3));
    }
    c.report.data["s_end"] = r.s_of_t.back();
}

void run_transform_check(Ctx& c) {
    c.params.allow({"initial", "trajectories", "compat_tol", "box"});
    const VlasovField w = c.field();
    const auto ss = c.samples(static_cast<std::size_t>(c.cfg.numeric.samples));
    const auto starts = c.initial_conditions(static_cast<std::size_t>(c.params.integer_or("trajectories", 4)));
    const double compat_tol = c.params.positive_or("compat_tol", 1e-9);
    const double span = c.cfg.numeric.span;
    const int steps = c.cfg.numeric.steps;
    c.report.data["indicators"] = Json::array();
    for (const auto& f : c.indicators()) {
        const VlasovField wh = transform_to_domain(w, f);
        const double compat = compatibility_defect(wh, f.F, ss);
        c.checks.below("compatibility_defect[" + f.name + "]", compat, compat_tol);
        c.checks.flag("bracket[" + f.name + "]", bracket_defect(wh, ss).pass);
        const BundleScalar k{"k", [w, f](const PhasePoint& u) { return -apply_field(w, f.F, u) / (f.degree * f(u)); },
                             1, nullptr};
        double chordal = 0.0, hausdorff = 0.0;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            const PhasePoint s = onto_level(starts[i], f, c.params);
            const Prolongation pw = integrate(w, s, 0.0, span, steps);
            const Reparameterization r = reparameterize_detailed(pw, k);
            const Prolongation ph = integrate(wh, s, 0.0, r.s_of_t.back(), steps);
            const CurveDistance d = compare_base_curves(pw, ph);
            chordal = std::max(chordal, d.chordal);
            hausdorff = std::max(hausdorff, d.hausdorff);
            if (i == 0) {
                c.report.artifacts["traj_" + f.name + "_W.csv"] = trajectory_csv(c.model, pw);
                c.report.artifacts["traj_" + f.name + "_transformed.csv"] = trajectory_csv(c.model, ph);
            }
        }
        c.checks.below("chordal_distance[" + f.name + "]", chordal, c.cfg.numeric.tol);
        c.checks.below("hausdorff_distance[" + f.name + "]", hausdorff, c.cfg.numeric.tol);
        c.report.data["indicators"].push_back(
            {{"name", f.name}, {"compatibility_defect", compat}, {"chordal", chordal}, {"hausdorff", hausdorff}});
    }
}

void run_drift(Ctx& c) {
    c.params.allow({"initial", "count", "oracle", "min_slip", "write", "box"});
    const VlasovField w = c.field();
    const KinematicIndicator f = c.indicators().front();
    auto starts = c.initial_conditions(static_cast<std::size_t>(c.params.integer_or("count", 16)));
    for (auto& s : starts) s = onto_level(s, f, c.params);
    const auto paths = integrate_batch(w, starts, 0.0, c.cfg.numeric.span, c.cfg.numeric.steps, c.cfg.numeric.threads);
    const std::string oracle = c.params.str_or("oracle", "conserved");
    const bool nonmetric = oracle == "nonmetricity";
    if (!nonmetric && oracle != "conserved")
        c.params["oracle"].fail(fmt::format("unknown oracle '{}' (known: conserved, nonmetricity)", oracle));
    if (nonmetric && f.name != "hyperboloid")
        c.params["oracle"].fail("the nonmetricity oracle describes the drift of F_H; use the hyperboloid indicator");

    const std::size_t write = static_cast<std::size_t>(c.params.integer_or("write", 4));
    double max_delta = 0.0, worst_gap = 0.0, oracle_scale = 0.0;
    int truncated = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const Prolongation& p = paths[i];
        truncated += p.truncated ? 1 : 0;
        const DriftSeries d = indicator_drift(p, f.F);
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < p.size(); ++j) {
            max_delta = std::max(max_delta, std::abs(d.values[j] - f.level));
            std::vector<double> row{d.params[j], d.values[j], d.rates[j]};
            if (nonmetric) {
                const Vec& v = p.points[j].v;
                // Along the non-metric flow F_H changes at the rate -Q(v, v, v).
                const double q = -nonmetricity_at(c.model, p.points[j].x).contract3(v, v, v);
                worst_gap = std::max(worst_gap, std::abs(d.rates[j] - q));
                oracle_scale = std::max(oracle_scale, std::abs(q));
                row.push_back(q);
            }
            rows.push_back(std::move(row));
        }
        if (i < write) {
            std::vector<std::string> h{"t", f.F.name, "rate"};
            if (nonmetric) h.push_back("oracle_rate");
            c.report.artifacts["drift_" + idx(i) + ".csv"] = table_csv(h, rows);
            c.report.artifacts["traj_" + idx(i) + ".csv"] = trajectory_csv(c.model, p);
        }
    }
    c.checks.equal("truncated_paths", truncated, 0);
    c.report.data["max_abs_delta_F"] = max_delta;
    if (nonmetric) {
        c.checks.below("drift_rate_vs_Q", worst_gap, c.cfg.numeric.tol);
        c.checks.above("slip_magnitude", max_delta, c.params.positive_or("min_slip", 1e-4));
        c.report.data["drift_rate_vs_Q"] = worst_gap;
        c.report.data["max_abs_oracle_rate"] = oracle_scale;
    } else {
        c.checks.below("max_abs_delta_F", max_delta, c.cfg.numeric.tol);
    }
    c.report.data["paths"] = paths.size();
}

void run_density_advect(Ctx& c) {
    c.params.allow({"density", "count", "x_lo", "x_hi", "pilot", "projection_tol", "expect_tag", "expect_dropped",
                    "deposit"});
    const int n = c.model.dim;
    const VlasovField w = c.field();
    const KinematicIndicator f = c.indicators().front();
    const AnalyticDensity dens = density_from(c.params["density"], c.model, f);
    SeedOptions opts{c.params.vec_or("x_lo", Vec::Zero(n - 1)), c.params.vec_or("x_hi", Vec::Ones(n - 1)), 0.0,
                     static_cast<std::size_t>(c.params.integer_or("pilot", 4096))};
    const std::size_t count = static_cast<std::size_t>(c.params.integer_or("count", 2000));
    const ParticleEnsemble seeded = seed_from_analytic(c.model, dens, count, c.cfg.numeric.seed, opts);

    // Projection: idempotent, and E -> lab time -> E returns the same samples.
    const double ptol = c.params.positive_or("projection_tol", 1e-12);
    const ParticleEnsemble p1 = project_to_domain(seeded, f, f.level);
    const ParticleEnsemble p2 = project_to_domain(p1, f, f.level);
    const ParticleEnsemble back = project_to_domain(project_to_domain(p1, indicator_labtime(c.model), 1.0), f, f.level);
    double idem = 0.0, round = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        idem = std::max(idem, rel_inf(p2.samples[i].v, p1.samples[i].v));
        round = std::max(round, rel_inf(back.samples[i].v, p1.samples[i].v));
    }
    c.checks.at_most("projection_idempotence", idem, ptol);
    c.checks.at_most("projection_round_trip", round, ptol);
    c.checks.flag("projection_keeps_weights", p2.weights == seeded.weights && back.weights == seeded.weights);

    const AdvectResult r = advect(p1, w, c.cfg.numeric.span, c.cfg.numeric.steps, &f, c.cfg.numeric.threads,
                                  c.cfg.numeric.tol);
    double onshell = 0.0;
    for (const auto& u : r.ensemble.samples) onshell = std::max(onshell, std::abs(f(u) - f.level));
    c.checks.below("on_shell_deviation", onshell, c.cfg.numeric.tol);
    // Retained weights must sum to exactly what the same samples carried before.
    double retained_before = 0.0;
    std::size_t next_drop = 0;
    for (std::size_t i = 0; i < p1.size(); ++i) {
        if (next_drop < r.dropped.size() && r.dropped[next_drop] == i) {
            ++next_drop;
            continue;
        }
        retained_before += p1.weights[i];
    }
    c.checks.equal("weight_defect", r.ensemble.total_weight() - retained_before, 0.0);
    c.checks.equal("dropped_samples", static_cast<double>(r.dropped.size()), c.params.integer_or("expect_dropped", 0));
    if (c.params.bool_or("expect_tag", true)) c.checks.flag("tag_retained", r.tag_retained && r.ensemble.tag.on_E);

    c.report.artifacts["ensemble_initial.csv"] = ensemble_csv(p1);
    c.report.artifacts["ensemble_final.csv"] = ensemble_csv(r.ensemble);
    Json header{{"model", c.model.name}, {"field", w.label}, {"indicator", f.name}, {"seed", c.cfg.numeric.seed},
                {"tag", r.ensemble.tag.str()}, {"dropped_weight", r.dropped_weight}};
    c.report.artifacts["ensemble_final.json"] = header.dump(2) + "\n";
    c.report.data["total_weight"] = p1.total_weight();
    c.report.data["dropped_weight"] = r.dropped_weight;
    c.report.data["max_indicator_drift"] = r.max_indicator_drift;

    if (c.params.has("deposit")) {
        // Kernel estimate of the coordinate velocity J^a/J^0 on the seeding slice against quadrature.
        const Node dn = c.params["deposit"];
        dn.allow({"cells", "width", "z"});
        if (c.params["density"].has("modulation"))
            dn.fail("the deposition check assumes a density that is uniform in x");
        GridSpec g;
        g.times = {0.0};
        g.lo = opts.x_lo;
        g.hi = opts.x_hi;
        const Node cells = dn["cells"];
        for (std::size_t i = 0; i < cells.size(); ++i) g.cells.push_back(cells.at(i).integer());
        if (static_cast<int>(g.cells.size()) != n - 1) cells.fail(fmt::format("expected {} cell counts", n - 1));
        g.periodic = true;
        const double width = dn.positive_or("width", 0.25);
        const MomentGrid mg = current_grid_from_ensemble(p1, g, width);
        Vec x0 = Vec::Zero(n);
        x0.tail(n - 1) = opts.x_lo;
        const Vec jq = current_from_E(c.model, dens, x0, c.quadrature());
        // Kernel variance factor: int K^2 over resolved axes, 1/len over unresolved ones.
        double k2 = 1.0, volume = 1.0;
        for (int a = 0; a < n - 1; ++a) {
            const double len = g.hi[a] - g.lo[a];
            volume *= len;
            k2 *= g.cells[a] == 1 ? 1.0 / len : 2.0 / (3.0 * width);
        }
        const double n_eff = static_cast<double>(p1.size()) / (volume * k2);
        double worst_z = 0.0;
        for (int a = 1; a < n; ++a) {
            double mean = 0.0, sq = 0.0;
            for (const auto& u : p1.samples) {
                const double b = u.v[a] / u.v[0];
                mean += b;
                sq += b * b;
            }
            mean /= static_cast<double>(p1.size());
            const double sd = std::sqrt(std::max(0.0, sq / static_cast<double>(p1.size()) - mean * mean));
            const double se = sd / std::sqrt(n_eff);
            for (const auto& jc : mg.J[0]) {
                const double gap = std::abs(jc[a] / jc[0] - jq[a] / jq[0]);
                worst_z = std::max(worst_z, gap / se);
            }
        }
        c.checks.below("deposition_velocity_zscore", worst_z, dn.positive_or("z", 4.0));
        c.report.artifacts["deposit.csv"] = moment_grid_csv(mg);
    }
}

void run_moments(Ctx& c) {
    c.params.allow({"density", "x", "normalize", "expect_J", "expect_tol", "supports", "chi_tol", "continuity",
                    "continuity_tol"});
    const int n = c.model.dim;
    const KinematicIndicator f = c.indicators().front();
    const Vec x = c.params.vec_or("x", Vec::Zero(n));
    const QuadratureSpec spec = c.quadrature();
    AnalyticDensity dens = density_from(c.params["density"], c.model, f);
    if (c.params.bool_or("normalize", true)) dens = normalized(c.model, dens, x, spec);

    const Moments me = moments_from_E(c.model, dens, x, spec);
    c.checks.flag("no_truncation_warning", !me.truncation_warning);
    if (c.params.has("expect_J"))
        c.checks.below("J_vs_expected", inf_norm(me.J - c.params["expect_J"].vec(n)),
                       c.params.positive_or("expect_tol", 1e-3));

    const auto chis = support_list(c);
    std::vector<Vec> ju;
    std::vector<std::vector<double>> rows;
    std::vector<double> row0{0.0};
    for (int i = 0; i < n; ++i) row0.push_back(me.J[i]);
    rows.push_back(row0);
    for (std::size_t k = 0; k < chis.size(); ++k) {
        ju.push_back(current_from_U(c.model, dens, chis[k], x, spec));
        c.checks.below("J_U_vs_J_E[" + chis[k].name + "]", inf_norm(ju.back() - me.J), c.cfg.numeric.tol);
        std::vector<double> row{static_cast<double>(k + 1)};
        for (int i = 0; i < n; ++i) row.push_back(ju.back()[i]);
        rows.push_back(row);
    }
    double chi_rel = 0.0;
    for (std::size_t a = 0; a < ju.size(); ++a)
        for (std::size_t b = a + 1; b < ju.size(); ++b)
            chi_rel = std::max(chi_rel, inf_norm(ju[a] - ju[b]) / std::max(inf_norm(ju[a]), inf_norm(ju[b])));
    if (ju.size() > 1) c.checks.below("chi_independence", chi_rel, c.params.positive_or("chi_tol", 1e-6));
    std::vector<std::string> h{"source"};
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("J{}", i));
    c.report.artifacts["moments.csv"] = table_csv(h, rows);

    c.report.data["J_E"] = vec_json(me.J);
    c.report.data["boundary_ratio"] = me.boundary_ratio;
    c.report.data["supports"] = Json::array();
    for (std::size_t k = 0; k < chis.size(); ++k)
        c.report.data["supports"].push_back({{"name", chis[k].name}, {"J", vec_json(ju[k])}});

    if (c.params.has("continuity")) {
        const GridSpec g = grid_from(c.params["continuity"], n);
        const MomentGrid mg = moment_grid_from_density(c.model, dens, g, spec);
        const ContinuityReport cr = continuity_residual(mg);
        c.checks.below("continuity_residual", cr.max_abs, c.params.positive_or("continuity_tol", 1e-6));
        c.report.artifacts["moment_grid.csv"] = moment_grid_csv(mg);
        Json meta{{"model", c.model.name},
                  {"density", dens.name},
                  {"chi", "none (E_H quadrature path)"},
                  {"quadrature", {{"nodes", spec.nodes}, {"radial_nodes", spec.radial_nodes}}},
                  {"tolerances", {{"continuity", c.params.positive_or("continuity_tol", 1e-6)}}}};
        c.report.artifacts["moment_grid.json"] = meta.dump(2) + "\n";
        c.report.data["continuity"] = {{"max_abs", cr.max_abs}, {"l2", cr.l2}, {"points", cr.points}};
    }
}

void run_dependence_report(Ctx& c) {
    c.params.allow({"density", "x", "supports", "min_T_variation", "max_J_variation", "cold"});
    const int n = c.model.dim;
    const auto doms = c.indicators();
    const Vec x = c.params.vec_or("x", Vec::Zero(n));
    const QuadratureSpec spec = c.quadrature();
    const AnalyticDensity warm = density_from(c.params["density"], c.model, doms.front());
    const auto chis = support_list(c);
    const DependenceReport rep = stress_energy_dependence_report(c.model, warm, x, doms, chis, spec);

    double sym = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t e = 0; e < rep.entries.size(); ++e) {
        const auto& en = rep.entries[e];
        sym = std::max(sym, (en.T - en.T.transpose()).cwiseAbs().maxCoeff());
        std::vector<double> row{static_cast<double>(e)};
        for (int i = 0; i < n; ++i) row.push_back(en.J[i]);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) row.push_back(en.T(i, j));
        rows.push_back(row);
    }
    c.checks.equal("T_symmetry_defect", sym, 0.0);
    if (rep.entries.size() > 1) {
        c.checks.above("T_variation", rep.max_T_rel_diff, c.params.positive_or("min_T_variation", 1e-3));
        c.checks.below("J_variation", rep.max_J_rel_diff, c.params.positive_or("max_J_variation", 1e-6));
    }
    std::vector<std::string> h{"entry"};
    for (int i = 0; i < n; ++i) h.push_back(fmt::format("J{}", i));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) h.push_back(fmt::format("T{}{}", i, j));
    c.report.artifacts["dependence.csv"] = table_csv(h, rows);
    c.report.data["entries"] = Json::array();
    for (std::size_t e = 0; e < rep.entries.size(); ++e)
        c.report.data["entries"].push_back(
            {{"entry", e}, {"domain", rep.entries[e].domain}, {"chi", rep.entries[e].chi}});
    c.report.data["max_T_rel_diff"] = rep.max_T_rel_diff;
    c.report.data["max_J_rel_diff"] = rep.max_J_rel_diff;

    if (c.params.has("cold")) {
        // Normalized cold beam in a fixed direction: T -> u u with u the unit velocity.
        const Node cold = c.params["cold"];
        cold.allow({"sigmas", "center"});
        const std::vector<double> sigmas = cold["sigmas"].numbers();
        const Vec center = cold.vec_or("center", Vec::Zero(n - 1));
        const KinematicIndicator fh = indicator_hyperboloid(c.model);
        const Vec u = complete_velocity(c.model, fh, x, center, 1.0);
        const Mat dust = u * u.transpose();
        std::vector<double> errs;
        std::vector<std::vector<double>> crow;
        bool exact_sym = true;
        for (double s : sigmas) {
            if (!(s > 0)) cold["sigmas"].fail("sigmas must be positive");
            AnalyticDensity beam = warm;
            const double inv = 1.0 / (2 * s * s);
            beam.name = fmt::format("cold(sigma={})", s);
            beam.domain = fh;
            beam.f = [center, inv](const PhasePoint& q) {
                return std::exp(-(q.v.tail(center.size()) - center).squaredNorm() * inv);
            };
            beam.v_lo = center.array() - 8 * s;
            beam.v_hi = center.array() + 8 * s;
            beam = normalized(c.model, beam, x, spec);
            const Mat t = stress_energy_at(c.model, beam, x, spec);
            exact_sym = exact_sym && (t - t.transpose()).cwiseAbs().maxCoeff() == 0.0;
            errs.push_back((t - dust).cwiseAbs().maxCoeff());
            crow.push_back({s, errs.back()});
        }
        bool monotone = true;
        for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] < errs[i - 1];
        c.checks.flag("cold_T_symmetric", exact_sym);
        c.checks.flag("cold_refinement_monotone", monotone);
        c.checks.below("cold_dust_error", errs.empty() ? INFINITY : errs.back(), c.cfg.numeric.tol);
        c.report.artifacts["cold_refinement.csv"] = table_csv({"sigma", "max_abs_T_minus_dust"}, crow);
    }
}

// ---------------------------------------------------------------------------------------------

namespace {

void suite_homogeneity(Ctx& c) {
    c.params.allow({"models", "fields", "analytic_tol", "fd_tol"});
    const double atol = c.params.positive_or("analytic_tol", 1e-9);
    const double ftol = c.params.positive_or("fd_tol", 1e-6);
    std::vector<std::string> fields{"geodesic", "lorentz"};
    if (c.params.has("fields")) {
        fields.clear();
        const Node l = c.params["fields"];
        for (std::size_t i = 0; i < l.size(); ++i) fields.push_back(l.at(i).str());
    }
    const auto specs = model_list(c);
    for (std::size_t mi = 0; mi < specs.size(); ++mi) {
        const SpacetimeModel m = build_model(specs[mi]);
        const std::string tag = fmt::format("{}:{}", mi, m.name);
        const auto ss = sample_bundle(m, default_phase_box(m), BundleKind::Timelike,
                                      static_cast<std::size_t>(c.cfg.numeric.samples), c.cfg.numeric.seed + mi)
                            .points;
        for (const auto& fname : fields) {
            const VlasovField w = build_field(m, fname);
            c.checks.below("radial_quadraticity[" + tag + "/" + fname + "]", radial_quadraticity(w, ss, atol).max_rel_error,
                           atol);
            c.checks.below("bracket[" + tag + "/" + fname + "]", bracket_defect(w, ss, ftol).max_rel, ftol);
        }
        std::vector<KinematicIndicator> inds{indicator_hyperboloid(m), indicator_hyperboloid_linear(m),
                                             indicator_coordinate(m)};
        if (m.labtime) inds.push_back(indicator_labtime(m));
        for (const auto& k : inds)
            c.checks.below("indicator_homogeneity[" + tag + "/" + k.name + "]",
                           check_homogeneity(k.F, k.degree, ss, false, atol).max_rel_error, atol);
    }
}

// Lab-time field written out term by term: phi - (phi.grad t + v.Hess(t).v) v / v<t>.
Vec labtime_oracle(const SpacetimeModel& m, const PhasePoint& u) {
    const int n = m.dim;
    const Mat g = metric_at(m, u.x);
    const double fh = -u.v.dot(g * u.v);
    const int sigma = causal_indicator(m, u);
    Vec force = Vec::Zero(n);
    if (m.faraday && m.charge_to_mass != 0.0)
        force = m.charge_to_mass * sigma * std::sqrt(fh) * (inverse_metric_at(m, u.x) * (faraday_at(m, u.x) * u.v));
    const Vec gvv = christoffel_at(m, u.x).contract(u.v, u.v);
    const Vec dt = m.labtime->grad(u.x);
    const Mat ht = m.labtime->hess(u.x);
    const Vec phi = force - gvv;
    const double bracket = force.dot(dt) - gvv.dot(dt) + u.v.dot(ht * u.v);
    return phi - bracket * u.v / u.v.dot(dt);
}

void suite_labtime(Ctx& c) {
    c.params.allow({"models"});
    const auto specs = model_list(c);
    for (std::size_t mi = 0; mi < specs.size(); ++mi) {
        SpacetimeModel m = build_model(specs[mi]);
        if (c.cfg.charge_to_mass) m.charge_to_mass = *c.cfg.charge_to_mass;
        if (!m.labtime) throw MissingLabTimeError(m.name + " has no lab time");
        const VlasovField lt = transform_to_domain(build_field(m, c.cfg.field), indicator_labtime(m));
        const auto ss = sample_bundle(m, default_phase_box(m), BundleKind::Timelike,
                                      static_cast<std::size_t>(c.cfg.numeric.samples), c.cfg.numeric.seed + mi)
                            .points;
        double worst = 0.0;
        for (const auto& u : ss) worst = std::max(worst, rel_inf(lt(u), labtime_oracle(m, u)));
        c.checks.below(fmt::format("labtime_coefficients[{}:{}]", mi, m.name), worst, c.cfg.numeric.tol);
    }
}

void suite_null(Ctx& c) {
    c.params.allow({"initial", "reference_tol", "min_residual"});
    if (c.model.dim != 2 || !c.model.labtime) throw ConfigError("null-labtime needs a 2D model with a lab time");
    std::vector<PhasePoint> starts;
    if (c.params.has("initial")) {
        starts = c.initial_conditions(1);
    } else {
        Vec a(2), b(2);
        starts = {{(a << 0.0, 0.3).finished(), (b << 1.0, 1.0).finished()}};
        starts.push_back({(a << 0.0, -0.4).finished(), (b << 1.0, -1.0).finished()});
        starts.push_back({(a << 0.5, 1.0).finished(), (b << 2.0, 2.0).finished()});
    }
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto& v = starts[i].v;
        if (std::abs(v[0] * v[0] - v[1] * v[1]) > 1e-12 * v.squaredNorm())
            c.params.fail(fmt::format("initial condition {} is not null", i));
        const NullLabtimeReport r = null_labtime_defect(c.model, starts[i], c.cfg.numeric.span, c.cfg.numeric.steps);
        const std::string s = idx(i);
        c.checks.below("coordinate_time_residual[" + s + "]", r.reference_max_residual,
                       c.params.positive_or("reference_tol", 1e-10));
        c.checks.above("labtime_residual[" + s + "]", r.max_residual, c.params.positive_or("min_residual", 1e-3));
        c.checks.below("oracle_gap[" + s + "]", r.max_oracle_gap, c.cfg.numeric.tol);
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < r.params.size(); ++j)
            rows.push_back({r.params[j], r.path.points[j].x[0], r.path.points[j].x[1], r.residual[j], r.oracle[j]});
        c.report.artifacts["null_labtime_" + s + ".csv"] = table_csv({"s", "x0", "x1", "residual", "oracle"}, rows);
    }
}

void suite_bivector(Ctx& c) {
    c.params.allow({"wedge_trials", "box"});
    const VlasovField w = c.field();
    const auto ss = c.samples(static_cast<std::size_t>(c.cfg.numeric.samples));
    const KinematicIndicator fl = indicator_hyperboloid_linear(c.model);
    const VlasovField w2 = add_radial(w, fl.F);
    c.checks.flag("equal_under_radial_shift", bivectors_equal(bivector_from_field(w), bivector_from_field(w2), ss));
    const ProjectiveReport pr = projectively_equivalent(w, w2, ss);
    double kerr = 0.0;
    for (std::size_t i = 0; i < ss.size(); ++i) kerr = std::max(kerr, std::abs(pr.k_values[i] - fl(ss[i])));
    c.checks.below("recovered_k_vs_sigma_sqrt_FH", kerr, 1e-10);
    if (c.model.faraday && c.model.charge_to_mass != 0.0)
        c.checks.flag("distinct_from_geodesic",
                      !bivectors_equal(bivector_from_field(w), bivector_from_field(geodesic_field(c.model)), ss));

    std::vector<KinematicIndicator> inds = c.cfg.indicators.empty()
                                               ? std::vector<KinematicIndicator>{indicator_hyperboloid(c.model),
                                                                                 indicator_labtime(c.model),
                                                                                 indicator_coordinate(c.model), fl}
                                               : c.indicators();
    const VlasovBivector psi = bivector_from_field(w2);
    for (const auto& k : inds) {
        const VlasovField a = field_from_bivector(psi, k);
        const VlasovField b = transform_to_domain(w, k);
        double worst = 0.0;
        for (const auto& u : ss) worst = std::max(worst, inf_norm(a(u) - b(u)));
        c.checks.at_most("field_from_bivector_vs_transform[" + k.name + "]", worst, c.cfg.numeric.tol);
    }

    // Wedge pairs (R, W) against a determinant-one family and scaled copies of it.
    CounterRng rng(c.cfg.numeric.seed);
    const int trials = c.params.integer_or("wedge_trials", 50);
    int det1 = 0, rejected = 0, used = 0;
    for (int t = 0; used < trials; ++t) {
        const PhasePoint& u = ss[static_cast<std::size_t>(t) % ss.size()];
        const int n = c.model.dim;
        Vec r(2 * n), x(2 * n);
        r << Vec::Zero(n), u.v;
        x << u.v, w(u);
        const double a = rng.uniform(t, 0) * 4 - 2, b = rng.uniform(t, 1) * 4 - 2, cc = rng.uniform(t, 2) * 4 - 2;
        if (std::abs(a) < 0.1) continue;
        ++used;
        const double d = (1 + b * cc) / a;
        const double scale = 1.5 + rng.uniform(t, 3);
        det1 += wedge_pair_equal(r, x, a * r + b * x, cc * r + d * x) ? 1 : 0;
        rejected += wedge_pair_equal(r, x, a * r + b * x, scale * (cc * r + d * x)) ? 0 : 1;
    }
    c.checks.equal("wedge_det_one_accepted", det1, trials);
    c.checks.equal("wedge_det_other_rejected", rejected, trials);
}

void suite_spray(Ctx& c) {
    c.params.allow({"box"});
    const int n = c.model.dim;
    const VlasovField lt = transform_to_domain(c.field(), indicator_labtime(c.model));
    const SemiSpray k = semispray_from_spray(lt, n);
    const VlasovField ext = spray_from_semispray(k);
    const SemiSpray back = semispray_from_spray(ext, n);
    const auto ss = c.samples(static_cast<std::size_t>(c.cfg.numeric.samples));
    double coeff = 0.0, full = 0.0;
    for (const auto& u : ss) {
        const Vec xs = u.x.tail(n - 1), us = u.v.tail(n - 1) / u.v[0];
        coeff = std::max(coeff, rel_inf(back.coeffs(u.x[0], xs, us), k.coeffs(u.x[0], xs, us)));
        full = std::max(full, rel_inf(ext(u), lt(u)));
    }
    c.checks.at_most("semispray_round_trip", coeff, c.cfg.numeric.tol);
    c.checks.at_most("extension_matches_labtime_field", full, c.cfg.numeric.tol);

    // A semi-spray that is not the restriction of anything in the catalog.
    SemiSpray syn;
    syn.label = "synthetic";
    syn.dim = n;
    syn.coeffs = [](double s, const Vec& x, const Vec& v) -> Vec {
        Vec out(x.size());
        for (Eigen::Index a = 0; a < x.size(); ++a)
            out[a] = -0.3 * v[a] * v.squaredNorm() + std::sin(s + x[a]) + 0.1 * v[(a + 1) % x.size()];
        return out;
    };
    const SemiSpray syn_back = semispray_from_spray(spray_from_semispray(syn), n);
    double sworst = 0.0;
    for (const auto& u : ss) {
        const Vec xs = u.x.tail(n - 1), us = u.v.tail(n - 1) / u.v[0];
        sworst = std::max(sworst, rel_inf(syn_back.coeffs(u.x[0], xs, us), syn.coeffs(u.x[0], xs, us)));
    }
    c.checks.at_most("synthetic_round_trip", sworst, c.cfg.numeric.tol);
    c.checks.flag("extension_radially_quadratic", radial_quadraticity(ext, ss).pass);
}

// Closed-form Schwarzschild Christoffels in (t, r, theta, phi).
Tensor3 schwarzschild_gamma(double m, const Vec& x) {
    const double r = x[1], th = x[2], f = 1 - 2 * m / r;
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

void suite_hygiene(Ctx& c) {
    c.params.allow({"rk4", "fd"});
    // RK4 against hyperbolic motion x = (sinh(a tau)/a, (cosh(a tau) - 1)/a) from rest.
    static const Json empty = Json::object();
    const Node rk = c.params.has("rk4") ? c.params["rk4"] : Node(c.src, &empty, "/params/rk4");
    rk.allow({"acceleration", "steps", "span"});
    const double acc = rk.positive_or("acceleration", 1.0);
    const int steps = rk.integer_or("steps", 40);
    const double span = rk.positive_or("span", 1.0);
    const SpacetimeModel me = minkowski_electric(acc, 1.0);
    auto end_error = [&](int k) {
        Vec v0 = Vec::Zero(4);
        v0[0] = 1.0;
        const Prolongation p = integrate(lorentz_field(me), {Vec::Zero(4), v0}, 0.0, span, k);
        Vec exact = Vec::Zero(4);
        exact[0] = std::sinh(acc * span) / acc;
        exact[1] = (std::cosh(acc * span) - 1) / acc;
        return (p.points.back().x - exact).norm();
    };
    const double e1 = end_error(steps), e2 = end_error(2 * steps);
    c.checks.within("rk4_step_halving_ratio", e1 / e2, 14.0, 18.0);

    const Node fd = c.params.has("fd") ? c.params["fd"] : Node(c.src, &empty, "/params/fd");
    fd.allow({"mass", "point", "steps", "default_tol"});
    const double mass = fd.positive_or("mass", 1.0);
    Vec x(4);
    x << 0.0, 10.0 * mass, 1.1, 0.4;
    x = fd.vec_or("point", x);
    std::vector<double> hs{0.2, 0.1};
    if (fd.has("steps")) hs = fd["steps"].numbers();
    if (hs.size() != 2 || !(hs[0] > hs[1] && hs[1] > 0)) fd.fail("fd steps must be two decreasing positive numbers");
    const SpacetimeModel s = schwarzschild(mass);
    const Tensor3 oracle = schwarzschild_gamma(mass, x);
    const double f1 = (christoffel_at(s, x, hs[0]) - oracle).max_abs();
    const double f2 = (christoffel_at(s, x, hs[1]) - oracle).max_abs();
    const double expect = (hs[0] / hs[1]) * (hs[0] / hs[1]);
    c.checks.within("fd_christoffel_ratio", f1 / f2, expect * 3.5 / 4.0, expect * 4.5 / 4.0);
    c.checks.below("fd_christoffel_default_step", (christoffel_at(s, x) - oracle).max_abs(),
                   fd.positive_or("default_tol", 1e-6));
    c.report.data["rk4_errors"] = {e1, e2};
    c.report.data["fd_errors"] = {f1, f2};
}

} // namespace

void run_invariant_suite(Ctx& c) {
    const std::string& s = c.cfg.suite;
    if (s == "homogeneity")
        suite_homogeneity(c);
    else if (s == "labtime-coefficients")
        suite_labtime(c);
    else if (s == "null-labtime")
        suite_null(c);
    else if (s == "bivector")
        suite_bivector(c);
    else if (s == "spray-roundtrip")
        suite_spray(c);
    else if (s == "hygiene")
        suite_hygiene(c);
    else
        throw ConfigError("unknown invariant suite '" + s + "'");
}

} // namespace spraykit::detail
