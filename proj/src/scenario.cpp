#include "spraykit/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "scenario_detail.hpp"
#include "spraykit/io.hpp"

namespace spraykit {

namespace detail {

namespace {

struct Pos {
    int line = 1;
    int col = 1;
};

Pos offset_to_pos(const std::string& text, std::size_t off) {
    Pos p;
    for (std::size_t i = 0; i < std::min(off, text.size()); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.col = 1;
        } else {
            ++p.col;
        }
    }
    return p;
}

// Follows the object keys of a JSON pointer through the source text, in order. Good enough
// for configs that do not repeat a key name before the one being located.
bool locate(const std::string& text, const std::string& pointer, Pos& out) {
    std::size_t at = 0;
    bool found = false;
    std::stringstream ss(pointer);
    std::string tok;
    while (std::getline(ss, tok, '/')) {
        if (tok.empty() || std::all_of(tok.begin(), tok.end(), ::isdigit)) continue;
        const std::string quoted = "\"" + tok + "\"";
        std::size_t k = at;
        while ((k = text.find(quoted, k)) != std::string::npos) {
            std::size_t j = k + quoted.size();
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == ':') break;
            k += quoted.size();
        }
        if (k == std::string::npos) break;
        at = k;
        found = true;
    }
    if (found) out = offset_to_pos(text, at);
    return found;
}

} // namespace

void fail(const Src& src, const std::string& pointer, const std::string& message) {
    Pos p;
    const std::string where = pointer.empty() ? "/" : pointer;
    if (src.text && locate(*src.text, pointer, p))
        throw ConfigError(fmt::format("{}:{}:{}: {}: {}", *src.source, p.line, p.col, where, message));
    throw ConfigError(fmt::format("{}: {}: {}", *src.source, where, message));
}

Node Node::operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end()) detail::fail(src_, ptr_ + "/" + key, "missing required key");
    return Node(src_, &*it, ptr_ + "/" + key);
}

Node Node::at(std::size_t i) const {
    if (!j_->is_array()) fail("expected an array");
    if (i >= j_->size()) fail(fmt::format("index {} out of range", i));
    return Node(src_, &(*j_)[i], fmt::format("{}/{}", ptr_, i));
}

std::size_t Node::size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
}

double Node::number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
}

double Node::positive() const {
    const double v = number();
    if (!(v > 0)) fail("expected a positive number");
    return v;
}

int Node::integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<int>();
}

std::string Node::str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
}

bool Node::boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
}

Vec Node::vec(int length) const {
    const std::size_t n = size();
    if (length >= 0 && static_cast<int>(n) != length) fail(fmt::format("expected {} numbers, got {}", length, n));
    Vec v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
}

std::vector<double> Node::numbers() const {
    std::vector<double> v;
    for (std::size_t i = 0; i < size(); ++i) v.push_back(at(i).number());
    return v;
}

void Node::allow(std::initializer_list<const char*> keys) const {
    if (!j_->is_object()) fail("expected an object");
    for (auto it = j_->begin(); it != j_->end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) {
            std::string known;
            for (const char* k : keys) known += (known.empty() ? "" : ", ") + std::string(k);
            detail::fail(src_, ptr_ + "/" + it.key(), fmt::format("unknown key (allowed: {})", known));
        }
    }
}

bool Checks::add(CheckResult c) {
    r_.checks.push_back(c);
    return c.pass;
}

bool Checks::below(const std::string& name, double m, double t) { return add({name, m < t, m, t, "<", 0.0}); }
bool Checks::at_most(const std::string& name, double m, double t) { return add({name, m <= t, m, t, "<=", 0.0}); }
bool Checks::above(const std::string& name, double m, double t) { return add({name, m > t, m, t, ">", 0.0}); }
bool Checks::within(const std::string& name, double m, double lo, double hi) {
    return add({name, m >= lo && m <= hi, m, lo, "in", hi});
}
bool Checks::equal(const std::string& name, double m, double e) { return add({name, m == e, m, e, "==", 0.0}); }
bool Checks::flag(const std::string& name, bool ok) { return add({name, ok, ok ? 1.0 : 0.0, 1.0, "==", 0.0}); }

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json mat_json(const Mat& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

ModelSpec model_spec(const Node& n) {
    n.allow({"name", "params"});
    ModelSpec s;
    s.name = n["name"].str();
    if (n.has("params")) {
        const Node p = n["params"];
        if (!p.is_object()) p.fail("expected an object");
        for (auto it = p.json().begin(); it != p.json().end(); ++it) s.params[it.key()] = p[it.key()].number();
    }
    check_model_spec(n, s);
    return s;
}

void check_model_spec(const Node& n, const ModelSpec& s) {
    const auto& names = model_names();
    if (std::find(names.begin(), names.end(), s.name) == names.end()) {
        std::string known;
        for (const auto& k : names) known += (known.empty() ? "" : ", ") + k;
        n["name"].fail(fmt::format("unknown model '{}' (known: {})", s.name, known));
    }
    try {
        (void)build_model(s);
    } catch (const ConfigError& e) {
        (n.has("params") ? n["params"] : n).fail(e.what());
    }
}

PhasePoint phase_point(const Node& n, int dim) {
    n.allow({"x", "v"});
    return {n["x"].vec(dim), n["v"].vec(dim)};
}

} // namespace detail

using detail::Node;
using detail::Src;

const std::vector<std::string>& run_kinds() {
    static const std::vector<std::string> k{"trajectories",  "leaf",    "transform-check",   "drift",
                                            "density-advect", "moments", "dependence-report", "invariant-suite"};
    return k;
}

const std::vector<std::string>& invariant_suites() {
    static const std::vector<std::string> k{"homogeneity",     "labtime-coefficients", "null-labtime",
                                            "bivector",        "spray-roundtrip",      "hygiene"};
    return k;
}

const std::vector<std::string>& model_names() {
    static const std::vector<std::string> k{"minkowski", "schwarzschild", "minkowski_electric",
                                            "minkowski_nonmetric", "minkowski2_labtime"};
    return k;
}

namespace {

double take(std::map<std::string, double>& p, const std::string& key, double def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    const double v = it->second;
    p.erase(it);
    return v;
}

int take_dim(std::map<std::string, double>& p, int def) {
    const double d = take(p, "dim", def);
    if (d != std::floor(d) || d < 2 || d > 8) throw ConfigError(fmt::format("dim must be an integer in [2, 8], got {}", d));
    return static_cast<int>(d);
}

} // namespace

SpacetimeModel build_model(const ModelSpec& spec) {
    auto p = spec.params;
    SpacetimeModel m;
    if (spec.name == "minkowski") {
        m = minkowski(take_dim(p, 4));
    } else if (spec.name == "schwarzschild") {
        m = schwarzschild(take(p, "mass", 1.0));
    } else if (spec.name == "minkowski_electric") {
        const double e0 = take(p, "e0", 0.3), qm = take(p, "qm", 1.0);
        m = minkowski_electric(e0, qm, take_dim(p, 4));
    } else if (spec.name == "minkowski_nonmetric") {
        const double eps = take(p, "eps", 0.05), bump = take(p, "bump", 0.0);
        m = minkowski_nonmetric(eps, bump, take_dim(p, 4));
    } else if (spec.name == "minkowski2_labtime") {
        m = minkowski2_labtime(take(p, "amplitude", 0.2));
    } else {
        throw ConfigError(fmt::format("unknown model '{}'", spec.name));
    }
    if (!p.empty()) throw ConfigError(fmt::format("unknown parameter '{}' for model {}", p.begin()->first, spec.name));
    return m;
}

VlasovField build_field(const SpacetimeModel& model, const std::string& name) {
    if (name == "geodesic") return geodesic_field(model);
    if (name == "lorentz") return lorentz_field(model);
    throw ConfigError(fmt::format("unknown field '{}' (known: geodesic, lorentz)", name));
}

KinematicIndicator build_indicator(const SpacetimeModel& model, const IndicatorSpec& spec) {
    KinematicIndicator k;
    if (spec.name == "hyperboloid")
        k = indicator_hyperboloid(model);
    else if (spec.name == "hyperboloid_linear")
        k = indicator_hyperboloid_linear(model);
    else if (spec.name == "labtime")
        k = indicator_labtime(model);
    else if (spec.name == "coordinate")
        k = indicator_coordinate(model);
    else
        throw ConfigError(fmt::format("unknown indicator '{}' (known: hyperboloid, hyperboloid_linear, labtime, coordinate)",
                                      spec.name));
    k.level = spec.level;
    return k;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    ScenarioConfig cfg;
    cfg.source = source;
    cfg.text = text;
    const Src src{&cfg.text, &cfg.source};
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        int line = 1, col = 1;
        for (std::size_t i = 0; i < std::min(off, text.size()); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(fmt::format("{}:{}:{}: malformed JSON: {}", source, line, col, e.what()));
    }
    const Node r(src, &root, "");
    r.allow({"$schema", "name", "description", "model", "field", "indicators", "bundle", "run", "suite", "params",
             "numeric", "output"});
    cfg.name = r["name"].str();
    if (cfg.name.empty() || cfg.name.find_first_of("/\\ ") != std::string::npos)
        r["name"].fail("name must be non-empty without spaces or slashes");
    cfg.description = r.str_or("description", "");
    cfg.model = detail::model_spec(r["model"]);
    const SpacetimeModel model = build_model(cfg.model);

    if (r.has("field")) {
        const Node f = r["field"];
        if (f.is_string()) {
            cfg.field = f.str();
        } else {
            f.allow({"name", "charge_to_mass"});
            cfg.field = f["name"].str();
            if (f.has("charge_to_mass")) cfg.charge_to_mass = f["charge_to_mass"].number();
        }
        if (cfg.field != "geodesic" && cfg.field != "lorentz")
            (f.is_string() ? f : f["name"]).fail(fmt::format("unknown field '{}' (known: geodesic, lorentz)", cfg.field));
    }

    if (r.has("indicators")) {
        const Node list = r["indicators"];
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Node e = list.at(i);
            IndicatorSpec s;
            if (e.is_string()) {
                s.name = e.str();
            } else {
                e.allow({"name", "level"});
                s.name = e["name"].str();
                s.level = e.positive_or("level", 1.0);
            }
            try {
                (void)build_indicator(model, s);
            } catch (const Error& err) {
                e.fail(err.what());
            }
            cfg.indicators.push_back(s);
        }
    }

    if (r.has("bundle")) {
        try {
            cfg.bundle = bundle_kind_from_string(r["bundle"].str());
        } catch (const ConfigError& e) {
            r["bundle"].fail(e.what());
        }
    }

    cfg.run = r["run"].str();
    const auto& kinds = run_kinds();
    if (std::find(kinds.begin(), kinds.end(), cfg.run) == kinds.end()) {
        std::string known;
        for (const auto& k : kinds) known += (known.empty() ? "" : ", ") + k;
        r["run"].fail(fmt::format("unknown run kind '{}' (known: {})", cfg.run, known));
    }
    if (cfg.run == "invariant-suite") {
        cfg.suite = r["suite"].str();
        const auto& suites = invariant_suites();
        if (std::find(suites.begin(), suites.end(), cfg.suite) == suites.end()) {
            std::string known;
            for (const auto& k : suites) known += (known.empty() ? "" : ", ") + k;
            r["suite"].fail(fmt::format("unknown suite '{}' (known: {})", cfg.suite, known));
        }
    } else if (r.has("suite")) {
        r["suite"].fail("suite is only meaningful for run = invariant-suite");
    }

    if (r.has("params")) {
        if (!r["params"].is_object()) r["params"].fail("expected an object");
        cfg.params = root["params"];
    }

    if (r.has("numeric")) {
        const Node n = r["numeric"];
        n.allow({"steps", "span", "samples", "seed", "nodes", "radial_nodes", "tol", "threads"});
        auto count = [&](const char* key, int def) {
            const int v = n.integer_or(key, def);
            if (v < 1) n[key].fail("expected a positive integer");
            return v;
        };
        cfg.numeric.steps = count("steps", cfg.numeric.steps);
        cfg.numeric.samples = count("samples", cfg.numeric.samples);
        cfg.numeric.nodes = count("nodes", cfg.numeric.nodes);
        cfg.numeric.radial_nodes = count("radial_nodes", cfg.numeric.radial_nodes);
        cfg.numeric.span = n.positive_or("span", cfg.numeric.span);
        cfg.numeric.tol = n.positive_or("tol", cfg.numeric.tol);
        if (n.has("seed")) {
            if (!n["seed"].json().is_number_unsigned()) n["seed"].fail("expected a non-negative integer");
            cfg.numeric.seed = n["seed"].json().get<std::uint64_t>();
        }
        if (n.has("threads")) {
            const int t = n["threads"].integer();
            if (t < 0) n["threads"].fail("expected a non-negative integer");
            cfg.numeric.threads = static_cast<unsigned>(t);
        }
    }
    cfg.output = r.str_or("output", "");
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOverrides& o) {
    if (o.seed) cfg.numeric.seed = *o.seed;
    if (o.steps) {
        if (*o.steps < 1) throw ConfigError("--steps must be positive");
        cfg.numeric.steps = *o.steps;
    }
    if (o.tol) {
        if (!(*o.tol > 0)) throw ConfigError("--tol must be positive");
        cfg.numeric.tol = *o.tol;
    }
    if (o.out) cfg.output = *o.out;
    return cfg;
}

bool RunReport::pass() const {
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* RunReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

Json RunReport::summary() const {
    Json s;
    s["scenario"] = scenario;
    s["run"] = run;
    s["seed"] = seed;
    s["pass"] = pass();
    Json cs = Json::array();
    for (const auto& c : checks) {
        Json j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["measured"] = c.measured;
        j["relation"] = c.relation;
        j["threshold"] = c.threshold;
        if (c.relation == "in") j["upper"] = c.upper;
        cs.push_back(j);
    }
    s["checks"] = cs;
    s["data"] = data;
    Json names = Json::array();
    for (const auto& [k, v] : artifacts) names.push_back(k);
    s["artifacts"] = names;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    s["timing"] = {{"generated_at", buf}, {"seconds", seconds}};
    return s;
}

namespace {

const char* error_kind(const std::exception& e) {
#define SPRAYKIT_KIND(T) \
    if (dynamic_cast<const T*>(&e)) return #T
    SPRAYKIT_KIND(ChartDomainError);
    SPRAYKIT_KIND(SingularMetricError);
    SPRAYKIT_KIND(NonFiniteDerivativeError);
    SPRAYKIT_KIND(NotTimeOrientableError);
    SPRAYKIT_KIND(NonTimelikeError);
    SPRAYKIT_KIND(MissingLabTimeError);
    SPRAYKIT_KIND(ChartExitError);
    SPRAYKIT_KIND(NonFiniteStateError);
    SPRAYKIT_KIND(ReparamDegenerateError);
    SPRAYKIT_KIND(SignError);
    SPRAYKIT_KIND(DegenerateDensityError);
    SPRAYKIT_KIND(QuadratureDomainError);
    SPRAYKIT_KIND(EmptyEnsembleError);
#undef SPRAYKIT_KIND
    return "Error";
}

} // namespace

RunReport execute(const ScenarioConfig& cfg) {
    RunReport report;
    report.scenario = cfg.name;
    report.run = cfg.run == "invariant-suite" ? cfg.run + ":" + cfg.suite : cfg.run;
    report.seed = cfg.numeric.seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        detail::Ctx ctx(cfg, report);
        if (cfg.run == "trajectories")
            detail::run_trajectories(ctx);
        else if (cfg.run == "leaf")
            detail::run_leaf(ctx);
        else if (cfg.run == "transform-check")
            detail::run_transform_check(ctx);
        else if (cfg.run == "drift")
            detail::run_drift(ctx);
        else if (cfg.run == "density-advect")
            detail::run_density_advect(ctx);
        else if (cfg.run == "moments")
            detail::run_moments(ctx);
        else if (cfg.run == "dependence-report")
            detail::run_dependence_report(ctx);
        else if (cfg.run == "invariant-suite")
            detail::run_invariant_suite(ctx);
        else
            throw ConfigError(fmt::format("{}: unknown run kind '{}'", cfg.source, cfg.run));
    } catch (const ConfigError&) {
        throw;
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(fmt::format("scenario '{}' ({}): {}: {}", cfg.name, report.run, error_kind(e), e.what()));
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void write_report(const RunReport& r, const std::filesystem::path& dir) {
    for (const auto& [name, content] : r.artifacts) write_atomic(dir / name, content);
    write_atomic(dir / "summary.json", r.summary().dump(2) + "\n");
}

const std::vector<BundledScenario>& bundled_scenarios() {
    static const std::vector<BundledScenario> list = [] {
        std::vector<BundledScenario> out;
        for (const auto& [name, text] : detail::bundled_sources()) out.push_back({name, text});
        return out;
    }();
    return list;
}

ScenarioConfig bundled_config(const std::string& name) {
    for (const auto& b : bundled_scenarios())
        if (b.name == name) return parse_config(b.text, "scenarios/" + name + ".json");
    std::string known;
    for (const auto& b : bundled_scenarios()) known += (known.empty() ? "" : ", ") + b.name;
    throw ConfigError(fmt::format("no bundled scenario named '{}' (known: {})", name, known));
}

const std::vector<Criterion>& acceptance_criteria() {
    static const std::vector<Criterion> c{
        {1, "homogeneity suite", {"homogeneity-suite"}, 5.0},
        {2, "magic formula", {"magic-formula"}, 10.0},
        {3, "lab-time coefficient cross-check", {"labtime-coefficients"}, 0.0},
        {4, "mass-shell slip dichotomy", {"minkowski-lorentz-massshell", "nonmetric-slip"}, 0.0},
        {5, "null lab-time residual", {"null-labtime"}, 0.0},
        {6, "bivector equivalence", {"bivector-equivalence"}, 0.0},
        {7, "current correctness", {"current-correctness"}, 60.0},
        {8, "stress-energy", {"stress-energy"}, 0.0},
        {9, "transport and density", {"transport-density"}, 0.0},
        {10, "spray and semi-spray round trip", {"spray-roundtrip"}, 0.0},
        {11, "numerical hygiene", {"numerical-hygiene"}, 0.0},
    };
    return c;
}

std::filesystem::path default_output_root() {
    const char* env = std::getenv("SPRAYKIT_OUT");
    if (env && *env) return env;
    return "spraykit-out";
}

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

Table read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    Table t;
    std::string line;
    if (!std::getline(in, line)) return t;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void plots_for_run(const std::filesystem::path& dir, std::vector<std::filesystem::path>& out) {
    namespace fs = std::filesystem;
    std::ifstream in(dir / "summary.json");
    const Json s = Json::parse(in, nullptr, false);
    if (s.is_discarded()) throw Error(fmt::format("{}: summary.json is not valid JSON", dir.string()));
    const fs::path plots = dir / "plots";

    std::string checks = "check,measured,threshold,pass\n";
    for (const auto& c : s.value("checks", Json::array()))
        checks += fmt::format("{},{},{},{}\n", c.value("name", ""),
                              c["measured"].is_number() ? format_double(c["measured"].get<double>()) : "nan",
                              format_double(c.value("threshold", 0.0)), c.value("pass", false) ? 1 : 0);
    write_atomic(plots / "checks.csv", checks);
    out.push_back(plots / "checks.csv");

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const Table t = read_csv(f);
        const int tc = t.column("t"), x0 = t.column("x0"), fh = t.column("F_H");
        if (tc < 0 || x0 < 0) continue;
        // Base curve with the mass-shell deviation when the file carries F_H.
        std::vector<std::string> h{"t"};
        int nx = 0;
        while (t.column(fmt::format("x{}", nx)) >= 0) h.push_back(fmt::format("x{}", nx++));
        if (fh >= 0) h.push_back("F_H_minus_initial");
        std::vector<std::vector<double>> rows;
        for (const auto& r : t.rows) {
            std::vector<double> row{r[tc]};
            for (int i = 0; i < nx; ++i) row.push_back(r[x0 + i]);
            if (fh >= 0) row.push_back(r[fh] - t.rows.front()[fh]);
            rows.push_back(std::move(row));
        }
        const fs::path target = plots / (f.stem().string() + "_base.csv");
        write_atomic(target, table_csv(h, rows));
        out.push_back(target);
    }
}

} // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(run_dir)) throw ConfigError(fmt::format("{}: not a directory", run_dir.string()));
    std::vector<fs::path> out;
    if (fs::exists(run_dir / "summary.json")) {
        plots_for_run(run_dir, out);
        return out;
    }
    std::vector<fs::path> subs;
    for (const auto& e : fs::directory_iterator(run_dir))
        if (e.is_directory() && fs::exists(e.path() / "summary.json")) subs.push_back(e.path());
    std::sort(subs.begin(), subs.end());
    if (subs.empty()) throw ConfigError(fmt::format("{}: no summary.json found", run_dir.string()));
    for (const auto& d : subs) plots_for_run(d, out);
    return out;
}

} // namespace spraykit
