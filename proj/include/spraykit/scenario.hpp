#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spraykit/observables.hpp"

namespace spraykit {

using Json = nlohmann::ordered_json;

struct ModelSpec {
    std::string name;
    std::map<std::string, double> params;
};

struct IndicatorSpec {
    std::string name;
    double level = 1.0;
};

struct NumericSpec {
    int steps = 1000;
    double span = 1.0;
    int samples = 100;
    std::uint64_t seed = 1;
    int nodes = 32;
    int radial_nodes = 8;
    double tol = 1e-8;   // primary tolerance of the run
    unsigned threads = 0;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    std::string source;
    ModelSpec model;
    std::string field = "geodesic";
    std::optional<double> charge_to_mass;
    std::vector<IndicatorSpec> indicators;
    BundleKind bundle = BundleKind::Timelike;
    std::string run;
    std::string suite;      // only for run = invariant-suite
    Json params = Json::object();
    NumericSpec numeric;
    std::string output;
    std::string text;       // original source text, for diagnostics
};

const std::vector<std::string>& run_kinds();
const std::vector<std::string>& invariant_suites();
const std::vector<std::string>& model_names();

// Errors carry "<source>:<line>:<column>: <json pointer>: message".
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

SpacetimeModel build_model(const ModelSpec& spec);
VlasovField build_field(const SpacetimeModel& model, const std::string& name);
KinematicIndicator build_indicator(const SpacetimeModel& model, const IndicatorSpec& spec);

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<", "<=", ">", "==", "in"
    double upper = 0.0;    // for "in"
};

struct RunReport {
    std::string scenario;
    std::string run;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    Json data = Json::object();
    std::map<std::string, std::string> artifacts;  // file name -> content
    double seconds = 0.0;

    bool pass() const;
    const CheckResult* find(const std::string& name) const;
    // Everything except the "timing" member is a deterministic function of config and seed.
    Json summary() const;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<double> tol;
    std::optional<std::string> out;
};

ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOverrides& o);

// Runs in memory. Module errors are rethrown with the scenario name prefixed.
RunReport execute(const ScenarioConfig& cfg);

// Writes artifacts and summary.json into `dir`, each atomically.
void write_report(const RunReport& r, const std::filesystem::path& dir);

struct BundledScenario {
    std::string name;
    std::string text;
};
const std::vector<BundledScenario>& bundled_scenarios();
ScenarioConfig bundled_config(const std::string& name);

struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> scenarios;
    double max_seconds;  // 0 when unbounded
};
const std::vector<Criterion>& acceptance_criteria();

// Plot-ready tables derived from a run directory; returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& run_dir);

// Output root: SPRAYKIT_OUT when set, else "spraykit-out".
std::filesystem::path default_output_root();

} // namespace spraykit
