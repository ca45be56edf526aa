#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spraykit/errors.hpp"
#include "spraykit/scenario.hpp"

using namespace spraykit;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kDrift = R"({
  "name": "unit-drift",
  "model": {"name": "minkowski_electric", "params": {"e0": 0.3}},
  "field": "lorentz",
  "indicators": [{"name": "hyperboloid"}],
  "run": "drift",
  "params": {"count": 3, "oracle": "conserved"},
  "numeric": {"steps": 200, "seed": 3}
})";

} // namespace

TEST_CASE("every bundled scenario parses and builds its model") {
    REQUIRE(bundled_scenarios().size() >= 11);
    for (const auto& b : bundled_scenarios()) {
        CAPTURE(b.name);
        const ScenarioConfig c = parse_config(b.text, b.name);
        CHECK(c.name == b.name);
        CHECK_NOTHROW(build_model(c.model));
        const fs::path file = fs::path(SPRAYKIT_SOURCE_DIR) / "scenarios" / (b.name + ".json");
        CHECK(slurp(file) == b.text);
    }
    for (const auto& crit : acceptance_criteria())
        for (const auto& s : crit.scenarios) CHECK_NOTHROW(bundled_config(s));
    CHECK_THROWS_AS(bundled_config("no-such-scenario"), ConfigError);
}

TEST_CASE("syntax errors carry line and column") {
    const std::string msg = config_error("{\n  \"name\": \"x\",\n  \"run\": drift\n}");
    CHECK(msg.rfind("cfg.json:3:", 0) == 0);
}

TEST_CASE("unknown names are config errors with a pointer") {
    std::string text = kDrift;
    const auto swap = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        t.replace(t.find(from), from.size(), to);
        return config_error(t);
    };
    const std::string model = swap("minkowski_electric", "kerr_newman");
    CHECK(model.find("/model/name") != std::string::npos);
    CHECK(model.find("kerr_newman") != std::string::npos);
    CHECK(model.rfind("cfg.json:3:", 0) == 0);

    CHECK(swap("\"e0\"", "\"e1\"").find("/model/params") != std::string::npos);
    CHECK(swap("\"field\"", "\"feild\"").find("feild") != std::string::npos);
    CHECK(swap("hyperboloid", "paraboloid").find("/indicators/0") != std::string::npos);
    CHECK(swap("\"drift\"", "\"warp\"").find("/run") != std::string::npos);
    CHECK(swap("\"steps\": 200", "\"steps\": -2").find("/numeric/steps") != std::string::npos);
    CHECK(config_error("{\"run\": \"drift\"}").find("name") != std::string::npos);
    CHECK(config_error("[1, 2]") != "");
}

TEST_CASE("load_config reports a missing file as a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/spraykit.json"), ConfigError);
    const ScenarioConfig c = load_config(fs::path(SPRAYKIT_SOURCE_DIR) / "scenarios" / "nonmetric-slip.json");
    CHECK(c.run == "drift");
}

TEST_CASE("overrides replace seed, steps and tolerance") {
    const ScenarioConfig base = parse_config(kDrift);
    RunOverrides o;
    CHECK(apply_overrides(base, o).numeric.seed == 3);
    o.seed = 99;
    o.steps = 50;
    o.tol = 1e-3;
    const ScenarioConfig c = apply_overrides(base, o);
    CHECK(c.numeric.seed == 99);
    CHECK(c.numeric.steps == 50);
    CHECK(c.numeric.tol == 1e-3);
    const RunReport r = execute(c);
    CHECK(r.seed == 99);
}

TEST_CASE("runs are deterministic apart from timing") {
    const ScenarioConfig c = bundled_config("transport-density");
    ScenarioConfig small = c;
    small.numeric.steps = 40;
    const RunReport a = execute(small);
    const RunReport b = execute(small);
    CHECK(a.artifacts == b.artifacts);
    Json sa = a.summary(), sb = b.summary();
    REQUIRE(sa.contains("timing"));
    sa.erase("timing");
    sb.erase("timing");
    CHECK(sa.dump() == sb.dump());

    small.numeric.seed += 1;
    const RunReport d = execute(small);
    CHECK(d.artifacts != a.artifacts);
}

TEST_CASE("write_report and emit_plots") {
    const fs::path root = fs::temp_directory_path() / "spraykit_unit_scenario";
    fs::remove_all(root);
    const RunReport r = execute(parse_config(kDrift));
    CHECK(r.pass());
    write_report(r, root / "unit-drift");
    const Json s = Json::parse(slurp(root / "unit-drift" / "summary.json"));
    CHECK(s["scenario"] == "unit-drift");
    CHECK(s["pass"] == true);
    CHECK(s["checks"].size() == r.checks.size());
    for (const auto& [name, content] : r.artifacts) CHECK(slurp(root / "unit-drift" / name) == content);
    for (const auto& e : fs::recursive_directory_iterator(root))
        CHECK(e.path().filename().string().find(".tmp") == std::string::npos);

    const auto from_run = emit_plots(root / "unit-drift");
    const auto from_root = emit_plots(root);
    CHECK(!from_run.empty());
    CHECK(from_run.size() == from_root.size());
    CHECK(fs::exists(root / "unit-drift" / "plots" / "checks.csv"));
    CHECK_THROWS(emit_plots(root / "missing"));
    fs::remove_all(root);
}
