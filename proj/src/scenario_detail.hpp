#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "spraykit/scenario.hpp"

namespace spraykit::detail {

struct Src {
    const std::string* text;
    const std::string* source;
};

[[noreturn]] void fail(const Src& src, const std::string& pointer, const std::string& message);

// Typed, located view into a JSON value.
class Node {
public:
    Node(const Src& src, const Json* j, std::string pointer) : src_(src), j_(j), ptr_(std::move(pointer)) {}

    const Json& json() const { return *j_; }
    const std::string& pointer() const { return ptr_; }
    [[noreturn]] void fail(const std::string& message) const { detail::fail(src_, ptr_, message); }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
    Node operator[](const std::string& key) const;
    Node at(std::size_t i) const;
    std::size_t size() const;
    bool is_object() const { return j_->is_object(); }
    bool is_array() const { return j_->is_array(); }
    bool is_string() const { return j_->is_string(); }

    double number() const;
    double positive() const;
    int integer() const;
    std::string str() const;
    bool boolean() const;
    Vec vec(int length = -1) const;
    std::vector<double> numbers() const;

    double number_or(const std::string& key, double def) const { return has(key) ? (*this)[key].number() : def; }
    double positive_or(const std::string& key, double def) const {
        return has(key) ? (*this)[key].positive() : def;
    }
    int integer_or(const std::string& key, int def) const { return has(key) ? (*this)[key].integer() : def; }
    bool bool_or(const std::string& key, bool def) const { return has(key) ? (*this)[key].boolean() : def; }
    std::string str_or(const std::string& key, const std::string& def) const {
        return has(key) ? (*this)[key].str() : def;
    }
    Vec vec_or(const std::string& key, const Vec& def) const {
        return has(key) ? (*this)[key].vec(static_cast<int>(def.size())) : def;
    }

    void allow(std::initializer_list<const char*> keys) const;

private:
    Src src_;
    const Json* j_;
    std::string ptr_;
};

class Checks {
public:
    explicit Checks(RunReport& r) : r_(r) {}
    bool below(const std::string& name, double measured, double threshold);
    bool at_most(const std::string& name, double measured, double threshold);
    bool above(const std::string& name, double measured, double threshold);
    bool within(const std::string& name, double measured, double lo, double hi);
    bool equal(const std::string& name, double measured, double expected);
    bool flag(const std::string& name, bool ok);

private:
    bool add(CheckResult c);
    RunReport& r_;
};

struct Ctx {
    const ScenarioConfig& cfg;
    SpacetimeModel model;
    Src src;
    Node params;
    RunReport& report;
    Checks checks;

    Ctx(const ScenarioConfig& c, RunReport& r);

    std::vector<PhasePoint> samples(std::size_t count, std::uint64_t salt = 0) const;
    std::vector<KinematicIndicator> indicators() const;
    VlasovField field() const;
    QuadratureSpec quadrature() const;
    // params.initial as a list of {x, v}, else `fallback` bundle samples.
    std::vector<PhasePoint> initial_conditions(std::size_t fallback) const;
};

ModelSpec model_spec(const Node& n);
void check_model_spec(const Node& n, const ModelSpec& spec);
PhasePoint phase_point(const Node& n, int dim);
AnalyticDensity density_from(const Node& n, const SpacetimeModel& model, const KinematicIndicator& domain);
SupportForm support_from(const Node& n);
GridSpec grid_from(const Node& n, int dim);
Json vec_json(const Vec& v);
Json mat_json(const Mat& m);

void run_trajectories(Ctx& c);
void run_leaf(Ctx& c);
void run_transform_check(Ctx& c);
void run_drift(Ctx& c);
void run_density_advect(Ctx& c);
void run_moments(Ctx& c);
void run_dependence_report(Ctx& c);
void run_invariant_suite(Ctx& c);

} // namespace spraykit::detail

namespace spraykit::detail {

// Name and JSON text of every file under scenarios/, generated at configure time.
const std::vector<std::pair<std::string, std::string>>& bundled_sources();

} // namespace spraykit::detail
