#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spraykit/geometry.hpp"

namespace spraykit {

// A point (x, v) of the slit tangent bundle.
struct PhasePoint {
    Vec x;
    Vec v;

    int dim() const { return static_cast<int>(x.size()); }
    PhasePoint scaled(double lambda) const { return {x, lambda * v}; }
};

enum class BundleKind { Timelike, All, Null };

const char* to_string(BundleKind kind);
BundleKind bundle_kind_from_string(const std::string& s);

// Threshold below which g(v, v) counts as timelike.
inline constexpr double kTimelikeEps = 1e-10;

bool in_bundle(const SpacetimeModel& model, const PhasePoint& u, BundleKind kind, double null_tol = 1e-9);

// Gradient of a bundle scalar: (d/dx, d/dv).
struct BundleGradient {
    Vec dx;
    Vec dv;
};

struct BundleScalar {
    std::string name;
    std::function<double(const PhasePoint&)> eval;
    std::optional<int> degree;
    std::function<BundleGradient(const PhasePoint&)> gradient;

    double operator()(const PhasePoint& u) const { return eval(u); }
};

// Exact gradient when registered, central differences otherwise.
BundleGradient gradient_of(const BundleScalar& g, const PhasePoint& u);

double fiber_step(const Vec& v);
double base_step(const Vec& x);

// v^mu d_mu h
double scalar_lift(const BaseScalar& h, const PhasePoint& u);
BundleScalar lift(const BaseScalar& h);
// pi^* h, degree 0
BundleScalar pullback(const BaseScalar& h);

// R<G> by central differences along (0, v).
double radial_derivative(const BundleScalar& g, const PhasePoint& u);

// Sign of v<t_orient>; t_orient defaults to x^0.
int causal_indicator(const SpacetimeModel& model, const PhasePoint& u, BundleKind kind = BundleKind::Timelike);

struct HomogeneityReport {
    double max_rel_error = 0.0;
    double worst_lambda = 1.0;
    std::size_t samples = 0;
    bool pass = false;
};

// Probes G(lambda u) = lambda^k G(u) at lambda in {0.5, 2} and also -1 when include_reversal.
HomogeneityReport check_homogeneity(const BundleScalar& g, int k, const std::vector<PhasePoint>& samples,
                                    bool include_reversal = false, double tol = 1e-9);

} // namespace spraykit
