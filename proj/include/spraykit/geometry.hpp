#pragma once

#include <functional>
#include <optional>
#include <string>

#include "spraykit/errors.hpp"
#include "spraykit/tensor.hpp"

namespace spraykit {

// Rectangular coordinate bounds of the single chart a model lives in.
// Empty vectors mean the chart is all of R^n.
struct ChartBounds {
    Vec lower;
    Vec upper;

    bool contains(const Vec& x) const;
};

// A scalar on spacetime with optional exact first and second derivatives.
// Missing derivatives are filled in by central differences.
struct BaseScalar {
    std::string name;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;

    Vec grad(const Vec& x) const;
    Mat hess(const Vec& x) const;
};

BaseScalar coordinate_scalar(int index, int dim);

// Region where seeded samples are drawn by default; flat models leave it unset.
struct SampleHint {
    Vec x_lo, x_hi;
    Vec v_lo, v_hi;
};

enum class ConnectionKind { LeviCivita, Explicit };

struct SpacetimeModel {
    std::string name;
    int dim = 4;
    std::function<Mat(const Vec&)> metric;
    // Optional exact derivative: (l, m, n) -> d_l g_{mn}. Bypasses finite differences.
    std::function<Tensor3(const Vec&)> metric_derivative;
    // Optional; absent means identically zero.
    std::function<Mat(const Vec&)> faraday;
    double charge_to_mass = 0.0;
    ConnectionKind connection = ConnectionKind::LeviCivita;
    std::function<Tensor3(const Vec&)> explicit_connection;
    std::optional<BaseScalar> labtime;
    // Time function whose lift fixes the future direction; x^0 when unset.
    std::optional<BaseScalar> time_orientation;
    ChartBounds bounds;
    // Finite-difference step for metric derivatives; <= 0 selects 1e-6 * max(1, |x|_inf).
    double fd_step = 0.0;
    std::optional<SampleHint> sample_hint;
};

void check_chart(const SpacetimeModel& model, const Vec& x);

Mat metric_at(const SpacetimeModel& model, const Vec& x);
Mat inverse_metric_at(const SpacetimeModel& model, const Vec& x);
Mat faraday_at(const SpacetimeModel& model, const Vec& x);

double default_fd_step(const SpacetimeModel& model, const Vec& x);

// d_l g_{mn}. `step` overrides the model step when positive.
Tensor3 metric_derivative_at(const SpacetimeModel& model, const Vec& x, double step = 0.0);
Tensor3 levi_civita_at(const SpacetimeModel& model, const Vec& x, double step = 0.0);
Tensor3 christoffel_at(const SpacetimeModel& model, const Vec& x, double step = 0.0);
// Q_{lmn} = d_l g_{mn} - G^r_{lm} g_{rn} - G^r_{ln} g_{mr} for the model's connection.
Tensor3 nonmetricity_at(const SpacetimeModel& model, const Vec& x, double step = 0.0);

int negative_eigenvalue_count(const Mat& g);

// Catalog
SpacetimeModel minkowski(int dim = 4);
SpacetimeModel schwarzschild(double mass = 1.0);
// Constant electric field along x^1: F_{10} = E0 = -F_{01}.
SpacetimeModel minkowski_electric(double e0, double charge_to_mass, int dim = 4);
// Flat metric with Gamma^mu_{mu mu} = eps * (1 + bump * sin x^1), all else zero.
SpacetimeModel minkowski_nonmetric(double eps, double bump = 0.0, int dim = 4);
// 2D Minkowski with lab time s = t + amplitude * sin x.
SpacetimeModel minkowski2_labtime(double amplitude);

SpacetimeModel with_explicit_connection(SpacetimeModel model, std::function<Tensor3(const Vec&)> gamma,
                                        std::string suffix = "explicit");
SpacetimeModel with_labtime(SpacetimeModel model, BaseScalar labtime);

} // namespace spraykit
