#pragma once

#include <string>
#include <vector>

#include "spraykit/vlasov.hpp"

namespace spraykit {

struct Prolongation {
    std::vector<double> params;
    std::vector<PhasePoint> points;
    std::string field_label;
    bool truncated = false;
    std::string truncation_reason;

    std::size_t size() const { return points.size(); }
};

// Classic RK4 on (x' = v, v' = phi). A step that leaves `bounds` or the field's chart truncates the path.
Prolongation integrate(const VlasovField& w, const PhasePoint& u0, double t0, double t1, int steps,
                       const ChartBounds* bounds = nullptr);

// Independent integrations, evaluated on `threads` workers; output order follows input order.
std::vector<Prolongation> integrate_batch(const VlasovField& w, const std::vector<PhasePoint>& u0s, double t0,
                                          double t1, int steps, unsigned threads = 0,
                                          const ChartBounds* bounds = nullptr);

// max over interior nodes of |(x_{i+1} - x_{i-1}) / (t_{i+1} - t_{i-1}) - v_i|_inf.
double prolongation_defect(const Prolongation& p);

// Solves s'' + k(eta(t)) s' = 0, s(t0) = t0, s'(t0) = 1 and resamples at uniform s.
struct Reparameterization {
    Prolongation curve;
    std::vector<double> s_of_t;  // s at the input nodes
    std::vector<double> ds_dt;   // s' at the input nodes
};
Reparameterization reparameterize_detailed(const Prolongation& p, const BundleScalar& k);
Prolongation reparameterize(const Prolongation& p, const BundleScalar& k);

// Base-curve comparisons.
struct CurveDistance {
    double chordal = 0.0;    // max pointwise gap after resampling both by cumulative chord length
    double hausdorff = 0.0;  // symmetric point-to-curve distance
};
CurveDistance compare_base_curves(const Prolongation& a, const Prolongation& b, int resample = 2001);

struct DriftSeries {
    std::vector<double> params;
    std::vector<double> values;
    std::vector<double> rates;
    double max_deviation = 0.0;  // max |F(t_i) - F(t_0)|
};
DriftSeries indicator_drift(const Prolongation& p, const BundleScalar& f);

struct NullLabtimeReport {
    std::vector<double> params;
    std::vector<double> residual;         // Euclidean coordinate norm of nabla_C' C'
    std::vector<double> oracle;           // closed-form residual of the affinely parameterised line
    double max_residual = 0.0;
    double max_oracle_gap = 0.0;
    double reference_max_residual = 0.0;  // same line parameterised by coordinate time
    Prolongation path;
};

// The model must be 2D Minkowski with a lab time s; u0 is rescaled so v<s> = 1.
NullLabtimeReport null_labtime_defect(const SpacetimeModel& model, const PhasePoint& u0, double span, int steps);

struct Leaf {
    std::vector<double> t;
    std::vector<double> lambda;
    std::vector<std::vector<PhasePoint>> nodes;  // nodes[j][i] at (t_i, lambda_j)
    double max_tangency_ratio = 0.0;             // max sigma_3 / sigma_1 at interior nodes
    bool tangent = false;
};

// leaf(t, lambda) = (x(t), lambda v(t)). `substeps` RK4 steps per t-grid interval.
Leaf integrate_leaf(const VlasovBivector& psi, const PhasePoint& u0, const std::vector<double>& t_grid,
                    const std::vector<double>& lambda_grid, int substeps = 10, double tol = 1e-5);

// Max distance from nodes of `b` to the surface swept by `a` (lambda unconstrained along rays).
double leaf_distance(const Leaf& a, const Leaf& b);
double leaf_hausdorff(const Leaf& a, const Leaf& b);

} // namespace spraykit
