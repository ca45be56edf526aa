#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spraykit/density.hpp"

namespace spraykit {

// chi = profile(r) dr with r = log(sigma sqrt(F_H)).
struct SupportForm {
    std::string name;
    std::function<double(double)> profile;
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<double> breakpoints;  // interior kinks, used to split quadrature
    double scale = 1.0;               // applied to the raw profile

    double operator()(double r) const { return (r < r_min || r > r_max) ? 0.0 : scale * profile(r); }
    // Quadrature of the scaled profile over its support.
    double integral(int nodes = 16) const;
    // Normalizes the raw profile to unit integral.
    static SupportForm make(std::string name, std::function<double(double)> raw, double r_min, double r_max,
                            std::vector<double> breakpoints = {});
};

SupportForm support_bump(double center, double half_width);
SupportForm support_box(double a, double b);
SupportForm support_triangle(double a, double b);
std::vector<SupportForm> default_support_catalog();

struct QuadratureSpec {
    int nodes = 32;         // per spatial velocity axis
    int radial_nodes = 8;   // per support sub-interval
};

struct Moments {
    Vec J;
    Mat T;
    bool truncation_warning = false;
    double boundary_ratio = 0.0;  // max f on the outer node layer / max f overall
};

// J^mu = int v^mu f sqrt(-det g) / |v_0| d^{n-1}v on E_H, and T^{mu nu} likewise.
Moments moments_from_E(const SpacetimeModel& model, const AnalyticDensity& density, const Vec& x,
                       const QuadratureSpec& spec = {});
Vec current_from_E(const SpacetimeModel& model, const AnalyticDensity& density, const Vec& x,
                   const QuadratureSpec& spec = {});
Mat stress_energy_at(const SpacetimeModel& model, const AnalyticDensity& density, const Vec& x,
                     const QuadratureSpec& spec = {});

// Current and chi-weighted stress-energy from the 0-homogeneous lift of f_E to U+.
// `alt_domain` selects the domain E' whose rescaling weights the stress-energy; null means E_H.
Moments moments_from_U(const SpacetimeModel& model, const AnalyticDensity& density, const SupportForm& chi,
                       const Vec& x, const QuadratureSpec& spec = {}, const KinematicIndicator* alt_domain = nullptr);
Vec current_from_U(const SpacetimeModel& model, const AnalyticDensity& density, const SupportForm& chi,
                   const Vec& x, const QuadratureSpec& spec = {});

// Rescales f so that int f sqrt(-det g)/|v_0| d^{n-1}v = 1 at x.
AnalyticDensity normalized(const SpacetimeModel& model, AnalyticDensity density, const Vec& x,
                           const QuadratureSpec& spec = {});

struct DependenceEntry {
    std::string domain;
    std::string chi;
    Vec J;
    Mat T;
};

struct DependenceReport {
    std::vector<DependenceEntry> entries;
    double max_T_rel_diff = 0.0;
    double max_J_rel_diff = 0.0;
    Mat T_rel_diff;  // pairwise
    Mat J_rel_diff;
};

DependenceReport stress_energy_dependence_report(const SpacetimeModel& model, const AnalyticDensity& density,
                                                 const Vec& x, const std::vector<KinematicIndicator>& domains,
                                                 const std::vector<SupportForm>& chis,
                                                 const QuadratureSpec& spec = {});

// Uniform spacetime grid: cell-centered spatial axes, explicit times.
struct GridSpec {
    std::vector<double> times;
    Vec lo;                 // spatial, n-1
    Vec hi;
    std::vector<int> cells; // per spatial axis
    bool periodic = true;

    std::size_t cell_count() const;
    Vec cell_center(std::size_t flat) const;
    double spacing(int axis) const { return (hi[axis] - lo[axis]) / cells[axis]; }
};

struct MomentGrid {
    GridSpec spec;
    int dim = 4;
    std::vector<std::vector<Vec>> J;  // J[time][cell]
    std::vector<std::vector<Mat>> T;  // optional, same layout
};

// Each sample drifts ballistically to the slice time and deposits w v^mu / v^0 with a normalized tent kernel.
MomentGrid current_grid_from_ensemble(const ParticleEnsemble& ens, const GridSpec& grid, double width);

// Quadrature path: moments_from_E evaluated at every cell center and time.
MomentGrid moment_grid_from_density(const SpacetimeModel& model, const AnalyticDensity& density,
                                    const GridSpec& grid, const QuadratureSpec& spec = {}, bool with_T = false);

struct ContinuityReport {
    double max_abs = 0.0;
    double l2 = 0.0;
    std::size_t points = 0;
};

ContinuityReport continuity_residual(const MomentGrid& grid);

} // namespace spraykit
