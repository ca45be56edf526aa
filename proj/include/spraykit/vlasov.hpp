#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spraykit/phase_space.hpp"

namespace spraykit {

// W = v^mu d/dx^mu + phi^mu d/dv^mu; only phi is stored.
struct VlasovField {
    std::string label;
    std::function<Vec(const PhasePoint&)> phi;

    Vec operator()(const PhasePoint& u) const { return phi(u); }
    // Full 2n-component vector (v, phi).
    Vec tangent(const PhasePoint& u) const;
};

struct KinematicIndicator {
    std::string name;
    BundleScalar F;
    int degree = 1;
    double level = 1.0;
    // Future-pointing gate used for even degree; null means always future.
    std::function<int(const PhasePoint&)> orientation;
    // Given x and spatial velocity (v^1..v^{n-1}), the full velocity on {F = level, future}.
    // Null means a generic bracketing root-finder is used.
    std::function<Vec(const Vec& x, const Vec& spatial, double level)> complete;

    double operator()(const PhasePoint& u) const { return F.eval(u); }
};

VlasovField geodesic_field(const SpacetimeModel& model);
VlasovField lorentz_field(const SpacetimeModel& model);

// F_H = -g(v, v), degree 2.
KinematicIndicator indicator_hyperboloid(const SpacetimeModel& model);
// sigma sqrt(F_H), degree 1.
KinematicIndicator indicator_hyperboloid_linear(const SpacetimeModel& model);
// v<t> for the registered lab time, degree 1.
KinematicIndicator indicator_labtime(const SpacetimeModel& model);
// sum (v^mu)^2, degree 2.
KinematicIndicator indicator_coordinate(const SpacetimeModel& model);

// Full velocity with spatial part `spatial` on the level set {F = level} (future root).
Vec complete_velocity(const SpacetimeModel& model, const KinematicIndicator& F, const Vec& x, const Vec& spatial,
                      double level);

// W<F> = v . dF/dx + phi . dF/dv
double apply_field(const VlasovField& w, const BundleScalar& f, const PhasePoint& u);

// W - (W<F>/(k F)) R
VlasovField transform_to_domain(const VlasovField& w, const KinematicIndicator& f);

// W + k R for a degree-1 scalar k.
VlasovField add_radial(const VlasovField& w, const BundleScalar& k, std::string label = {});

// max |W<F>| / max(1, |F|)
double compatibility_defect(const VlasovField& w, const BundleScalar& f, const std::vector<PhasePoint>& samples);

struct BracketReport {
    double max_abs = 0.0;
    double max_rel = 0.0;
    bool pass = false;
};

// max |R<phi> - 2 phi| over samples and components.
BracketReport bracket_defect(const VlasovField& w, const std::vector<PhasePoint>& samples, double tol = 1e-6);

// phi(lambda u) = lambda^2 phi(u) at lambda in {0.5, 2}.
HomogeneityReport radial_quadraticity(const VlasovField& w, const std::vector<PhasePoint>& samples,
                                      double tol = 1e-9);

// Psi = R ^ W, stored through a representative.
struct VlasovBivector {
    VlasovField representative;
};

VlasovBivector bivector_from_field(const VlasovField& w);
// Psi<F, .> = R<F> W - W<F> R as a 2n-component vector at u.
Vec pairing(const VlasovBivector& psi, const BundleScalar& f, const PhasePoint& u);
// Psi<F, .> / (k F); horizontal by construction.
VlasovField field_from_bivector(const VlasovBivector& psi, const KinematicIndicator& f);

struct ProjectiveReport {
    bool pass = false;
    std::vector<double> k_values;
    double max_residual = 0.0;
    double max_k_homogeneity_error = 0.0;
    bool k_homogeneity_pass = false;
};

// Solves phi2 - phi1 = k v in least squares at each sample and checks k(lambda u) = lambda k(u).
ProjectiveReport projectively_equivalent(const VlasovField& w1, const VlasovField& w2,
                                         const std::vector<PhasePoint>& samples);

bool bivectors_equal(const VlasovBivector& a, const VlasovBivector& b, const std::vector<PhasePoint>& samples);

// Compares X1 (x) X2 - X2 (x) X1 against the Y pair componentwise.
bool wedge_pair_equal(const Vec& x1, const Vec& x2, const Vec& y1, const Vec& y2, double tol = 1e-12);

} // namespace spraykit
