#pragma once

#include <functional>
#include <string>

#include "spraykit/vlasov.hpp"

namespace spraykit {

// Second-order system d^2 x^a/ds^2 = X^a(s, x^a, dx^a/ds) on the slice {v^0 = 1}, s = x^0.
// Coefficients take (s, spatial position, spatial velocity) and return n-1 components.
struct SemiSpray {
    std::string label;
    int dim = 4;
    std::function<Vec(double s, const Vec& xs, const Vec& us)> coeffs;
};

// X^0 = 0, X^a = (v^0)^2 X_K^a(x^0, x^a, v^a / v^0).
VlasovField spray_from_semispray(const SemiSpray& k);

// Restriction of a spray to the slice v^0 = 1; the spray should already be compatible with v^0.
SemiSpray semispray_from_spray(const VlasovField& w, int dim);

// General quadratic extension of a field given on {F = level}: phi(u) = lambda^2 phi_E(u / lambda),
// lambda = (F(u)/level)^(1/k).
VlasovField quadratic_extension(const std::function<Vec(const PhasePoint&)>& phi_on_domain,
                                const KinematicIndicator& f, std::string label);

} // namespace spraykit
