#pragma once

#include <functional>
#include <vector>

namespace spraykit {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes on [-1, 1]; cached per n.
const QuadratureRule& gauss_legendre(int n);

// n-node rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

// n nodes on each sub-interval of [a, b] split at the given interior breakpoints.
QuadratureRule composite_gauss_legendre(int n, double a, double b, std::vector<double> breakpoints);

double integrate_1d(const std::function<double(double)>& f, const QuadratureRule& rule);

} // namespace spraykit
