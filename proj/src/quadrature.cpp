#include "spraykit/quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace spraykit {

const QuadratureRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Boost returns the non-negative zeros in increasing order.
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    QuadratureRule r;
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime<double>(n, z);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.nodes.push_back(z);
        r.weights.push_back(w);
        if (z != 0.0) {
            r.nodes.push_back(-z);
            r.weights.push_back(w);
        }
    }
    std::vector<std::size_t> idx(r.nodes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r.nodes[a] < r.nodes[b]; });
    QuadratureRule sorted;
    for (std::size_t i : idx) {
        sorted.nodes.push_back(r.nodes[i]);
        sorted.weights.push_back(r.weights[i]);
    }
    return cache.emplace(n, std::move(sorted)).first->second;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    const QuadratureRule& ref = gauss_legendre(n);
    QuadratureRule r;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
        r.nodes.push_back(mid + half * ref.nodes[i]);
        r.weights.push_back(half * ref.weights[i]);
    }
    return r;
}

QuadratureRule composite_gauss_legendre(int n, double a, double b, std::vector<double> breakpoints) {
    std::vector<double> edges{a};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double p : breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    QuadratureRule r;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const QuadratureRule s = gauss_legendre(n, edges[i], edges[i + 1]);
        r.nodes.insert(r.nodes.end(), s.nodes.begin(), s.nodes.end());
        r.weights.insert(r.weights.end(), s.weights.begin(), s.weights.end());
    }
    return r;
}

double integrate_1d(const std::function<double(double)>& f, const QuadratureRule& rule) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

} // namespace spraykit
