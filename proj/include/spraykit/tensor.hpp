#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spraykit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense rank-3 array indexed (a, b, c), each index in [0, n).
// Connection coefficients use (mu, nu, rho) for Gamma^mu_{nu rho};
// metric derivatives use (lambda, mu, nu) for d_lambda g_{mu nu}.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }

    double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
    double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

    double max_abs() const {
        double m = 0.0;
        for (double d : data_) m = std::max(m, std::abs(d));
        return m;
    }

    // out^a = T^a_{bc} u^b w^c
    Vec contract(const Vec& u, const Vec& w) const {
        Vec out = Vec::Zero(n_);
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c) out[a] += (*this)(a, b, c) * u[b] * w[c];
        return out;
    }

    // T_{abc} u^a v^b w^c
    double contract3(const Vec& u, const Vec& v, const Vec& w) const {
        double s = 0.0;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c) s += (*this)(a, b, c) * u[a] * v[b] * w[c];
        return s;
    }

    const std::vector<double>& raw() const { return data_; }

    friend Tensor3 operator-(const Tensor3& l, const Tensor3& r) {
        Tensor3 out(l.n_);
        for (std::size_t i = 0; i < l.data_.size(); ++i) out.data_[i] = l.data_[i] - r.data_[i];
        return out;
    }

private:
    std::size_t index(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
    }
    int n_ = 0;
    std::vector<double> data_;
};

inline double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

} // namespace spraykit
