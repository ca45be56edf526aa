#include "spraykit/spray.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spraykit {

VlasovField spray_from_semispray(const SemiSpray& k) {
    return {"spray[" + k.label + "]", [k](const PhasePoint& u) -> Vec {
                const int n = u.dim();
                const double v0 = u.v[0];
                if (v0 == 0.0) throw NonFiniteDerivativeError("spray from semi-spray needs v^0 != 0");
                Vec phi(n);
                phi[0] = 0.0;
                phi.tail(n - 1) = v0 * v0 * k.coeffs(u.x[0], u.x.tail(n - 1), u.v.tail(n - 1) / v0);
                return phi;
            }};
}

SemiSpray semispray_from_spray(const VlasovField& w, int dim) {
    SemiSpray k;
    k.label = "restrict[" + w.label + "]";
    k.dim = dim;
    k.coeffs = [w, dim](double s, const Vec& xs, const Vec& us) -> Vec {
        PhasePoint u{Vec(dim), Vec(dim)};
        u.x[0] = s;
        u.x.tail(dim - 1) = xs;
        u.v[0] = 1.0;
        u.v.tail(dim - 1) = us;
        return w.phi(u).tail(dim - 1);
    };
    return k;
}

VlasovField quadratic_extension(const std::function<Vec(const PhasePoint&)>& phi_on_domain,
                                const KinematicIndicator& f, std::string label) {
    const KinematicIndicator fc = f;
    return {std::move(label), [phi_on_domain, fc](const PhasePoint& u) -> Vec {
                const double ratio = fc.F.eval(u) / fc.level;
                if (!(ratio > 0)) throw SignError(fmt::format("{}: cannot extend from a non-positive level", fc.name));
                const double lam = std::pow(ratio, 1.0 / fc.degree);
                return lam * lam * phi_on_domain(u.scaled(1.0 / lam));
            }};
}

} // namespace spraykit
