#include "bscatter/params.hpp"

#include <cmath>
#include <string>

#include "bscatter/error.hpp"

namespace bscatter {

namespace {

void require(bool ok, const char* key, const std::string& rule) {
    if (!ok) throw ConfigError(std::string(key) + ": " + rule);
}

}  // namespace

double SystemParams::gain() const {
    return d_sectors / (1.0 + epsilon * (d_sectors - 1.0));
}

double SystemParams::collision_probability() const { return delta_hz / bw_hz; }

double SystemParams::thinned_density() const {
    return collision_probability() * lambda / d_sectors;
}

double SystemParams::noise_level() const {
    return sigma2_linear / (beta * gain() * p_linear);
}

void SystemParams::validate() const {
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda", "must be finite and >= 0");
    require(std::isfinite(p_linear) && p_linear > 0.0, "p_linear", "must be finite and > 0");
    require(std::isfinite(sigma2_linear) && sigma2_linear >= 0.0, "sigma2_linear", "must be finite and >= 0");
    require(std::isfinite(zeta) && zeta >= 1.0, "zeta", "must be >= 1");
    require(std::isfinite(xi) && xi > zeta, "xi", "must be finite and > zeta");
    require(std::isfinite(alpha) && alpha > 1.0, "alpha", "must be > 1");
    require(std::isfinite(bw_hz) && bw_hz > 0.0, "bw_hz", "must be > 0");
    require(std::isfinite(delta_hz) && delta_hz >= 0.0 && delta_hz <= bw_hz, "delta_hz", "must lie in [0, bw_hz]");
    require(d_sectors >= 1, "d_sectors", "must be >= 1");
    require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon", "must lie in [0, 1]");
    require(beta >= 0.0 && beta <= 1.0, "beta", "must lie in [0, 1]");
    require(rho >= 0.0 && rho <= 1.0, "rho", "must lie in [0, 1]");
    require(std::isfinite(tau_linear) && tau_linear >= 0.0, "tau_linear", "must be finite and >= 0");
    require(n_sic >= 0, "n_sic", "must be >= 0");
    require(std::isfinite(mu_f) && mu_f > 0.0, "mu_f", "must be > 0");
    require(std::isfinite(mu_b) && mu_b > 0.0, "mu_b", "must be > 0");
}

}  // namespace bscatter
