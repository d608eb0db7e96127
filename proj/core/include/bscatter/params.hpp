#pragma once

#include "bscatter/channel.hpp"

namespace bscatter {

/// Scalar model parameters, all in linear units. Defaults are the reference
/// scenario: lambda = 1, P = 20 dB, zeta = 1 m, xi = 10 m, alpha = 2.5,
/// sigma^2 = -30 dB, BW = 12 kHz, epsilon = 0.1, beta = 0.6, one sector, no FDMA.
struct SystemParams {
    double lambda = 1.0;         ///< sensor density per m^2
    double p_linear = 100.0;     ///< reader transmit power P
    double sigma2_linear = 1e-3; ///< noise variance
    double zeta = 1.0;           ///< exclusion radius (m)
    double xi = 10.0;            ///< reading range (m)
    double alpha = 2.5;          ///< path-loss exponent (doubled on the dyadic link)
    double bw_hz = 12000.0;
    double delta_hz = 12000.0;   ///< collision spacing; delta = BW means no FDMA
    int d_sectors = 1;
    double epsilon = 0.1;        ///< directional efficiency
    double beta = 0.6;           ///< reflection coefficient
    double rho = 1.0;            ///< forward/backscatter correlation
    double tau_linear = 1.0;     ///< SINR threshold
    int n_sic = 0;               ///< interferers SIC may try to cancel
    bool fading_free = false;
    double mu_f = 1.0;
    double mu_b = 1.0;

    /// Main-lobe gain G = D / (1 + epsilon (D - 1)).
    double gain() const;
    /// p_c = delta / BW.
    double collision_probability() const;
    /// Density of interferers seen by the typical sensor: p_c lambda / D.
    double thinned_density() const;
    /// sigma^2 / (beta G P): noise expressed in interference units.
    double noise_level() const;

    channel::Annulus annulus() const { return {zeta, xi}; }
    channel::FadingModel fading_model() const { return {rho, mu_f, mu_b, fading_free}; }

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

}  // namespace bscatter
