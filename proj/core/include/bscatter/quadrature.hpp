#pragma once

#include <functional>

#include "bscatter/special_functions.hpp"

namespace bscatter::numerics {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_subdivisions = 4000;
    /// Semi-infinite integrals stop once t * max|f| over a panel drops below this.
    double truncation_threshold = 1e-12;

    // Semi-infinite panel layout.
    double initial_step = 1.0;  ///< length of the first panel
    double growth = 2.0;        ///< geometric growth of panel length
    /// When positive, panels switch to this fixed length once the geometric
    /// panels reach it and the partial sums are extrapolated (Wynn epsilon).
    /// Use half the period of the dominant oscillation.
    double half_period = 0.0;
    double hard_cap = 1e18;  ///< upper limit past which truncation is a failure
};

struct QuadratureResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    long evaluations = 0;
    double truncated_at = 0.0;
    int subdivisions = 0;
    double max_abs = 0.0;  ///< largest |f| seen at a quadrature node
};

using ComplexIntegrand = std::function<Complex(double)>;
using RealIntegrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (10/21) quadrature on [a, b].
/// Throws ConvergenceError when max_subdivisions is exhausted.
QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a, double b,
                                    const QuadratureSpec& spec = {});

QuadratureResult integrate_adaptive_real(const RealIntegrand& f, double a, double b,
                                         const QuadratureSpec& spec = {});

/// Integral over [a, inf). Geometric panels, then optionally half-period panels
/// with Wynn-epsilon extrapolation for oscillatory tails.
QuadratureResult integrate_semi_infinite(const ComplexIntegrand& f, double a,
                                         const QuadratureSpec& spec = {});

QuadratureResult integrate_semi_infinite_real(const RealIntegrand& f, double a,
                                              const QuadratureSpec& spec = {});

/// CDF at x of a random variable with characteristic function `cf`, by
/// Gil-Pelaez inversion: 1/2 - (1/pi) int_0^inf Im[e^{-itx} cf(t)] / t dt.
/// `mass` scales the leading 1/2 for sub-probability measures (total mass of
/// the measure whose transform `cf` is).
QuadratureResult gil_pelaez_cdf(const ComplexIntegrand& cf, double x, QuadratureSpec spec = {},
                                double mass = 1.0);

}  // namespace bscatter::numerics
