#pragma once

#include <complex>

#include "bscatter/random.hpp"

namespace bscatter::channel {

/// Dyadic (forward x backscatter) Rayleigh channel power model.
///
/// `rho` is the correlation of the complex forward and backscatter gains;
/// `mu_f`, `mu_b` are the inverse variances of the two links. With
/// `fading_free` set the channel power is identically 1.
struct FadingModel {
    double rho = 1.0;
    double mu_f = 1.0;
    double mu_b = 1.0;
    bool fading_free = false;

    static FadingModel none() { return {1.0, 1.0, 1.0, true}; }

    /// Throws DomainError unless rho in [0, 1] and both mu positive.
    void validate() const;
};

/// Sensor ring around the reader: exclusion radius `zeta`, reading range `xi`.
struct Annulus {
    double zeta = 1.0;
    double xi = 10.0;

    /// Throws DomainError unless xi > zeta >= 1.
    void validate() const;
    double area() const;
};

/// Density of h = |h_f|^2 |h_b|^2. Uses the I0*K0 form for rho < 1 and the
/// closed form for rho = 1.
double product_fading_pdf(double h, const FadingModel& model);

/// P(h <= x). Closed form for rho = 1, numerical integration of the density otherwise.
double product_fading_cdf(double x, const FadingModel& model);

/// P(h > x), computed directly (no 1 - cdf cancellation in the tail).
double product_fading_ccdf(double x, const FadingModel& model);

/// E[exp(i w h)]. Evaluated as a one-dimensional integral over the forward
/// power, with the contour rotated into the sector where the integrand decays
/// monotonically; this stays cheap for arbitrarily large |w|.
std::complex<double> fading_cf(double w, const FadingModel& model);

/// fading_cf read from a per-rho interpolation table (absolute error below
/// 1e-10). The first call for a given rho builds the table, which takes a
/// fraction of a second; tables are shared across threads.
std::complex<double> fading_cf_cached(double w, const FadingModel& model);

/// Draw h: complex Gaussian forward gain, backscatter gain correlated at the
/// amplitude level with coefficient rho.
double sample_fading(const FadingModel& model, RandomStream& rng);

/// Constant planar density of a sensor placed uniformly on the annulus.
double typical_distance_pdf(const Annulus& annulus);

/// Radial distance of a planar-uniform point on the annulus.
double sample_typical_distance(const Annulus& annulus, RandomStream& rng);

/// Density of the distance to the n-th nearest point of a PPP with the given
/// density on r >= zeta: 2 pi L r v^{n-1} e^{-v} / (n-1)!, v = pi L (r^2 - zeta^2).
/// Zero for r < zeta.
double nth_nearest_pdf(double r, int n, double density, double zeta);

/// 2 (pi L)^n r^{2n-1} e^{-v} / (n-1)!: the unshifted form. Agrees with
/// nth_nearest_pdf for n = 1 but integrates to more than one for n >= 2 when
/// zeta > 0. Kept for comparison only.
double nth_nearest_pdf_printed(double r, int n, double density, double zeta);

/// P(n-th nearest distance <= r).
double nth_nearest_cdf(double r, int n, double density, double zeta);

}  // namespace bscatter::channel
