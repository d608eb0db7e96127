#pragma once

#include <complex>

namespace bscatter::numerics {

using Complex = std::complex<double>;

/// Modified Bessel function of the first kind, order zero. Requires x >= 0.
double bessel_i0(double x);

/// e^{-x} I0(x); finite for all x >= 0.
double bessel_i0_scaled(double x);

/// Modified Bessel function of the second kind, order zero. Requires x > 0.
double bessel_k0(double x);

/// e^{x} K0(x); finite for all x > 0.
double bessel_k0_scaled(double x);

/// Principal argument in (-pi, pi]. A negative real with a negative-zero
/// imaginary part maps to +pi.
double principal_arg(Complex z);

/// z^p on the principal branch. 0^p is 0 for p > 0; throws DomainError for p <= 0.
Complex principal_power(Complex z, double p);

/// Upper incomplete gamma function Gamma(a, z) on the principal branch.
///
/// Small |z| uses Gamma(a) minus the lower-incomplete power series; large |z|
/// uses the Legendre continued fraction evaluated with modified Lentz. `a` must
/// not be a non-positive integer. z = 0 is only accepted for a > 0.
Complex upper_gamma(double a, Complex z);

/// Real-argument convenience overload (z > 0, or z = 0 with a > 0).
double upper_gamma(double a, double z);

}  // namespace bscatter::numerics
