#include "bscatter/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bscatter/error.hpp"

namespace bscatter::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Power series for I0; every term is positive so there is no cancellation.
double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 0.25 * kEps * sum) break;
    }
    return sum;
}

// Hankel asymptotic expansion of e^{-x} I0(x), usable for x >= 30.
double i0_scaled_asymptotic(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double f = (2.0 * k - 1.0);
        const double next = term * f * f / (8.0 * k * x);
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 0.25 * kEps * sum) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double k0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double harmonic = 0.0;
    double tail = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        harmonic += 1.0 / k;
        const double add = term * harmonic;
        tail += add;
        if (add < 0.25 * kEps * std::abs(tail)) break;
    }
    return -(std::log(0.5 * x) + std::numbers::egamma) * i0_series(x) + tail;
}

// Steed's continued fraction (CF2) for e^{x} K0(x), x >= 2.
double k0_scaled_steed(double x) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double delh = d;
    double h = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 10000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    return std::sqrt(std::numbers::pi / (2.0 * x)) / s;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite argument");
}

Complex lower_series_part(double a, Complex z) {
    // sum_{k>=0} (-z)^k / (k! (a+k))
    Complex term = 1.0;
    Complex sum = 1.0 / a;
    const double zabs = std::abs(z);
    for (int k = 1; k < 2000; ++k) {
        term *= -z / static_cast<double>(k);
        const Complex add = term / (a + k);
        sum += add;
        if (k > zabs && std::abs(add) < 0.25 * kEps * std::abs(sum)) return sum;
    }
    throw ConvergenceError("upper_gamma: power series did not converge", std::abs(sum), std::abs(term));
}

Complex upper_continued_fraction(double a, Complex z) {
    Complex b = z + 1.0 - a;
    Complex c = 1.0 / kTiny;
    Complex d = 1.0 / b;
    Complex h = d;
    for (int i = 1; i < 20000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const Complex del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            const Complex log_z(std::log(std::abs(z)), principal_arg(z));
            return std::exp(a * log_z - z) * h;
        }
    }
    throw ConvergenceError("upper_gamma: continued fraction did not converge", std::abs(h), 0.0);
}

}  // namespace

double bessel_i0(double x) {
    require_finite(x, "bessel_i0");
    if (x < 0.0) throw DomainError("bessel_i0: negative argument");
    if (x < 30.0) return i0_series(x);
    return i0_scaled_asymptotic(x) * std::exp(x);
}

double bessel_i0_scaled(double x) {
    require_finite(x, "bessel_i0_scaled");
    if (x < 0.0) throw DomainError("bessel_i0_scaled: negative argument");
    if (x < 30.0) return i0_series(x) * std::exp(-x);
    return i0_scaled_asymptotic(x);
}

double bessel_k0(double x) {
    require_finite(x, "bessel_k0");
    if (x <= 0.0) throw DomainError("bessel_k0: argument must be positive");
    if (x <= 2.0) return k0_series(x);
    return k0_scaled_steed(x) * std::exp(-x);
}

double bessel_k0_scaled(double x) {
    require_finite(x, "bessel_k0_scaled");
    if (x <= 0.0) throw DomainError("bessel_k0_scaled: argument must be positive");
    if (x <= 2.0) return k0_series(x) * std::exp(x);
    return k0_scaled_steed(x);
}

double principal_arg(Complex z) {
    if (z.imag() == 0.0 && z.real() < 0.0) return std::numbers::pi;
    return std::arg(z);
}

Complex principal_power(Complex z, double p) {
    require_finite(z.real(), "principal_power");
    require_finite(z.imag(), "principal_power");
    require_finite(p, "principal_power");
    if (z == Complex(0.0, 0.0)) {
        if (p > 0.0) return 0.0;
        throw DomainError("principal_power: zero base with non-positive exponent");
    }
    if (p == 0.0) return 1.0;
    return std::exp(p * Complex(std::log(std::abs(z)), principal_arg(z)));
}

Complex upper_gamma(double a, Complex z) {
    require_finite(a, "upper_gamma");
    require_finite(z.real(), "upper_gamma");
    require_finite(z.imag(), "upper_gamma");
    if (a <= 0.0 && a == std::floor(a)) throw DomainError("upper_gamma: a is a non-positive integer");
    const double zabs = std::abs(z);
    if (zabs == 0.0) {
        if (a > 0.0) return std::tgamma(a);
        throw DomainError("upper_gamma: z = 0 with a <= 0");
    }
    // The continued fraction converges everywhere off the negative real axis,
    // but slowly near it; keep the series there.
    const bool near_negative_axis = z.real() < 0.0 && std::abs(z.imag()) < 0.5 * zabs;
    const double series_limit = near_negative_axis ? 30.0 : 4.0;
    if (zabs <= series_limit) {
        return std::tgamma(a) - principal_power(z, a) * lower_series_part(a, z);
    }
    return upper_continued_fraction(a, z);
}

double upper_gamma(double a, double z) {
    if (z < 0.0) throw DomainError("upper_gamma: negative real argument");
    return upper_gamma(a, Complex(z, 0.0)).real();
}

}  // namespace bscatter::numerics
