#include "bscatter/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "bscatter/error.hpp"
#include "bscatter/quadrature.hpp"
#include "bscatter/special_functions.hpp"

namespace bscatter::channel {

using numerics::Complex;

namespace {

numerics::QuadratureSpec tight_spec() {
    numerics::QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-15;
    spec.truncation_threshold = 1e-16;
    return spec;
}

// Density of u = sqrt(mu_f mu_b h) for rho < 1.
double amplitude_density(double u, double rho) {
    if (u <= 0.0) return 0.0;
    const double q = 1.0 - rho * rho;
    const double a = 2.0 * rho * u / q;
    const double b = 2.0 * u / q;
    return 4.0 * u / q * numerics::bessel_i0_scaled(a) * numerics::bessel_k0_scaled(b) * std::exp(a - b);
}

}  // namespace

void FadingModel::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("fading: rho must lie in [0, 1]");
    if (!(mu_f > 0.0) || !(mu_b > 0.0)) throw DomainError("fading: mu_f and mu_b must be positive");
}

void Annulus::validate() const {
    if (!(zeta >= 1.0)) throw DomainError("annulus: zeta must be >= 1");
    if (!(xi > zeta) || !std::isfinite(xi)) throw DomainError("annulus: xi must exceed zeta");
}

double Annulus::area() const { return std::numbers::pi * (xi * xi - zeta * zeta); }

double product_fading_pdf(double h, const FadingModel& model) {
    if (model.fading_free) throw DomainError("product_fading_pdf: fading-free model has no density");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("product_fading_pdf: h must be positive");
    const double m = model.mu_f * model.mu_b;
    if (model.rho == 1.0) {
        return 0.5 * std::sqrt(m / h) * std::exp(-std::sqrt(m * h));
    }
    const double q = 1.0 - model.rho * model.rho;
    const double root = std::sqrt(m * h);
    const double a = 2.0 * model.rho * root / q;
    const double b = 2.0 * root / q;
    return 2.0 * m / q * numerics::bessel_i0_scaled(a) * numerics::bessel_k0_scaled(b) * std::exp(a - b);
}

double product_fading_cdf(double x, const FadingModel& model) {
    if (model.fading_free) return x >= 1.0 ? 1.0 : 0.0;
    if (x <= 0.0) return 0.0;
    const double u = std::sqrt(model.mu_f * model.mu_b * x);
    if (model.rho == 1.0) return -std::expm1(-u);
    if (u > 2.0) return 1.0 - product_fading_ccdf(x, model);
    const auto r = numerics::integrate_adaptive_real(
        [&](double s) { return amplitude_density(s, model.rho); }, 0.0, u, tight_spec());
    return r.value.real();
}

double product_fading_ccdf(double x, const FadingModel& model) {
    if (model.fading_free) return x < 1.0 ? 1.0 : 0.0;
    if (x <= 0.0) return 1.0;
    const double u = std::sqrt(model.mu_f * model.mu_b * x);
    if (model.rho == 1.0) return std::exp(-u);
    if (u <= 2.0) return 1.0 - product_fading_cdf(x, model);
    const auto r = numerics::integrate_semi_infinite_real(
        [&](double s) { return amplitude_density(s, model.rho); }, u, tight_spec());
    return r.value.real();
}

std::complex<double> fading_cf(double w, const FadingModel& model) {
    if (model.fading_free) return std::exp(Complex(0.0, w));
    if (w == 0.0) return 1.0;
    // h = x * y / m with x ~ Exp(1) the forward power and y | x a scaled
    // non-central chi-square; E[e^{i k x y} | x] is elementary. The remaining
    // x-integral is taken along x = e^{+-i pi/4} s, where it decays without
    // oscillating.
    const double kappa = w / (model.mu_f * model.mu_b);
    const double rho2 = model.rho * model.rho;
    const double q = 1.0 - rho2;
    const double sigma = kappa > 0.0 ? 1.0 : -1.0;
    const Complex ray = std::polar(1.0, sigma * std::numbers::pi / 4.0);
    const Complex ik(0.0, kappa);
    auto integrand = [&](double s) -> Complex {
        const Complex x = ray * s;
        const Complex denom = 1.0 - ik * q * x;
        return std::exp(-x + ik * rho2 * x * x / denom) / denom;
    };
    numerics::QuadratureSpec spec = tight_spec();
    spec.initial_step = std::min(1.0, 1.0 / std::sqrt(std::abs(kappa)));
    const auto r = numerics::integrate_semi_infinite(integrand, 0.0, spec);
    return ray * r.value;
}

namespace {

// fading_cf at unit mu on a uniform grid in log|kappa|, read back with
// four-point Lagrange interpolation.
class CfTable {
public:
    static constexpr double kLogMin = -18.420680743952367;  // ln 1e-8
    static constexpr double kLogMax = 46.051701859880914;   // ln 1e20
    static constexpr double kStep = 0.01;

    explicit CfTable(double rho) : rho_(rho) {
        const FadingModel unit{rho, 1.0, 1.0, false};
        const int n = static_cast<int>(std::ceil((kLogMax - kLogMin) / kStep)) + 4;
        values_.resize(n);
        for (int i = 0; i < n; ++i) values_[i] = fading_cf(std::exp(kLogMin + (i - 1) * kStep), unit);
    }

    Complex operator()(double kappa) const {
        const double k = std::abs(kappa);
        Complex v;
        if (k < 1e-8) {
            v = Complex(1.0, k * (1.0 + rho_ * rho_));
        } else if (k > 1e20) {
            v = fading_cf(k, {rho_, 1.0, 1.0, false});
        } else {
            const double x = (std::log(k) - kLogMin) / kStep + 1.0;
            const int i = std::clamp(static_cast<int>(x), 1, static_cast<int>(values_.size()) - 3);
            const double f = x - i;
            const double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
            const double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
            const double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
            const double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
            v = w0 * values_[i - 1] + w1 * values_[i] + w2 * values_[i + 1] + w3 * values_[i + 2];
        }
        return kappa < 0.0 ? std::conj(v) : v;
    }

private:
    double rho_;
    std::vector<Complex> values_;
};

std::shared_ptr<const CfTable> table_for(double rho) {
    static std::mutex mutex;
    static std::map<double, std::shared_ptr<const CfTable>> tables;
    std::lock_guard lock(mutex);
    auto& slot = tables[rho];
    if (!slot) slot = std::make_shared<const CfTable>(rho);
    return slot;
}

}  // namespace

std::complex<double> fading_cf_cached(double w, const FadingModel& model) {
    if (model.fading_free) return std::exp(Complex(0.0, w));
    return (*table_for(model.rho))(w / (model.mu_f * model.mu_b));
}

double sample_fading(const FadingModel& model, RandomStream& rng) {
    if (model.fading_free) return 1.0;
    const double var_f = 1.0 / model.mu_f;
    const double var_b = 1.0 / model.mu_b;
    const std::complex<double> g_f = rng.complex_normal(var_f);
    const std::complex<double> w = rng.complex_normal(var_b);
    const std::complex<double> g_b =
        model.rho * std::sqrt(var_b / var_f) * g_f + std::sqrt(1.0 - model.rho * model.rho) * w;
    return std::norm(g_f) * std::norm(g_b);
}

double typical_distance_pdf(const Annulus& annulus) {
    annulus.validate();
    return 1.0 / annulus.area();
}

double sample_typical_distance(const Annulus& annulus, RandomStream& rng) {
    const double z2 = annulus.zeta * annulus.zeta;
    const double r = std::sqrt(z2 + rng.uniform() * (annulus.xi * annulus.xi - z2));
    return std::clamp(r, annulus.zeta, annulus.xi);
}

double nth_nearest_pdf(double r, int n, double density, double zeta) {
    if (n < 1) throw DomainError("nth_nearest_pdf: n must be >= 1");
    if (!(density > 0.0)) throw DomainError("nth_nearest_pdf: density must be positive");
    if (r < zeta) return 0.0;
    // Points in (zeta, r) are Poisson with mean v = pi * density * (r^2 - zeta^2).
    const double pl = std::numbers::pi * density;
    const double v = pl * (r * r - zeta * zeta);
    double log_pdf = std::log(2.0 * pl * r) - v - std::lgamma(static_cast<double>(n));
    if (n > 1) {
        if (v <= 0.0) return 0.0;
        log_pdf += (n - 1) * std::log(v);
    }
    return std::exp(log_pdf);
}

double nth_nearest_pdf_printed(double r, int n, double density, double zeta) {
    if (n < 1) throw DomainError("nth_nearest_pdf_printed: n must be >= 1");
    if (!(density > 0.0)) throw DomainError("nth_nearest_pdf_printed: density must be positive");
    if (r < zeta) return 0.0;
    const double pl = std::numbers::pi * density;
    const double log_pdf = std::log(2.0) + n * std::log(pl) - std::lgamma(static_cast<double>(n)) +
                           (2.0 * n - 1.0) * std::log(r) - pl * (r * r - zeta * zeta);
    return std::exp(log_pdf);
}

double nth_nearest_cdf(double r, int n, double density, double zeta) {
    if (n < 1) throw DomainError("nth_nearest_cdf: n must be >= 1");
    if (r <= zeta || !(density > 0.0)) return 0.0;
    const double v = std::numbers::pi * density * (r * r - zeta * zeta);
    // 1 - e^{-v} sum_{k<n} v^k / k!
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < n; ++k) {
        term *= v / k;
        sum += term;
    }
    return -std::expm1(-v) - std::exp(-v) * (sum - 1.0);
}

}  // namespace bscatter::channel
