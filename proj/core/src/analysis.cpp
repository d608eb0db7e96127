#include "bscatter/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "bscatter/error.hpp"
#include "bscatter/quadrature.hpp"
#include "bscatter/special_functions.hpp"

namespace bscatter::analysis {

using numerics::principal_power;
using numerics::QuadratureResult;
using numerics::QuadratureSpec;
using numerics::upper_gamma;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

QuadratureSpec inner_spec() {
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-13;
    spec.max_subdivisions = 200000;
    spec.truncation_threshold = 1e-14;
    return spec;
}

// int_{r_lo}^{r_hi} 2u exp(i s u^{-2 alpha}) du via the incomplete gamma function.
Complex ring_phase_integral(double s, double r_lo, double r_hi, double alpha) {
    if (s == 0.0) return r_hi * r_hi - r_lo * r_lo;
    const double a = -1.0 / alpha;
    const Complex base(0.0, -s);
    const Complex g_hi = upper_gamma(a, base * std::pow(r_hi, -2.0 * alpha));
    const Complex g_lo = upper_gamma(a, base * std::pow(r_lo, -2.0 * alpha));
    return principal_power(base, 1.0 / alpha) * (g_hi - g_lo) / alpha;
}

// Same integral by plain quadrature, in v = u^{-2 alpha} so that the phase is
// linear: (1/alpha) int v^{-1/alpha - 1} exp(i s v) dv.
Complex ring_phase_integral_direct(double s, double r_lo, double r_hi, double alpha, double abs_tol = 1e-13) {
    QuadratureSpec spec = inner_spec();
    spec.rel_tol = 1e-8;
    spec.abs_tol = abs_tol;
    spec.max_subdivisions = 1000000;
    const auto r = numerics::integrate_adaptive(
        [&](double v) { return std::pow(v, -1.0 / alpha - 1.0) * std::exp(Complex(0.0, s * v)) / alpha; },
        std::pow(r_hi, -2.0 * alpha), std::pow(r_lo, -2.0 * alpha), spec);
    return r.value;
}

// Fading average of g(h) for a function of the channel power, using h = s^2
// to absorb the density's singularity at the origin. g also receives the
// absolute accuracy its value needs given the density weight at h.
Complex fading_average(const std::function<Complex(double, double)>& g, const channel::FadingModel& fading,
                       double rel_tol = 1e-10) {
    QuadratureSpec spec = inner_spec();
    spec.rel_tol = rel_tol;
    spec.initial_step = 0.5;
    const auto r = numerics::integrate_semi_infinite(
        [&](double s) {
            if (s <= 0.0) return Complex(0.0);
            const double h = s * s;
            const double weight = 2.0 * s * channel::product_fading_pdf(h, fading);
            if (weight == 0.0) return Complex(0.0);
            return weight * g(h, std::max(1e-13, 1e-13 / weight));
        },
        0.0, spec);
    return r.value;
}

// Gamma[a, i w / (tau xi^{2a})] - Gamma[a, i w / (tau zeta^{2a})] with w = t h.
Complex chi_bracket(double w, const SystemParams& p) {
    const double a = -1.0 / p.alpha;
    const Complex z_far(0.0, w / (p.tau_linear * std::pow(p.xi, 2.0 * p.alpha)));
    const Complex z_near(0.0, w / (p.tau_linear * std::pow(p.zeta, 2.0 * p.alpha)));
    return upper_gamma(a, z_far) - upper_gamma(a, z_near);
}

double ring_area(const SystemParams& p) { return p.xi * p.xi - p.zeta * p.zeta; }

struct InterferenceLaw {
    std::function<Complex(double)> cf;
    double atom;  // P(no interferer)
};

// P(I < h / (d^{2 alpha} tau) - c) for I with the given law, by inverting the
// characteristic function of I - X.
AnalyticResult invert_against_typical(const SystemParams& p, const channel::FadingModel& fading,
                                      const InterferenceLaw& law, double noise, double noise_limited,
                                      const AnalysisOptions& opt) {
    QuadratureSpec spec;
    spec.rel_tol = opt.rel_tol;
    spec.abs_tol = opt.abs_tol;
    spec.truncation_threshold = opt.truncation_threshold;
    spec.max_subdivisions = 100000;
    spec.initial_step = 0.1 * p.tau_linear * std::pow(p.zeta, 2.0 * p.alpha);
    spec.hard_cap = 1e30;
    // The noise factor makes the tail oscillate with period 2 pi / noise.
    if (noise > 0.0) spec.half_period = kPi / noise;

    const bool split = opt.split_atom;
    const double atom = split ? law.atom : 0.0;
    auto integrand = [&](double t) -> Complex {
        const Complex link = typical_link_cf(t, p, fading, opt);
        const Complex interference = law.cf(t) - atom;
        const Complex v = interference * std::exp(Complex(0.0, t * noise)) * link;
        return Complex(v.imag() / t, 0.0);
    };
    const QuadratureResult q = numerics::integrate_semi_infinite(integrand, 0.0, spec);

    AnalyticResult out;
    out.raw = atom * noise_limited + 0.5 * (1.0 - atom) - q.value.real() / kPi;
    out.quad_error = q.error_estimate / kPi;
    out.truncated_at = q.truncated_at;
    out.evaluations = q.evaluations;
    out.subdivisions = q.subdivisions;
    return out;
}

AnalyticResult finish(AnalyticResult r) {
    if (!std::isfinite(r.raw) || r.raw < -0.01 || r.raw > 1.01) {
        throw ConvergenceError("numerical sanity: probability " + std::to_string(r.raw) + " outside [-0.01, 1.01]",
                               r.raw, r.quad_error);
    }
    r.value = std::clamp(r.raw, 0.0, 1.0);
    return r;
}

AnalyticResult exact(double v) {
    AnalyticResult r;
    r.raw = v;
    r.value = v;
    return r;
}

InterferenceLaw typical_interference(const SystemParams& p, const channel::FadingModel& fading,
                                     const AnalysisOptions& opt) {
    const double density = p.thinned_density();
    const double atom = std::exp(-density * kPi * ring_area(p));
    const CfMode mode = opt.cf_mode;
    return {[&p, fading, density, mode](double t) { return interference_cf(t, density, p.zeta, p, fading, mode); },
            atom};
}

void require_fading_free_params(const SystemParams& p) {
    p.validate();
    if (!p.fading_free) throw DomainError("SIC analysis needs fading_free = true");
}

double stage_threshold(double r, const SystemParams& p, double noise) {
    return 1.0 / (std::pow(r, 2.0 * p.alpha) * p.tau_linear) - noise;
}

// Success probability of the typical sensor when the interferers are a PPP
// on [r, xi] (fading-free).
AnalyticResult typical_given_ring(double r, const SystemParams& p, double noise_limited,
                                  const AnalysisOptions& opt) {
    const double density = p.thinned_density();
    const auto none = channel::FadingModel::none();
    const double atom = std::exp(-density * kPi * (p.xi * p.xi - r * r));
    const InterferenceLaw law{[&](double t) { return interference_cf(t, density, r, p, none, CfMode::Gamma); }, atom};
    return invert_against_typical(p, none, law, p.noise_level(), noise_limited, opt);
}

AnalyticResult printed_stage(int n, const SystemParams& p, const AnalysisOptions& opt, bool cancel) {
    const double density = p.thinned_density();
    const double noise = p.noise_level();
    const auto none = channel::FadingModel::none();
    QuadratureSpec rspec = inner_spec();
    rspec.rel_tol = 1e-7;
    auto omega = [&](double t) -> Complex {
        const auto res = numerics::integrate_adaptive(
            [&](double r) {
                const Complex phi = interference_cf(t, density, r, p, none, CfMode::Gamma);
                const double fr = channel::nth_nearest_pdf_printed(r, n, density, p.zeta);
                if (cancel) {
                    return std::exp(Complex(0.0, -t / (std::pow(r, 2.0 * p.alpha) * p.tau_linear))) * phi * fr;
                }
                return phi * fr;
            },
            p.zeta, p.xi, rspec);
        if (cancel) return res.value;
        return chi(t, p, none) * res.value;
    };
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-9;
    spec.truncation_threshold = opt.truncation_threshold;
    spec.max_subdivisions = 20000;
    spec.initial_step = 0.1 * p.tau_linear * std::pow(p.zeta, 2.0 * p.alpha);
    spec.hard_cap = 1e12;
    AnalyticResult out;
    try {
        const auto q = numerics::integrate_semi_infinite(
            [&](double t) {
                const Complex v = principal_power(kI * (t / p.tau_linear), 1.0 / p.alpha) *
                                  std::exp(Complex(0.0, t * noise)) * omega(t);
                return Complex(v.imag() / t, 0.0);
            },
            0.0, spec);
        out.raw = 0.5 - q.value.real() / (2.0 * p.alpha * kPi);
        out.quad_error = q.error_estimate / (2.0 * p.alpha * kPi);
        out.truncated_at = q.truncated_at;
        out.evaluations = q.evaluations;
    } catch (const ConvergenceError& e) {
        out.raw = 0.5 - e.best_estimate() / (2.0 * p.alpha * kPi);
        out.quad_error = std::numeric_limits<double>::infinity();
    }
    // The printed form is only reported, never gated, so no sanity check here.
    out.value = std::clamp(out.raw, 0.0, 1.0);
    return out;
}

}  // namespace

Complex interference_cf(double t, double density, double r_min, const SystemParams& p,
                        const channel::FadingModel& fading, CfMode mode) {
    if (!(t >= 0.0)) throw DomainError("interference_cf: t must be non-negative");
    if (!(r_min >= p.zeta && r_min <= p.xi)) throw DomainError("interference_cf: r_min outside [zeta, xi]");
    if (density == 0.0 || t == 0.0 || r_min == p.xi) return 1.0;
    const double alpha = p.alpha;
    const double ring = p.xi * p.xi - r_min * r_min;

    if (fading.fading_free) {
        const Complex psi = mode == CfMode::Direct ? ring_phase_integral_direct(t, r_min, p.xi, alpha)
                                                   : ring_phase_integral(t, r_min, p.xi, alpha);
        return std::exp(kPi * density * (psi - ring));
    }

    switch (mode) {
        case CfMode::Transform: {
            const auto r = numerics::integrate_adaptive(
                [&](double u) {
                    return 2.0 * u * (channel::fading_cf_cached(t * std::pow(u, -2.0 * alpha), fading) - 1.0);
                },
                r_min, p.xi, inner_spec());
            return std::exp(kPi * density * r.value);
        }
        case CfMode::Gamma: {
            const Complex psi = fading_average(
                [&](double h, double) { return ring_phase_integral(t * h, r_min, p.xi, alpha); }, fading);
            return std::exp(kPi * density * (psi - ring));
        }
        case CfMode::Direct: {
            const Complex psi = fading_average(
                [&](double h, double tol) { return ring_phase_integral_direct(t * h, r_min, p.xi, alpha, tol); },
                fading, 1e-8);
            return std::exp(kPi * density * (psi - ring));
        }
    }
    throw DomainError("interference_cf: unknown mode");
}

Complex chi(double t, const SystemParams& p, const channel::FadingModel& fading, CfMode mode) {
    if (!(t > 0.0)) throw DomainError("chi: t must be positive");
    const double alpha = p.alpha;
    const double tau = p.tau_linear;
    if (fading.fading_free && mode != CfMode::Direct) return chi_bracket(t, p);

    // alpha tau^{1/alpha} (it)^{-1/alpha} int 2u E[exp(-i t h / (u^{2 alpha} tau))] du
    const Complex scale = alpha * std::pow(tau, 1.0 / alpha) * principal_power(kI * t, -1.0 / alpha);
    if (fading.fading_free) {
        return scale * ring_phase_integral_direct(-t / tau, p.zeta, p.xi, alpha);
    }
    switch (mode) {
        case CfMode::Transform: {
            const auto r = numerics::integrate_adaptive(
                [&](double u) { return 2.0 * u * channel::fading_cf_cached(-t * std::pow(u, -2.0 * alpha) / tau, fading); },
                p.zeta, p.xi, inner_spec());
            return scale * r.value;
        }
        case CfMode::Gamma:
            return fading_average(
                [&](double h, double) { return std::pow(h, 1.0 / alpha) * chi_bracket(t * h, p); }, fading);
        case CfMode::Direct:
            return scale * fading_average(
                               [&](double h, double tol) {
                                   return ring_phase_integral_direct(-t * h / tau, p.zeta, p.xi, alpha, tol);
                               },
                               fading, 1e-8);
    }
    throw DomainError("chi: unknown mode");
}

Complex typical_link_cf(double t, const SystemParams& p, const channel::FadingModel& fading,
                        const AnalysisOptions& opt) {
    if (t == 0.0) return 1.0;
    const double alpha = p.alpha;
    const double norm = alpha * std::pow(p.tau_linear, 1.0 / alpha) * ring_area(p);
    Complex branch = principal_power(kI * t, 1.0 / alpha);
    if (opt.branch_canary) branch = std::conj(branch);
    return branch * chi(t, p, fading, opt.cf_mode) / norm;
}

AnalyticResult noise_limited_probability(const SystemParams& p, const channel::FadingModel& fading) {
    p.validate();
    const double noise = p.noise_level();
    if (p.tau_linear == 0.0 || noise == 0.0) return exact(1.0);
    if (!std::isfinite(noise)) return exact(0.0);
    const double area = ring_area(p);
    const double tn = p.tau_linear * noise;

    if (fading.fading_free) {
        // h = 1: success iff d^{2 alpha} < 1 / (tau c)
        const double d2 = std::pow(tn, -1.0 / p.alpha);
        return exact((std::clamp(d2, p.zeta * p.zeta, p.xi * p.xi) - p.zeta * p.zeta) / area);
    }
    const double m = fading.mu_f * fading.mu_b;
    if (fading.rho == 1.0) {
        const double k = std::sqrt(m * tn);
        const double a = 2.0 / p.alpha;
        const double g = upper_gamma(a, k * std::pow(p.zeta, p.alpha)) - upper_gamma(a, k * std::pow(p.xi, p.alpha));
        AnalyticResult r = exact(0.0);
        r.raw = 2.0 * std::pow(k, -a) / (p.alpha * area) * g;
        return finish(r);
    }
    QuadratureSpec spec;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-13;
    const auto q = numerics::integrate_adaptive_real(
        [&](double d) { return 2.0 * d * channel::product_fading_ccdf(tn * std::pow(d, 2.0 * p.alpha), fading); },
        p.zeta, p.xi, spec);
    AnalyticResult r;
    r.raw = q.value.real() / area;
    r.quad_error = q.error_estimate / area;
    r.evaluations = q.evaluations;
    return finish(r);
}

AnalyticResult decoding_probability(const SystemParams& p, const channel::FadingModel& fading,
                                    const AnalysisOptions& opt) {
    p.validate();
    fading.validate();
    if (p.tau_linear == 0.0) return exact(1.0);
    const double noise = p.noise_level();
    if (!std::isfinite(noise)) return exact(0.0);
    const AnalyticResult nl = noise_limited_probability(p, fading);
    if (p.thinned_density() == 0.0) return nl;
    return finish(invert_against_typical(p, fading, typical_interference(p, fading, opt), noise, nl.raw, opt));
}

AnalyticResult decoding_probability_high_power(const SystemParams& p, const channel::FadingModel& fading,
                                               const AnalysisOptions& opt) {
    p.validate();
    fading.validate();
    if (p.tau_linear == 0.0 || p.thinned_density() == 0.0) return exact(1.0);
    return finish(invert_against_typical(p, fading, typical_interference(p, fading, opt), 0.0, 1.0, opt));
}

AnalyticResult interference_cdf(double x, double density, double r_min, const SystemParams& p,
                                const AnalysisOptions& opt) {
    if (x < 0.0) return exact(0.0);
    const double atom = std::exp(-density * kPi * (p.xi * p.xi - r_min * r_min));
    if (density == 0.0 || atom == 1.0) return exact(1.0);
    if (x == 0.0) return exact(atom);
    const auto none = channel::FadingModel::none();
    QuadratureSpec spec;
    spec.rel_tol = opt.rel_tol;
    spec.abs_tol = opt.abs_tol;
    spec.truncation_threshold = opt.truncation_threshold;
    spec.max_subdivisions = 100000;
    spec.initial_step = std::min(0.1 / x, 0.1 * std::pow(r_min, 2.0 * p.alpha));
    spec.hard_cap = 1e30;
    const double mass = opt.split_atom ? 1.0 - atom : 1.0;
    const double shift = opt.split_atom ? atom : 0.0;
    const auto q = numerics::gil_pelaez_cdf(
        [&](double t) { return interference_cf(t, density, r_min, p, none, CfMode::Gamma) - shift; }, x, spec, mass);
    AnalyticResult r;
    r.raw = shift + q.value.real();
    r.quad_error = q.error_estimate;
    r.truncated_at = q.truncated_at;
    r.evaluations = q.evaluations;
    return finish(r);
}

AnalyticResult cancel_probability(int n, const SystemParams& p, const AnalysisOptions& opt) {
    if (n < 1) throw DomainError("cancel_probability: n must be >= 1");
    require_fading_free_params(p);
    if (opt.sic_form == SicForm::Printed) return printed_stage(n, p, opt, true);
    const double density = p.thinned_density();
    if (density == 0.0) return exact(0.0);
    const double noise = p.noise_level();
    // x(r) > 0 only inside r_star
    double r_hi = p.xi;
    if (noise > 0.0) r_hi = std::min(r_hi, std::pow(p.tau_linear * noise, -1.0 / (2.0 * p.alpha)));
    if (p.tau_linear == 0.0) return exact(channel::nth_nearest_cdf(p.xi, n, density, p.zeta));
    if (!(r_hi > p.zeta)) return exact(0.0);

    AnalyticResult acc;
    QuadratureSpec spec;
    spec.rel_tol = 1e-7;
    spec.abs_tol = 1e-9;
    spec.max_subdivisions = 2000;
    const auto q = numerics::integrate_adaptive_real(
        [&](double r) {
            const double fr = channel::nth_nearest_pdf(r, n, density, p.zeta);
            if (fr < 1e-300) return 0.0;
            const AnalyticResult f = interference_cdf(stage_threshold(r, p, noise), density, r, p, opt);
            acc.quad_error += f.quad_error * fr;
            acc.evaluations += f.evaluations;
            return f.value * fr;
        },
        p.zeta, r_hi, spec);
    AnalyticResult r;
    r.raw = q.value.real();
    r.quad_error = q.error_estimate + acc.quad_error * (r_hi - p.zeta) / std::max<long>(1, q.evaluations);
    r.evaluations = acc.evaluations;
    return finish(r);
}

AnalyticResult decode_after_cancel(int n, const SystemParams& p, const AnalysisOptions& opt) {
    if (n < 1) throw DomainError("decode_after_cancel: n must be >= 1");
    require_fading_free_params(p);
    if (opt.sic_form == SicForm::Printed) return printed_stage(n, p, opt, false);
    const auto none = channel::FadingModel::none();
    const AnalyticResult nl = noise_limited_probability(p, none);
    const double density = p.thinned_density();
    if (density == 0.0 || p.tau_linear == 0.0) return nl;

    // The n-th interferer lies beyond xi with probability 1 - within; then
    // nothing interferes.
    const double within = channel::nth_nearest_cdf(p.xi, n, density, p.zeta);
    AnalyticResult acc;
    QuadratureSpec spec;
    spec.rel_tol = 1e-7;
    spec.abs_tol = 1e-9;
    spec.max_subdivisions = 2000;
    const auto q = numerics::integrate_adaptive_real(
        [&](double r) {
            const double fr = channel::nth_nearest_pdf(r, n, density, p.zeta);
            if (fr < 1e-300) return 0.0;
            const AnalyticResult s = finish(typical_given_ring(r, p, nl.raw, opt));
            acc.evaluations += s.evaluations;
            acc.quad_error = std::max(acc.quad_error, s.quad_error);
            return s.value * fr;
        },
        p.zeta, p.xi, spec);
    AnalyticResult r;
    r.raw = q.value.real() + (1.0 - within) * nl.raw;
    r.quad_error = q.error_estimate + acc.quad_error;
    r.evaluations = acc.evaluations;
    return finish(r);
}

AnalyticResult sic_decoding_probability(const SystemParams& p, const AnalysisOptions& opt) {
    require_fading_free_params(p);
    const auto none = channel::FadingModel::none();
    const AnalyticResult base = decoding_probability(p, none, opt);
    AnalyticResult out = base;
    double total = base.raw;
    double prev_decode = base.value;
    double miss = 1.0;
    double cancelled = 1.0;
    for (int i = 1; i <= p.n_sic; ++i) {
        const AnalyticResult pc = cancel_probability(i, p, opt);
        const AnalyticResult pd = decode_after_cancel(i, p, opt);
        miss *= 1.0 - prev_decode;
        cancelled *= pc.value;
        total += miss * cancelled * pd.value;
        out.quad_error += pc.quad_error + pd.quad_error;
        out.evaluations += pc.evaluations + pd.evaluations;
        prev_decode = pd.value;
    }
    out.raw = total;
    return finish(out);
}

}  // namespace bscatter::analysis
