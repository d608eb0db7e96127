#include "bscatter/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "bscatter/error.hpp"

namespace bscatter::numerics {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478376, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    Complex value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

struct Rule21 {
    Complex value;
    double error;
    double max_abs;
};

Rule21 gauss_kronrod21(const ComplexIntegrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<Complex, 21> fv;
    fv[10] = f(center);
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = f(center - dx);
        fv[20 - j] = f(center + dx);
    }
    Complex kronrod = fv[10] * kWgk[10];
    Complex gauss = 0.0;
    double max_abs = std::abs(fv[10]);
    for (int j = 0; j < 10; ++j) {
        const Complex pair = fv[j] + fv[20 - j];
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
        max_abs = std::max({max_abs, std::abs(fv[j]), std::abs(fv[20 - j])});
    }
    const Complex mean = 0.5 * kronrod;
    double resasc = kWgk[10] * std::abs(fv[10] - mean);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[20 - j] - mean));
    }
    resasc *= std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double resabs_floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod * half);
    err = std::max(err, resabs_floor);
    for (const auto& v : fv) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw DomainError("integrand returned a non-finite value");
        }
    }
    return {kronrod * half, err, max_abs};
}

Complex wynn_epsilon(const std::vector<Complex>& s) {
    // Classic epsilon table; returns the highest even column entry reachable.
    const std::size_t n = s.size();
    if (n < 3) return s.back();
    std::vector<Complex> prev(n + 1, 0.0);
    std::vector<Complex> cur(s.begin(), s.end());
    Complex best = s.back();
    for (std::size_t col = 1; col < n; ++col) {
        std::vector<Complex> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const Complex diff = cur[i + 1] - cur[i];
            const Complex prev_term = (col == 1) ? Complex(0.0) : prev[i + 1];
            next[i] = (std::abs(diff) < 1e-300) ? Complex(1e300) : prev_term + 1.0 / diff;
        }
        prev = cur;
        cur = std::move(next);
        if (col % 2 == 0 && !cur.empty()) {
            const Complex cand = cur.back();
            if (std::isfinite(cand.real()) && std::isfinite(cand.imag()) && std::abs(cand) < 1e200) best = cand;
        }
        if (cur.size() < 2) break;
    }
    return best;
}

}  // namespace

QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a, double b,
                                    const QuadratureSpec& spec) {
    if (!(a < b)) {
        if (a == b) return {};
        throw DomainError("integrate_adaptive: requires a < b");
    }
    QuadratureResult out;
    std::priority_queue<Segment> heap;
    const Rule21 first = gauss_kronrod21(f, a, b);
    out.evaluations = 21;
    out.max_abs = first.max_abs;
    Complex total = first.value;
    double total_err = first.error;
    heap.push({a, b, first.value, first.error});
    std::vector<Segment> frozen;

    int subdivisions = 1;
    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (total_err > tolerance() && !heap.empty()) {
        if (subdivisions >= spec.max_subdivisions) {
            throw ConvergenceError("integrate_adaptive: subdivision limit reached", std::abs(total), total_err);
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen.push_back(worst);
            continue;
        }
        const Rule21 left = gauss_kronrod21(f, worst.a, mid);
        const Rule21 right = gauss_kronrod21(f, mid, worst.b);
        out.evaluations += 42;
        out.max_abs = std::max({out.max_abs, left.max_abs, right.max_abs});
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.value, left.error});
        heap.push({mid, worst.b, right.value, right.error});
        ++subdivisions;
    }
    // Re-sum from the pieces to avoid drift in the running totals.
    Complex sum = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    for (const auto& s : frozen) {
        sum += s.value;
        err += s.error;
    }
    out.value = sum;
    out.error_estimate = err;
    out.subdivisions = subdivisions;
    out.truncated_at = b;
    return out;
}

QuadratureResult integrate_adaptive_real(const RealIntegrand& f, double a, double b,
                                         const QuadratureSpec& spec) {
    return integrate_adaptive([&](double x) { return Complex(f(x), 0.0); }, a, b, spec);
}

QuadratureResult integrate_semi_infinite(const ComplexIntegrand& f, double a,
                                         const QuadratureSpec& spec) {
    if (!(spec.initial_step > 0.0) || !(spec.growth >= 1.0)) {
        throw DomainError("integrate_semi_infinite: invalid panel layout");
    }
    QuadratureResult out;
    Complex total = 0.0;
    double left = a;
    double step = spec.initial_step;
    int quiet_panels = 0;
    const bool periodic = spec.half_period > 0.0;
    std::vector<Complex> partial_sums;
    Complex last_extrapolation = 0.0;
    int stable_extrapolations = 0;

    while (true) {
        const bool in_periodic_stage = periodic && step >= spec.half_period;
        const double width = in_periodic_stage ? spec.half_period : step;
        const double right = left + width;
        if (right > spec.hard_cap) {
            throw ConvergenceError("integrate_semi_infinite: tail did not decay before the hard cap",
                                   std::abs(total), out.error_estimate);
        }
        QuadratureSpec panel_spec = spec;
        panel_spec.abs_tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
        const QuadratureResult panel = integrate_adaptive(f, left, right, panel_spec);
        total += panel.value;
        out.error_estimate += panel.error_estimate;
        out.evaluations += panel.evaluations;
        out.subdivisions += panel.subdivisions;
        out.max_abs = std::max(out.max_abs, panel.max_abs);
        left = right;

        if (panel.max_abs * right <= spec.truncation_threshold) {
            if (++quiet_panels >= 2) {
                out.value = total;
                out.truncated_at = right;
                return out;
            }
        } else {
            quiet_panels = 0;
        }

        if (in_periodic_stage) {
            partial_sums.push_back(total);
            if (partial_sums.size() > 40) partial_sums.erase(partial_sums.begin());
            if (partial_sums.size() >= 6) {
                const Complex extrapolated = wynn_epsilon(partial_sums);
                const double change = std::abs(extrapolated - last_extrapolation);
                const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(extrapolated));
                stable_extrapolations = change <= tol ? stable_extrapolations + 1 : 0;
                last_extrapolation = extrapolated;
                if (stable_extrapolations >= 3) {
                    out.value = extrapolated;
                    out.error_estimate += change;
                    out.truncated_at = right;
                    return out;
                }
            }
        } else {
            step *= spec.growth;
        }
    }
}

QuadratureResult integrate_semi_infinite_real(const RealIntegrand& f, double a,
                                              const QuadratureSpec& spec) {
    return integrate_semi_infinite([&](double x) { return Complex(f(x), 0.0); }, a, spec);
}

QuadratureResult gil_pelaez_cdf(const ComplexIntegrand& cf, double x, QuadratureSpec spec, double mass) {
    if (x != 0.0 && spec.half_period <= 0.0) spec.half_period = std::numbers::pi / std::abs(x);
    QuadratureResult r = integrate_semi_infinite(
        [&](double t) {
            const Complex v = std::exp(Complex(0.0, -t * x)) * cf(t);
            return Complex(v.imag() / t, 0.0);
        },
        0.0, spec);
    r.value = 0.5 * mass - r.value.real() / std::numbers::pi;
    r.error_estimate /= std::numbers::pi;
    return r;
}

}  // namespace bscatter::numerics
