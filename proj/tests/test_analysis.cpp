#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "bscatter/analysis.hpp"
#include "bscatter/error.hpp"
#include "bscatter/mcsim.hpp"
#include "bscatter/quadrature.hpp"
#include "bscatter/random.hpp"

using namespace bscatter;
using namespace bscatter::analysis;
using std::numbers::pi;

namespace {

SystemParams with(double tau, int d, double delta, double rho) {
    SystemParams p;
    p.tau_linear = tau;
    p.d_sectors = d;
    p.delta_hz = delta;
    p.rho = rho;
    return p;
}

SystemParams sic_params(double tau, int n) {
    SystemParams p;
    p.fading_free = true;
    p.d_sectors = 8;
    p.tau_linear = tau;
    p.n_sic = n;
    return p;
}

double decode(const SystemParams& p, AnalysisOptions o = {}) {
    return decoding_probability(p, p.fading_model(), o).value;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

// Fraction of fading-free realizations in which the typical sensor clears tau
// once the n nearest interferers are gone, and in which the n-th nearest
// clears tau against those beyond it.
struct SicOracle {
    double decode_after = 0.0;
    double cancel = 0.0;
};

SicOracle sic_oracle(const SystemParams& p, int n, long trials) {
    const auto none = channel::FadingModel::none();
    const double k = p.beta * p.gain() * p.p_linear;
    long dec = 0, can = 0;
    for (long t = 0; t < trials; ++t) {
        RandomStream rng(99, static_cast<std::uint64_t>(t));
        const auto net = mcsim::realize_network(p, none, rng);
        const auto& d = net.interferer_distances;
        double beyond = 0.0;
        for (std::size_t j = static_cast<std::size_t>(n); j < d.size(); ++j) beyond += std::pow(d[j], -2.0 * p.alpha);
        const double own = k * std::pow(net.typical_distance, -2.0 * p.alpha);
        if (own / (p.sigma2_linear + k * beyond) >= p.tau_linear) ++dec;
        if (d.size() >= static_cast<std::size_t>(n)) {
            const double target = k * std::pow(d[static_cast<std::size_t>(n - 1)], -2.0 * p.alpha);
            if (target / (p.sigma2_linear + k * beyond) >= p.tau_linear) ++can;
        }
    }
    return {static_cast<double>(dec) / trials, static_cast<double>(can) / trials};
}

}  // namespace

TEST_CASE("interference cf basic limits") {
    const SystemParams p = with(1.0, 1, 12000.0, 1.0);
    const auto fading = p.fading_model();
    CHECK(std::abs(interference_cf(1e-9, 0.05, p.zeta, p, fading) - 1.0) <= 1e-6);
    CHECK(interference_cf(3.0, 0.0, p.zeta, p, fading) == Complex(1.0, 0.0));
    CHECK(interference_cf(0.0, 0.05, p.zeta, p, fading) == Complex(1.0, 0.0));
    CHECK(interference_cf(3.0, 0.05, p.xi, p, fading) == Complex(1.0, 0.0));
    CHECK_THROWS_AS(interference_cf(-1.0, 0.05, p.zeta, p, fading), DomainError);
    CHECK_THROWS_AS(interference_cf(1.0, 0.05, 0.5, p, fading), DomainError);

    for (double rho : {0.0, 0.5, 1.0}) {
        const channel::FadingModel f{rho, 1.0, 1.0, false};
        for (double t = 1e-4; t < 1e5; t *= 4.0) {
            CHECK(std::abs(interference_cf(t, 0.05, p.zeta, p, f)) <= 1.0 + 1e-12);
        }
    }
    for (double t = 1e-4; t < 1e5; t *= 4.0) {
        CHECK(std::abs(interference_cf(t, 0.05, p.zeta, p, channel::FadingModel::none())) <= 1.0 + 1e-12);
    }
}

TEST_CASE("interference cf: gamma form, direct form and transform agree") {
    const SystemParams p = with(1.0, 1, 12000.0, 1.0);
    const Complex g = interference_cf(1.0, 0.05, p.zeta, p, p.fading_model(), CfMode::Gamma);
    const Complex d = interference_cf(1.0, 0.05, p.zeta, p, p.fading_model(), CfMode::Direct);
    const Complex t = interference_cf(1.0, 0.05, p.zeta, p, p.fading_model(), CfMode::Transform);
    CHECK(rel(g, d) <= 1e-6);
    CHECK(rel(t, d) <= 1e-6);
    CHECK(std::abs(t - Complex(0.937346486286, 0.095618125169)) <= 1e-9);

    for (double rho : {0.0, 0.5}) {
        const channel::FadingModel f{rho, 1.0, 1.0, false};
        for (double tt : {0.1, 1.0, 10.0}) {
            CAPTURE(rho);
            CAPTURE(tt);
            const Complex a = interference_cf(tt, 0.02, 1.5, p, f, CfMode::Gamma);
            const Complex b = interference_cf(tt, 0.02, 1.5, p, f, CfMode::Direct);
            CHECK(rel(a, b) <= 1e-5);
        }
    }
    const auto none = channel::FadingModel::none();
    for (double tt : {0.1, 1.0, 10.0, 100.0}) {
        CHECK(rel(interference_cf(tt, 0.05, 1.0, p, none, CfMode::Gamma),
                  interference_cf(tt, 0.05, 1.0, p, none, CfMode::Direct)) <= 1e-6);
    }
}

TEST_CASE("interference cf against the empirical cf") {
    // lambda' = 0.05 with D = 1, p_c = 1
    SystemParams p = with(1.0, 1, 12000.0, 1.0);
    p.lambda = 0.05;
    const std::vector<double> ts{0.1, 1.0, 10.0};
    const long trials = 200000;
    const auto emp = mcsim::empirical_cf(p, p.fading_model(), ts, trials, 5);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CAPTURE(ts[i]);
        const Complex a = interference_cf(ts[i], p.thinned_density(), p.zeta, p, p.fading_model());
        CHECK(std::abs(a.real() - emp[i].value.real()) <= 3.0 * emp[i].se_real + 1e-12);
        CHECK(std::abs(a.imag() - emp[i].value.imag()) <= 3.0 * emp[i].se_imag + 1e-12);
    }
}

TEST_CASE("chi limits and pre-transform oracle") {
    // fading-free small-t limit
    SystemParams p = with(0.7, 1, 12000.0, 1.0);
    const double a = 1.0 / p.alpha;
    {
        const double t = 1e-8;
        const Complex lhs = numerics::principal_power(Complex(0.0, t), a) * chi(t, p, channel::FadingModel::none());
        const double want = p.alpha * std::pow(p.tau_linear, a) * (p.xi * p.xi - p.zeta * p.zeta);
        CHECK(std::abs(lhs - want) / want <= 1e-3);
    }
    // collapsing ring
    SystemParams thin = p;
    thin.xi = p.zeta * (1.0 + 1e-12);
    CHECK(std::abs(chi(1.0, thin, channel::FadingModel::none())) <= 1e-9);

    // rho = 1, t = 1: E over (h, u) of exp(-i t h / (u^{2 alpha} tau)), h = X^2, X ~ Exp(1)
    p = with(1.0, 1, 12000.0, 1.0);
    const double t = 1.0;
    numerics::QuadratureSpec s;
    s.rel_tol = 1e-11;
    s.max_subdivisions = 100000;
    const auto outer = numerics::integrate_adaptive(
        [&](double u) {
            const double w = t / (std::pow(u, 2.0 * p.alpha) * p.tau_linear);
            const auto inner = numerics::integrate_adaptive(
                [&](double x) { return std::exp(Complex(-x, -w * x * x)); }, 0.0, 45.0, s);
            return 2.0 * u * inner.value;
        },
        p.zeta, p.xi, s);
    const double area = p.xi * p.xi - p.zeta * p.zeta;
    const Complex link = outer.value / area;
    const Complex chi_oracle =
        link * p.alpha * std::pow(p.tau_linear, a) * area / numerics::principal_power(Complex(0.0, t), a);
    CHECK(rel(chi(t, p, p.fading_model()), chi_oracle) <= 1e-5);
    CHECK(rel(typical_link_cf(t, p, p.fading_model()), link) <= 1e-5);
    CHECK(std::abs(chi(1.0, p, p.fading_model()) - Complex(198.5142550763, -146.2289239292)) <= 1e-7);
    CHECK(rel(chi(1.0, p, p.fading_model(), CfMode::Gamma), chi_oracle) <= 1e-5);
    CHECK(rel(chi(1.0, p, p.fading_model(), CfMode::Direct), chi_oracle) <= 1e-5);
}

TEST_CASE("chi forms agree across thresholds and correlations") {
    for (double tau_db : {-20.0, -10.0, 0.0, 10.0}) {
        for (double rho : {0.0, 0.5, 1.0}) {
            const SystemParams p = with(std::pow(10.0, tau_db / 10.0), 1, 12000.0, rho);
            for (double t : {0.1, 1.0, 10.0}) {
                CAPTURE(tau_db);
                CAPTURE(rho);
                CAPTURE(t);
                const Complex g = chi(t, p, p.fading_model(), CfMode::Gamma);
                const Complex d = chi(t, p, p.fading_model(), CfMode::Direct);
                const Complex x = chi(t, p, p.fading_model(), CfMode::Transform);
                CHECK(rel(g, d) <= 1e-5);
                CHECK(rel(x, d) <= 1e-5);
            }
        }
    }
}

TEST_CASE("decoding probability examples") {
    // tau -> 0. With rho = 1 the |g|^4 fading has enough mass near zero that a
    // ring-edge sensor still fails at tau = 1e-9 about 0.8% of the time (the
    // simulation agrees), so the limit is checked further out for that case.
    CHECK(decode(with(1e-9, 1, 12000.0, 0.0)) >= 0.999);
    CHECK(decode(with(1e-12, 1, 12000.0, 1.0)) >= 0.999);
    {
        const SystemParams tiny = with(1e-9, 1, 12000.0, 1.0);
        const auto mc = mcsim::estimate_decoding_probability(tiny, tiny.fading_model(), 200000, 1);
        CHECK(std::abs(decode(tiny) - mc.estimate) <= 3.0 * mc.half_width());
    }
    CHECK(decode(with(0.0, 1, 12000.0, 1.0)) == 1.0);
    CHECK(decode(with(1.0, 1, 12000.0, 1.0)) < 0.05);

    const SystemParams p = with(0.1, 8, 500.0, 1.0);
    const auto r = decoding_probability(p, p.fading_model());
    CHECK(r.value == doctest::Approx(0.629128957193).epsilon(1e-8));
    CHECK(r.quad_error < 1e-6);
    const auto mc = mcsim::estimate_decoding_probability(p, p.fading_model(), 100000, 1);
    CHECK(std::abs(r.value - mc.estimate) <= std::max(0.015, 3.0 * mc.half_width()));
}

TEST_CASE("split and unsplit inversion agree") {
    for (double rho : {0.0, 0.5, 1.0}) {
        for (double tau : {0.1, 1.0}) {
            const SystemParams p = with(tau, 8, 500.0, rho);
            AnalysisOptions plain;
            plain.split_atom = false;
            CHECK(std::abs(decode(p) - decode(p, plain)) <= 1e-6);
        }
    }
}

TEST_CASE("branch canary breaks the inversion") {
    AnalysisOptions bad;
    bad.branch_canary = true;
    const SystemParams p = with(0.1, 8, 500.0, 1.0);
    const Complex good_link = typical_link_cf(1.0, p, p.fading_model());
    const Complex bad_link = typical_link_cf(1.0, p, p.fading_model(), bad);
    CHECK(std::abs(good_link - bad_link) > 0.1);
    // The conjugate branch makes the inversion integrand blow up, which the
    // engine reports instead of returning a number.
    CHECK_THROWS(decoding_probability(p, p.fading_model(), bad));
}

TEST_CASE("fading-free path equals the point-mass quadrature path") {
    for (double tau : {0.1, 1.0, 10.0}) {
        SystemParams p = with(tau, 8, 12000.0, 1.0);
        p.fading_free = true;
        AnalysisOptions direct;
        direct.cf_mode = CfMode::Direct;
        CHECK(std::abs(decode(p) - decode(p, direct)) <= 1e-6);
    }
}

TEST_CASE("high-power bound") {
    for (double rho : {0.0, 1.0}) {
        const SystemParams p = with(0.1, 8, 500.0, rho);
        const double hp = decoding_probability_high_power(p, p.fading_model()).value;
        CHECK(hp >= decode(p) - 1e-3);
        SystemParams loud = p;
        loud.p_linear = 1e6;
        CHECK(std::abs(decode(loud) - hp) <= 0.01);
    }
    double prev = 2.0;
    for (double lp : {0.01, 0.1, 1.0}) {
        SystemParams p = with(0.1, 1, 12000.0, 1.0);
        p.lambda = lp;
        const double v = decoding_probability_high_power(p, p.fading_model()).value;
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("noise-limited probability") {
    SystemParams p = with(0.1, 8, 500.0, 1.0);
    for (double rho : {0.0, 0.5, 1.0}) {
        SystemParams loud = p;
        loud.rho = rho;
        loud.p_linear = 1e12;
        CHECK(noise_limited_probability(loud, loud.fading_model()).value >= 0.999);
    }
    // rho = 1: P(h > x) = exp(-sqrt x), so average exp(-d^alpha sqrt(tau c)) over the ring.
    for (double tau : {0.01, 0.1, 1.0, 10.0}) {
        p.tau_linear = tau;
        const double k = std::sqrt(tau * p.noise_level());
        numerics::QuadratureSpec s;
        s.rel_tol = 1e-13;
        s.abs_tol = 0.0;
        const double num =
            numerics::integrate_adaptive_real([&](double r) { return 2.0 * r * std::exp(-std::pow(r, p.alpha) * k); },
                                              p.zeta, p.xi, s)
                .value.real() /
            (p.xi * p.xi - p.zeta * p.zeta);
        CHECK(std::abs(noise_limited_probability(p, p.fading_model()).value - num) <= 1e-8);
    }
    p.tau_linear = 0.1;
    SystemParams quiet = p;
    quiet.lambda = 0.0;
    const double nl = noise_limited_probability(p, p.fading_model()).value;
    const auto mc = mcsim::estimate_decoding_probability(quiet, quiet.fading_model(), 200000, 3);
    CHECK(std::abs(nl - mc.estimate) <= std::max(0.005, 3.0 * mc.half_width()));
}

TEST_CASE("zero interferer density reduces to the noise-limited value") {
    for (double rho : {0.0, 0.5, 1.0}) {
        for (double tau : {0.1, 1.0, 10.0}) {
            SystemParams p = with(tau, 1, 12000.0, rho);
            p.lambda = 0.0;
            CHECK(std::abs(decode(p) - noise_limited_probability(p, p.fading_model()).value) <= 1e-4);
        }
    }
}

TEST_CASE("monotonicity") {
    auto non_increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > v[i - 1] + 1e-9) return false;
        return true;
    };
    std::vector<double> by_tau, by_delta, by_d, by_p;
    for (double tau_db : {-20.0, -10.0, 0.0, 5.0, 10.0}) by_tau.push_back(decode(with(std::pow(10.0, tau_db / 10.0), 8, 500.0, 1.0)));
    for (double delta : {250.0, 500.0, 1000.0, 4000.0, 12000.0}) by_delta.push_back(decode(with(0.1, 8, delta, 1.0)));
    for (int d : {1, 2, 4, 8, 16}) by_d.push_back(-decode(with(0.1, d, 500.0, 1.0)));
    for (double p_db : {0.0, 10.0, 20.0, 30.0, 40.0}) {
        SystemParams p = with(0.1, 8, 500.0, 0.5);
        p.p_linear = std::pow(10.0, p_db / 10.0);
        by_p.push_back(-decode(p));
    }
    CHECK(non_increasing(by_tau));
    CHECK(non_increasing(by_delta));
    CHECK(non_increasing(by_d));
    CHECK(non_increasing(by_p));
}

TEST_CASE("interference cdf") {
    SystemParams p = with(1.0, 8, 12000.0, 1.0);
    p.fading_free = true;
    const double lp = p.thinned_density();
    double prev = -1.0;
    for (double x : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
        const double v = interference_cdf(x, lp, 2.0, p).value;
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
    CHECK(interference_cdf(1e-3, 0.0, 2.0, p).value == 1.0);
    // below the smallest possible nonzero sum only the empty ring counts
    const double empty = std::exp(-lp * pi * (p.xi * p.xi - 4.0));
    CHECK(std::abs(interference_cdf(1e-12, lp, 2.0, p).value - empty) <= 1e-6);
}

TEST_CASE("sic stage probabilities") {
    // SIC needs fading-free channels
    SystemParams faded = with(1.0, 8, 12000.0, 1.0);
    faded.n_sic = 1;
    CHECK_THROWS(sic_decoding_probability(faded));
    CHECK_THROWS(cancel_probability(1, faded));

    SystemParams p = sic_params(1.0, 0);
    CHECK(sic_decoding_probability(p).value == doctest::Approx(decode(p)).epsilon(1e-12));

    CHECK(cancel_probability(1, sic_params(1e6, 1)).value <= 0.01);

    // sparse, noiseless: the nearest interferer, when inside the ring, is always decoded
    SystemParams sparse = sic_params(1.0, 1);
    sparse.lambda = 1e-3;
    sparse.sigma2_linear = 1e-15;
    const double lp = sparse.thinned_density();
    const double inside = 1.0 - std::exp(-lp * pi * (sparse.xi * sparse.xi - sparse.zeta * sparse.zeta));
    CHECK(cancel_probability(1, sparse).value / inside >= 0.999);

    SystemParams faint = sic_params(1.0, 1);
    faint.lambda = 1e-8;
    for (int n : {1, 2}) {
        CHECK(std::abs(decode_after_cancel(n, faint).value -
                       noise_limited_probability(faint, channel::FadingModel::none()).value) <= 1e-6);
    }

    double prev = 0.0;
    for (int n : {1, 2, 3, 4}) {
        const double v = decode_after_cancel(n, sic_params(1.0, n)).value;
        CHECK(v >= prev - 1e-3);
        prev = v;
    }
}

TEST_CASE("sic stages against simulation") {
    const SystemParams p = sic_params(1.0, 1);
    const SicOracle o = sic_oracle(p, 1, 100000);
    CHECK(std::abs(cancel_probability(1, p).value - o.cancel) <= 0.02);
    CHECK(std::abs(decode_after_cancel(1, p).value - o.decode_after) <= 0.03);
}

TEST_CASE("sic composition") {
    for (double tau : {0.3, 1.0, 10.0}) {
        const SystemParams p0 = sic_params(tau, 0);
        const SystemParams p1 = sic_params(tau, 1);
        const SystemParams p2 = sic_params(tau, 2);
        const double d0 = sic_decoding_probability(p0).value;
        const double d1 = sic_decoding_probability(p1).value;
        const double d2 = sic_decoding_probability(p2).value;
        CHECK(d1 >= d0);
        CHECK(d2 >= d1);
    }
    for (double tau : {1.0, 10.0}) {
        const SystemParams p = sic_params(tau, 1);
        const auto mc = mcsim::estimate_sic(p, 100000, 1);
        CHECK(std::abs(sic_decoding_probability(p).value - mc.estimate) <= 0.03);
    }
}

TEST_CASE("printed sic form is available for comparison") {
    AnalysisOptions printed;
    printed.sic_form = SicForm::Printed;
    const auto r = sic_decoding_probability(sic_params(1.0, 1), printed);
    CHECK(std::isfinite(r.raw));
}
