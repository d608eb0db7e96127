#include "bscatter/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

#include "bscatter/error.hpp"

namespace bscatter::mcsim {

namespace {

constexpr long kBlock = 2048;
constexpr double kZ95 = 1.959963984540054;

// Runs trial(k, acc) for every k, with one accumulator per fixed-size block of
// trials, and returns the accumulators in block order. Which thread ran a
// block does not affect its contents.
template <class Acc, class Fn>
std::vector<Acc> run_blocks(long trials, unsigned threads, const Acc& init, Fn trial) {
    if (trials < 1) throw DomainError("Monte Carlo: trials must be >= 1");
    const long blocks = (trials + kBlock - 1) / kBlock;
    std::vector<Acc> out(static_cast<std::size_t>(blocks), init);
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long b = next++; b < blocks; b = next++) {
            const long end = std::min(trials, (b + 1) * kBlock);
            for (long k = b * kBlock; k < end; ++k) trial(k, out[static_cast<std::size_t>(b)]);
        }
    };
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<long>(threads, blocks));
    if (threads <= 1) {
        worker();
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    pool.clear();
    return out;
}

McEstimate make_estimate(long successes, long trials, std::uint64_t seed) {
    McEstimate e;
    e.trials = trials;
    e.successes = successes;
    e.seed = seed;
    e.estimate = static_cast<double>(successes) / static_cast<double>(trials);
    wilson_interval(successes, trials, e.ci_low, e.ci_high);
    return e;
}

double ratio(double signal, double noise, double interference) {
    if (signal == 0.0) return 0.0;
    return signal / (noise + interference);
}

}  // namespace

void wilson_interval(long successes, long trials, double& low, double& high) {
    if (trials < 1 || successes < 0 || successes > trials) throw DomainError("wilson_interval: bad counts");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    low = std::clamp(std::min(centre - half, p), 0.0, 1.0);
    high = std::clamp(std::max(centre + half, p), 0.0, 1.0);
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("BSCATTER_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

NetworkRealization realize_network(const SystemParams& params, const channel::FadingModel& fading,
                                   RandomStream& rng) {
    const channel::Annulus ring = params.annulus();
    NetworkRealization net;
    net.typical_distance = channel::sample_typical_distance(ring, rng);
    net.typical_fading = channel::sample_fading(fading, rng);

    const double mean = params.thinned_density() * ring.area();
    const auto count = mean > 0.0 ? rng.poisson(mean) : 0;
    std::vector<std::pair<double, double>> nodes(count);
    for (auto& [d, h] : nodes) {
        d = channel::sample_typical_distance(ring, rng);
        h = channel::sample_fading(fading, rng);
    }
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    net.interferer_distances.reserve(count);
    net.interferer_fading.reserve(count);
    for (const auto& [d, h] : nodes) {
        net.interferer_distances.push_back(d);
        net.interferer_fading.push_back(h);
    }
    return net;
}

double sinr_typical(const NetworkRealization& net, const SystemParams& params) {
    const double k = params.beta * params.gain() * params.p_linear;
    const double two_alpha = 2.0 * params.alpha;
    double interference = 0.0;
    for (std::size_t j = 0; j < net.interferer_distances.size(); ++j) {
        interference += net.interferer_fading[j] * std::pow(net.interferer_distances[j], -two_alpha);
    }
    return ratio(k * net.typical_fading * std::pow(net.typical_distance, -two_alpha), params.sigma2_linear,
                 k * interference);
}

McEstimate estimate_decoding_probability(const SystemParams& params, const channel::FadingModel& fading,
                                         long trials, std::uint64_t seed, const McOptions& options) {
    params.validate();
    fading.validate();
    const auto blocks = run_blocks(trials, options.threads, 0L, [&](long k, long& hits) {
        RandomStream rng(seed, static_cast<std::uint64_t>(k));
        const NetworkRealization net = realize_network(params, fading, rng);
        if (sinr_typical(net, params) >= params.tau_linear) ++hits;
    });
    return make_estimate(std::accumulate(blocks.begin(), blocks.end(), 0L), trials, seed);
}

McEstimate estimate_sic(const SystemParams& params, long trials, std::uint64_t seed, const McOptions& options) {
    params.validate();
    if (!params.fading_free) throw DomainError("estimate_sic: needs fading_free = true");
    const int stages = params.n_sic;
    const auto none = channel::FadingModel::none();
    const double k = params.beta * params.gain() * params.p_linear;
    const double noise = params.sigma2_linear;
    const double tau = params.tau_linear;
    const double two_alpha = 2.0 * params.alpha;

    struct Acc {
        long hits = 0;
        std::vector<StageCounter> stages;
    };
    const Acc init{0, std::vector<StageCounter>(static_cast<std::size_t>(stages))};
    const auto blocks = run_blocks(trials, options.threads, init, [&](long trial, Acc& acc) {
        RandomStream rng(seed, static_cast<std::uint64_t>(trial));
        const NetworkRealization net = realize_network(params, none, rng);
        const auto& d = net.interferer_distances;
        const std::size_t m = d.size();
        // tail[j] = received power of interferers j, j+1, ... (farthest first)
        std::vector<double> tail(m + 1, 0.0);
        for (std::size_t j = m; j-- > 0;) tail[j] = tail[j + 1] + std::pow(d[j], -two_alpha);
        const double own = k * std::pow(net.typical_distance, -two_alpha);

        if (ratio(own, noise, k * tail[0]) >= tau) {
            ++acc.hits;
            return;
        }
        for (int i = 1; i <= stages; ++i) {
            StageCounter& c = acc.stages[static_cast<std::size_t>(i - 1)];
            const std::size_t target = static_cast<std::size_t>(i - 1);
            if (target >= m) {
                ++c.no_interferer;
                return;
            }
            ++c.attempts;
            if (ratio(k * std::pow(d[target], -two_alpha), noise, k * tail[target + 1]) < tau) {
                ++c.cancel_failures;
                return;
            }
            ++c.cancel_successes;
            if (ratio(own, noise, k * tail[target + 1]) >= tau) {
                ++c.decode_successes;
                ++acc.hits;
                return;
            }
            ++c.decode_failures;
        }
    });

    long hits = 0;
    std::vector<StageCounter> counters(static_cast<std::size_t>(stages));
    for (const Acc& b : blocks) {
        hits += b.hits;
        for (std::size_t i = 0; i < counters.size(); ++i) {
            counters[i].attempts += b.stages[i].attempts;
            counters[i].cancel_successes += b.stages[i].cancel_successes;
            counters[i].cancel_failures += b.stages[i].cancel_failures;
            counters[i].no_interferer += b.stages[i].no_interferer;
            counters[i].decode_successes += b.stages[i].decode_successes;
            counters[i].decode_failures += b.stages[i].decode_failures;
        }
    }
    McEstimate e = make_estimate(hits, trials, seed);
    e.stage_counters = std::move(counters);
    return e;
}

std::vector<CfSample> empirical_cf(const SystemParams& params, const channel::FadingModel& fading,
                                   const std::vector<double>& t_grid, long trials, std::uint64_t seed,
                                   const McOptions& options) {
    params.validate();
    fading.validate();
    if (t_grid.empty()) throw DomainError("empirical_cf: empty t grid");
    for (double t : t_grid) {
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("empirical_cf: t must be positive");
    }
    const std::size_t nt = t_grid.size();
    const double two_alpha = 2.0 * params.alpha;
    // per t: sum cos, sum sin, sum cos^2, sum sin^2
    const std::vector<double> init(4 * nt, 0.0);
    const auto blocks = run_blocks(trials, options.threads, init, [&](long k, std::vector<double>& acc) {
        RandomStream rng(seed, static_cast<std::uint64_t>(k));
        const NetworkRealization net = realize_network(params, fading, rng);
        double interference = 0.0;
        for (std::size_t j = 0; j < net.interferer_distances.size(); ++j) {
            interference += net.interferer_fading[j] * std::pow(net.interferer_distances[j], -two_alpha);
        }
        for (std::size_t i = 0; i < nt; ++i) {
            const double c = std::cos(t_grid[i] * interference);
            const double s = std::sin(t_grid[i] * interference);
            acc[4 * i] += c;
            acc[4 * i + 1] += s;
            acc[4 * i + 2] += c * c;
            acc[4 * i + 3] += s * s;
        }
    });
    std::vector<double> sums(4 * nt, 0.0);
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += b[i];
    }
    const double n = static_cast<double>(trials);
    std::vector<CfSample> out(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const double mc = sums[4 * i] / n;
        const double ms = sums[4 * i + 1] / n;
        const double vc = std::max(0.0, sums[4 * i + 2] / n - mc * mc);
        const double vs = std::max(0.0, sums[4 * i + 3] / n - ms * ms);
        out[i].value = {mc, ms};
        out[i].se_real = trials > 1 ? std::sqrt(vc / (n - 1.0)) : 0.0;
        out[i].se_imag = trials > 1 ? std::sqrt(vs / (n - 1.0)) : 0.0;
    }
    return out;
}

}  // namespace bscatter::mcsim
