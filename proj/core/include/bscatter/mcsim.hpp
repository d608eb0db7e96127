#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "bscatter/channel.hpp"
#include "bscatter/params.hpp"
#include "bscatter/random.hpp"

namespace bscatter::mcsim {

/// One draw of the network seen by the reader.
struct NetworkRealization {
    double typical_distance = 0.0;
    double typical_fading = 1.0;
    std::vector<double> interferer_distances;  ///< non-decreasing
    std::vector<double> interferer_fading;     ///< parallel to interferer_distances
};

/// Outcome counts for one SIC stage (stage i cancels the i-th nearest interferer).
struct StageCounter {
    long attempts = 0;          ///< cancellation attempts
    long cancel_successes = 0;
    long cancel_failures = 0;
    long no_interferer = 0;     ///< typical still failing but nothing left to cancel
    long decode_successes = 0;  ///< typical decoded right after this cancellation
    long decode_failures = 0;
};

struct McEstimate {
    long trials = 0;
    long successes = 0;
    double estimate = 0.0;
    double ci_low = 0.0;   ///< 95% Wilson interval
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    std::vector<StageCounter> stage_counters;  ///< SIC only; index 0 is stage 1

    double half_width() const { return 0.5 * (ci_high - ci_low); }
};

struct CfSample {
    std::complex<double> value;
    double se_real = 0.0;
    double se_imag = 0.0;
};

struct McOptions {
    /// Worker threads; 0 reads BSCATTER_THREADS, then falls back to all cores.
    unsigned threads = 0;
};

/// Wilson score interval for `successes` out of `trials` at z = 1.96.
void wilson_interval(long successes, long trials, double& low, double& high);

/// Worker count from BSCATTER_THREADS or the hardware.
unsigned default_thread_count();

/// Typical sensor planar-uniform on the ring; Poisson(lambda' area) interferers,
/// planar-uniform, sorted by distance; fading drawn for every node.
NetworkRealization realize_network(const SystemParams& params, const channel::FadingModel& fading,
                                   RandomStream& rng);

/// beta G P h_o d_o^{-2 alpha} / (sigma^2 + beta G P sum_j h_j d_j^{-2 alpha}).
double sinr_typical(const NetworkRealization& net, const SystemParams& params);

/// Fraction of trials with SINR >= tau. Trial k draws from stream k of `seed`.
McEstimate estimate_decoding_probability(const SystemParams& params, const channel::FadingModel& fading,
                                         long trials, std::uint64_t seed, const McOptions& options = {});

/// Decode-cancel loop with up to params.n_sic cancellations. Throws
/// DomainError unless params.fading_free is set.
/// An interferer is decoded against the farther, not yet cancelled interferers
/// only; the typical sensor does not interfere with it.
McEstimate estimate_sic(const SystemParams& params, long trials, std::uint64_t seed, const McOptions& options = {});

/// Sample mean of exp(i t I), I = sum_j h_j d_j^{-2 alpha}, with standard errors
/// of the real and imaginary parts.
std::vector<CfSample> empirical_cf(const SystemParams& params, const channel::FadingModel& fading,
                                   const std::vector<double>& t_grid, long trials, std::uint64_t seed,
                                   const McOptions& options = {});

}  // namespace bscatter::mcsim
