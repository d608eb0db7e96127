#pragma once

#include <complex>

#include "bscatter/channel.hpp"
#include "bscatter/params.hpp"

namespace bscatter::analysis {

using Complex = std::complex<double>;

/// How the fading average inside a characteristic function is evaluated.
enum class CfMode {
    /// Distance integral of the closed-form fading characteristic function.
    /// Cheap at every t; the default for fading channels.
    Transform,
    /// Fading average of the incomplete-gamma closed form of the distance integral.
    Gamma,
    /// Fading average of the distance integral done by plain quadrature.
    Direct,
};

/// Which normalization the SIC stage probabilities use.
enum class SicForm {
    /// Gil-Pelaez inversion of the stage CDFs, averaged explicitly over the
    /// distance to the cancelled interferer.
    Derived,
    /// Single-integral form with the 1/(2 alpha pi) prefactor and the
    /// (it/tau)^{1/alpha} factor as printed. Comparison only.
    Printed,
};

struct AnalysisOptions {
    CfMode cf_mode = CfMode::Transform;
    SicForm sic_form = SicForm::Derived;
    /// Handle the no-interferer atom of the interference law in closed form
    /// before inverting. Off gives the plain single Gil-Pelaez integral.
    bool split_atom = true;
    /// Regression canary: evaluates (it)^{1/alpha} on the conjugate branch.
    bool branch_canary = false;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    /// Outer inversion integral stops once |integrand| * t stays below this.
    double truncation_threshold = 1e-8;
};

struct AnalyticResult {
    double value = 0.0;         ///< clamped to [0, 1]
    double raw = 0.0;           ///< value before clamping
    double quad_error = 0.0;
    double truncated_at = 0.0;  ///< end of the outer inversion integral
    long evaluations = 0;
    int subdivisions = 0;

    double clamp_adjustment() const { return raw - value; }
};

/// Characteristic function E[exp(i t I)] of the interference from a PPP of
/// `density` on the ring [r_min, xi]. Fading-free channels use the
/// incomplete-gamma closed form unless mode is Direct.
Complex interference_cf(double t, double density, double r_min, const SystemParams& params,
                        const channel::FadingModel& fading, CfMode mode = CfMode::Transform);

/// The direct-link term: fading average of
/// h^{1/alpha} (Gamma[-1/alpha, i t h / (tau xi^{2 alpha})] - Gamma[-1/alpha, i t h / (tau zeta^{2 alpha})]).
Complex chi(double t, const SystemParams& params, const channel::FadingModel& fading,
            CfMode mode = CfMode::Transform);

/// E[exp(-i t h / (d^{2 alpha} tau))] for the typical link, d planar-uniform on the ring.
/// Equals (it)^{1/alpha} chi(t) / (alpha tau^{1/alpha} (xi^2 - zeta^2)).
Complex typical_link_cf(double t, const SystemParams& params, const channel::FadingModel& fading,
                        const AnalysisOptions& options = {});

/// P(SINR >= tau) for the typical sensor, by Gil-Pelaez inversion.
AnalyticResult decoding_probability(const SystemParams& params, const channel::FadingModel& fading,
                                    const AnalysisOptions& options = {});

/// Infinite-power limit of decoding_probability (noise term dropped).
AnalyticResult decoding_probability_high_power(const SystemParams& params,
                                               const channel::FadingModel& fading,
                                               const AnalysisOptions& options = {});

/// Interference-free decoding probability P(h > tau d^{2 alpha} sigma^2 / (beta G P)).
/// Closed form for rho = 1 and fading-free links; numerical otherwise.
AnalyticResult noise_limited_probability(const SystemParams& params,
                                         const channel::FadingModel& fading);

/// CDF at x of the fading-free interference from a PPP of `density` on
/// [r_min, xi], by Gil-Pelaez inversion with the empty-ring atom split off.
AnalyticResult interference_cdf(double x, double density, double r_min, const SystemParams& params,
                                const AnalysisOptions& options = {});

/// Probability that the n-th nearest interferer is decoded (fading-free),
/// with interference from the interferers beyond it.
AnalyticResult cancel_probability(int n, const SystemParams& params, const AnalysisOptions& options = {});

/// Probability that the typical sensor is decoded once the n nearest
/// interferers have been removed (fading-free).
AnalyticResult decode_after_cancel(int n, const SystemParams& params, const AnalysisOptions& options = {});

/// Decoding probability with up to params.n_sic cancellation attempts,
/// composed from the stage probabilities under the independence approximation.
/// This and the three functions above throw DomainError unless
/// params.fading_free is set.
AnalyticResult sic_decoding_probability(const SystemParams& params, const AnalysisOptions& options = {});

}  // namespace bscatter::analysis
