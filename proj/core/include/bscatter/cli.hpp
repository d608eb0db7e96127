#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bscatter/analysis.hpp"
#include "bscatter/params.hpp"

namespace bscatter::cli {

/// Parameters a sweep may vary. dB-valued names are converted on application.
inline const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> names{"tau_db", "p_db", "delta_hz", "d_sectors", "rho", "lambda", "n_sic"};
    return names;
}

struct SweepSpec {
    std::string parameter = "tau_db";
    std::vector<double> values;
    bool analytic = true;
    bool mc = false;
    long trials = 100000;
    std::uint64_t seed = 1;
};

struct ResolvedConfig {
    SystemParams params;
    SweepSpec sweep;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Parses flat `key = value` text (`#` starts a comment), then applies
/// `key=value` overrides in order. Unknown keys and out-of-range values throw
/// ConfigError naming the key.
ResolvedConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
ResolvedConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Sets a sweepable parameter (see sweepable_parameters) on `params`.
/// `params` is left untouched when the value is rejected.
void apply_parameter(SystemParams& params, const std::string& name, double value);

/// Every SystemParams field at full precision, plus dB forms and derived
/// quantities as comments. Parsing the result gives back the same params.
std::string echo_config(const SystemParams& params);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

enum class Quantity {
    Decoding,      ///< decoding probability; SIC when n_sic > 0
    HighPower,     ///< noise dropped (sigma^2 = 0 in the simulation)
    NoiseLimited,  ///< interference dropped (lambda = 0 in the simulation)
};

/// One curve: base parameters plus what is computed for them.
struct Variant {
    std::string label;  ///< empty for a plain sweep
    SystemParams params;
    Quantity quantity = Quantity::Decoding;
};

struct RunOptions {
    bool analytic = true;
    bool mc = false;
    long trials = 100000;
    std::uint64_t seed = 1;
    bool timing = true;  ///< fill wall_ms; off gives byte-reproducible output
    unsigned threads = 0;
    analysis::AnalysisOptions analysis;
};

struct RunRecord {
    std::string param;
    double value = 0.0;
    std::string engine;  ///< "analytic" or "mc", with ":label" for variants
    double probability = 0.0;
    std::optional<double> ci_low, ci_high, quad_error, wall_ms;
    std::optional<long> trials;
    std::optional<std::uint64_t> seed;
    std::string error;  ///< non-empty when the engine failed
};

/// One record per (value, variant, engine) in that nesting order.
std::vector<RunRecord> run_grid(const std::string& param, const std::vector<double>& values,
                                const std::vector<Variant>& variants, const RunOptions& options);

std::vector<RunRecord> run_sweep(const ResolvedConfig& config, RunOptions options);

inline constexpr std::string_view kCsvHeader =
    "param,value,engine,probability,ci_low,ci_high,quad_error,trials,seed,wall_ms";

/// Header plus one line per record; failed records carry probability NaN and
/// a trailing note field.
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

struct Preset {
    std::string name;
    std::string title;
    std::string x_label;
    std::string param;
    std::vector<double> values;
    std::vector<Variant> variants;
};

/// fig1, fig2 or fig3. Throws ConfigError for other names.
Preset make_preset(const std::string& name);

/// Self-contained matplotlib script that reads `csv_name` (next to the script)
/// and draws analytic rows as lines and mc rows as markers.
std::string plot_script(const Preset& preset, const std::string& csv_name);

struct ValidationRow {
    std::string param;
    double value = 0.0;
    std::string label;
    double analytic = 0.0;
    double mc = 0.0;
    double half_width = 0.0;
    double tolerance = 0.0;
    bool gated = true;
    bool pass = true;
    std::string error;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    double max_abs_diff = 0.0;
    bool pass = true;
    /// Informational lines, e.g. the SIC result without the 1/D thinning.
    std::vector<std::string> notes;
};

struct ValidateOptions {
    long trials = 100000;
    std::uint64_t seed = 1;
    /// Also gate SIC rows below 0 dB, which are otherwise only reported.
    bool strict = false;
    unsigned threads = 0;
    analysis::AnalysisOptions analysis;
};

/// Runs both engines over the config's sweep (default: tau_db in
/// {-20, -10, 0, 10}) and checks |analytic - mc| <= max(0.015, 3 CI half-widths);
/// SIC rows use 0.03 and are gated only for tau >= 0 dB.
ValidationReport validate(const ResolvedConfig& config, const ValidateOptions& options);

std::string format_report(const ValidationReport& report);

}  // namespace bscatter::cli
