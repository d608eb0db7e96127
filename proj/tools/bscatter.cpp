#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bscatter/cli.hpp"
#include "bscatter/error.hpp"

namespace fs = std::filesystem;
using namespace bscatter;

namespace {

bool any_failed(const std::vector<cli::RunRecord>& records) {
    for (const auto& r : records) {
        if (!r.error.empty()) {
            std::cerr << "error: " << r.param << " = " << cli::format_number(r.value) << " (" << r.engine
                      << "): " << r.error << '\n';
            return true;
        }
    }
    return false;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

int run_sweep(const std::string& config, const std::vector<std::string>& sets, const fs::path& out, bool timing,
              unsigned threads) {
    const cli::ResolvedConfig cfg = cli::load_config(config, sets);
    cli::RunOptions opt;
    opt.timing = timing;
    opt.threads = threads;
    const auto records = cli::run_sweep(cfg, opt);
    std::ostringstream csv;
    cli::write_csv(csv, records);
    write_file(out, csv.str());
    write_file(out.string() + ".config", cli::echo_config(cfg.params));
    std::cerr << "wrote " << records.size() << " rows to " << out.string() << '\n';
    return any_failed(records) ? 1 : 0;
}

int run_preset(const std::string& name, const fs::path& dir, long trials, std::uint64_t seed,
               const std::string& engines, bool timing, unsigned threads) {
    const cli::Preset preset = cli::make_preset(name);
    cli::RunOptions opt;
    opt.analytic = engines != "mc";
    opt.mc = engines != "analytic";
    opt.trials = trials;
    opt.seed = seed;
    opt.timing = timing;
    opt.threads = threads;
    fs::create_directories(dir / (name + "-configs"));
    for (const auto& v : preset.variants) {
        write_file(dir / (name + "-configs") / (v.label + ".cfg"), cli::echo_config(v.params));
    }
    const auto records = cli::run_grid(preset.param, preset.values, preset.variants, opt);
    std::ostringstream csv;
    cli::write_csv(csv, records);
    write_file(dir / (name + ".csv"), csv.str());
    write_file(dir / (name + ".py"), cli::plot_script(preset, name + ".csv"));
    std::cerr << "wrote " << records.size() << " rows to " << (dir / (name + ".csv")).string() << '\n';
    return any_failed(records) ? 1 : 0;
}

int run_validate(const std::string& config, const std::vector<std::string>& sets, bool strict, long trials,
                 std::uint64_t seed, bool canary, const std::string& out, unsigned threads) {
    const cli::ResolvedConfig cfg = cli::load_config(config, sets);
    cli::ValidateOptions opt;
    opt.strict = strict;
    opt.trials = trials;
    opt.seed = seed;
    opt.threads = threads;
    opt.analysis.branch_canary = canary;
    const auto report = cli::validate(cfg, opt);
    const std::string text = cli::format_report(report);
    std::cout << text;
    if (!out.empty()) write_file(out, text);
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoding probability of backscatter sensor networks: analysis and simulation"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: BSCATTER_THREADS or all cores)");

    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and write a CSV");
    std::string sweep_config;
    std::vector<std::string> sweep_sets;
    std::string sweep_out;
    bool no_timing = false;
    sweep->add_option("--config", sweep_config, "key = value config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--set", sweep_sets, "Override a key (key=value); repeatable");
    sweep->add_option("--out", sweep_out, "Output CSV")->required();
    sweep->add_flag("--no-timing", no_timing, "Leave wall_ms empty");

    auto* preset = app.add_subcommand("preset", "Reproduce a figure: CSV plus plot script");
    std::string preset_name;
    std::string preset_dir;
    long preset_trials = 100000;
    std::uint64_t preset_seed = 1;
    std::string preset_engines = "both";
    bool preset_timing = false;
    preset->add_option("figure", preset_name, "fig1, fig2 or fig3")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
    preset->add_option("--out-dir", preset_dir, "Output directory")->required();
    preset->add_option("--trials", preset_trials, "Monte Carlo trials per point")->check(CLI::Range(100L, 1000000000L));
    preset->add_option("--seed", preset_seed, "Monte Carlo seed");
    preset->add_option("--engines", preset_engines, "analytic, mc or both")
        ->check(CLI::IsMember({"analytic", "mc", "both"}));
    preset->add_flag("--timing", preset_timing, "Fill wall_ms (output is then not byte-reproducible)");

    auto* check = app.add_subcommand("validate", "Compare the analytic and Monte Carlo engines");
    std::string check_config;
    std::vector<std::string> check_sets;
    bool strict = false;
    bool canary = false;
    long check_trials = 100000;
    std::uint64_t check_seed = 1;
    std::string check_out;
    check->add_option("--config", check_config, "key = value config file")->required()->check(CLI::ExistingFile);
    check->add_option("--set", check_sets, "Override a key (key=value); repeatable");
    check->add_flag("--strict", strict, "Also gate SIC rows below 0 dB");
    check->add_option("--trials", check_trials, "Monte Carlo trials per point")->check(CLI::Range(100L, 1000000000L));
    check->add_option("--seed", check_seed, "Monte Carlo seed");
    check->add_option("--out", check_out, "Also write the report here");
    check->add_flag("--branch-canary", canary, "Evaluate (it)^(1/alpha) on the wrong branch; must fail");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) return run_sweep(sweep_config, sweep_sets, sweep_out, !no_timing, threads);
        if (*preset) {
            return run_preset(preset_name, preset_dir, preset_trials, preset_seed, preset_engines, preset_timing,
                              threads);
        }
        if (*check) {
            return run_validate(check_config, check_sets, strict, check_trials, check_seed, canary, check_out,
                                threads);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
