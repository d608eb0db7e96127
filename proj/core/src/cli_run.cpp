#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "bscatter/cli.hpp"
#include "bscatter/error.hpp"
#include "bscatter/mcsim.hpp"

namespace bscatter::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string engine_name(const char* engine, const std::string& label) {
    return label.empty() ? std::string(engine) : std::string(engine) + ":" + label;
}

void run_analytic(const Variant& v, const SystemParams& p, const RunOptions& opt, RunRecord& rec) {
    analysis::AnalyticResult r;
    switch (v.quantity) {
        case Quantity::Decoding:
            r = p.n_sic > 0 ? analysis::sic_decoding_probability(p, opt.analysis)
                            : analysis::decoding_probability(p, p.fading_model(), opt.analysis);
            break;
        case Quantity::HighPower:
            r = analysis::decoding_probability_high_power(p, p.fading_model(), opt.analysis);
            break;
        case Quantity::NoiseLimited:
            r = analysis::noise_limited_probability(p, p.fading_model());
            break;
    }
    rec.probability = r.value;
    rec.quad_error = r.quad_error;
}

void run_mc(const Variant& v, SystemParams p, const RunOptions& opt, RunRecord& rec) {
    const mcsim::McOptions mo{opt.threads};
    mcsim::McEstimate e;
    if (v.quantity == Quantity::HighPower) p.sigma2_linear = 0.0;
    if (v.quantity == Quantity::NoiseLimited) p.lambda = 0.0;
    if (v.quantity == Quantity::Decoding && p.n_sic > 0) {
        e = mcsim::estimate_sic(p, opt.trials, opt.seed, mo);
    } else {
        e = mcsim::estimate_decoding_probability(p, p.fading_model(), opt.trials, opt.seed, mo);
    }
    rec.probability = e.estimate;
    rec.ci_low = e.ci_low;
    rec.ci_high = e.ci_high;
    rec.trials = e.trials;
    rec.seed = e.seed;
}

struct Task {
    std::size_t value_index;
    std::size_t variant_index;
    bool analytic;
};

void run_task(const Task& task, const std::string& param, const std::vector<double>& values,
              const std::vector<Variant>& variants, const RunOptions& opt, RunRecord& rec) {
    const Variant& v = variants[task.variant_index];
    const auto start = std::chrono::steady_clock::now();
    try {
        SystemParams p = v.params;
        apply_parameter(p, param, values[task.value_index]);
        if (task.analytic) {
            run_analytic(v, p, opt, rec);
        } else {
            run_mc(v, p, opt, rec);
        }
    } catch (const std::exception& e) {
        rec.probability = kNaN;
        rec.ci_low.reset();
        rec.ci_high.reset();
        rec.quad_error.reset();
        rec.error = e.what();
    }
    if (opt.timing) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

template <class T>
std::string optional_field(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_floating_point_v<T>) {
        return format_number(*v);
    } else {
        return std::to_string(*v);
    }
}

std::vector<double> range(double from, double to, double step) {
    std::vector<double> out;
    const int n = static_cast<int>(std::lround((to - from) / step));
    for (int i = 0; i <= n; ++i) out.push_back(from + i * step);
    return out;
}

Variant variant(std::string label, SystemParams p, Quantity q = Quantity::Decoding) {
    return {std::move(label), p, q};
}

}  // namespace

std::vector<RunRecord> run_grid(const std::string& param, const std::vector<double>& values,
                                const std::vector<Variant>& variants, const RunOptions& options) {
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = 0; j < variants.size(); ++j) {
            if (options.analytic) tasks.push_back({i, j, true});
            if (options.mc) tasks.push_back({i, j, false});
        }
    }
    std::vector<RunRecord> records(tasks.size());
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        records[k].param = param;
        records[k].value = values[tasks[k].value_index];
        records[k].engine = engine_name(tasks[k].analytic ? "analytic" : "mc", variants[tasks[k].variant_index].label);
    }

    // Analytic points are independent and single-threaded, so they share a
    // pool; each Monte Carlo point already uses every worker.
    std::vector<std::size_t> analytic, mc;
    for (std::size_t k = 0; k < tasks.size(); ++k) (tasks[k].analytic ? analytic : mc).push_back(k);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < analytic.size(); i = next++) {
            run_task(tasks[analytic[i]], param, values, variants, options, records[analytic[i]]);
        }
    };
    unsigned threads = options.threads ? options.threads : mcsim::default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, analytic.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }
    for (std::size_t k : mc) run_task(tasks[k], param, values, variants, options, records[k]);
    return records;
}

std::vector<RunRecord> run_sweep(const ResolvedConfig& config, RunOptions options) {
    const SweepSpec& s = config.sweep;
    if (s.values.empty()) throw ConfigError("sweep.values: needs at least one value");
    options.analytic = s.analytic;
    options.mc = s.mc;
    options.trials = s.trials;
    options.seed = s.seed;
    return run_grid(s.parameter, s.values, {variant("", config.params)}, options);
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kCsvHeader << '\n';
    for (const RunRecord& r : records) {
        out << csv_field(r.param) << ',' << format_number(r.value) << ',' << csv_field(r.engine) << ','
            << format_number(r.probability) << ',' << optional_field(r.ci_low) << ',' << optional_field(r.ci_high)
            << ',' << optional_field(r.quad_error) << ',' << optional_field(r.trials) << ','
            << optional_field(r.seed) << ',' << optional_field(r.wall_ms);
        if (!r.error.empty()) out << ',' << csv_field("error: " + r.error);
        out << '\n';
    }
}

Preset make_preset(const std::string& name) {
    Preset p;
    p.name = name;
    SystemParams base;
    if (name == "fig1") {
        p.title = "Decoding probability vs threshold; P = 20 dB, lambda = 1, rho = 1";
        p.x_label = "tau (dB)";
        p.param = "tau_db";
        p.values = range(-20.0, 10.0, 2.5);
        for (int d : {1, 8}) {
            for (double delta : {250.0, 500.0, 12000.0}) {
                SystemParams q = base;
                q.d_sectors = d;
                q.delta_hz = delta;
                const std::string fdma = delta == q.bw_hz ? "noFDMA" : "d" + format_number(delta);
                p.variants.push_back(variant("D" + std::to_string(d) + "-" + fdma, q));
            }
        }
        for (int d : {1, 8}) {
            SystemParams q = base;
            q.d_sectors = d;
            p.variants.push_back(variant("D" + std::to_string(d) + "-noI", q, Quantity::NoiseLimited));
        }
    } else if (name == "fig2") {
        p.title = "Decoding probability vs P; tau = -10 dB, D = 8, delta = 500 Hz";
        p.x_label = "P (dB)";
        p.param = "p_db";
        p.values = range(0.0, 60.0, 5.0);
        base.tau_linear = db_to_linear(-10.0);
        base.d_sectors = 8;
        base.delta_hz = 500.0;
        for (double lambda : {1.0, 0.5}) {
            for (double rho : {0.0, 0.5, 1.0}) {
                SystemParams q = base;
                q.lambda = lambda;
                q.rho = rho;
                const std::string label = "rho" + format_number(rho) + "-lambda" + format_number(lambda);
                p.variants.push_back(variant(label, q));
                p.variants.push_back(variant(label + "-bound", q, Quantity::HighPower));
            }
        }
    } else if (name == "fig3") {
        p.title = "Decoding probability vs threshold with SIC; no FDMA, D = 8";
        p.x_label = "tau (dB)";
        p.param = "tau_db";
        p.values = range(-20.0, 10.0, 2.5);
        base.d_sectors = 8;
        base.fading_free = true;
        base.n_sic = 0;
        p.variants.push_back(variant("noSIC", base));
        base.n_sic = 1;
        p.variants.push_back(variant("SIC-n1", base));
    } else {
        throw ConfigError("preset: unknown figure '" + name + "' (fig1, fig2, fig3)");
    }
    return p;
}

std::string plot_script(const Preset& preset, const std::string& csv_name) {
    std::ostringstream o;
    o << "#!/usr/bin/env python3\n"
      << "# Plots " << csv_name << ": analytic rows as lines, mc rows as markers.\n"
      << "import csv\nimport math\nimport os\n\n"
      << "import matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n"
      << "HERE = os.path.dirname(os.path.abspath(__file__))\n"
      << "curves = {}\n"
      << "with open(os.path.join(HERE, \"" << csv_name << "\"), newline=\"\") as f:\n"
      << "    for row in csv.DictReader(f):\n"
      << "        engine, _, label = row[\"engine\"].partition(\":\")\n"
      << "        y = float(row[\"probability\"])\n"
      << "        if math.isnan(y):\n"
      << "            continue\n"
      << "        curves.setdefault((label, engine), []).append((float(row[\"value\"]), y))\n\n"
      << "fig, ax = plt.subplots(figsize=(7, 5))\n"
      << "colors = {}\n"
      << "for (label, engine), pts in sorted(curves.items()):\n"
      << "    pts.sort()\n"
      << "    xs, ys = zip(*pts)\n"
      << "    color = colors.setdefault(label, \"C%d\" % (len(colors) % 10))\n"
      << "    if engine == \"analytic\":\n"
      << "        style = \"--\" if label.endswith((\"-noI\", \"-bound\")) else \"-\"\n"
      << "        ax.plot(xs, ys, style, color=color, label=label or \"analytic\")\n"
      << "    else:\n"
      << "        ax.plot(xs, ys, \"o\", color=color, markerfacecolor=\"none\")\n"
      << "ax.set_xlabel(\"" << preset.x_label << "\")\n"
      << "ax.set_ylabel(\"decoding probability\")\n"
      << "ax.set_title(\"" << preset.title << "\")\n"
      << "ax.set_ylim(0, 1)\n"
      << "ax.grid(True, alpha=0.3)\n"
      << "ax.legend(fontsize=8)\n"
      << "fig.tight_layout()\n"
      << "fig.savefig(os.path.join(HERE, \"" << preset.name << ".png\"), dpi=150)\n";
    return o.str();
}

ValidationReport validate(const ResolvedConfig& config, const ValidateOptions& options) {
    std::string param = config.sweep.parameter;
    std::vector<double> values = config.sweep.values;
    if (values.empty()) {
        param = "tau_db";
        values = {-20.0, -10.0, 0.0, 10.0};
    }
    RunOptions ro;
    ro.analytic = ro.mc = true;
    ro.trials = options.trials;
    ro.seed = options.seed;
    ro.timing = false;
    ro.threads = options.threads;
    ro.analysis = options.analysis;
    const std::vector<Variant> variants{variant("", config.params)};
    const auto records = run_grid(param, values, variants, ro);

    ValidationReport report;
    for (std::size_t i = 0; i + 1 < records.size(); i += 2) {
        const RunRecord& a = records[i];
        const RunRecord& m = records[i + 1];
        ValidationRow row;
        row.param = a.param;
        row.value = a.value;
        row.analytic = a.probability;
        row.mc = m.probability;
        row.error = !a.error.empty() ? a.error : m.error;
        SystemParams p = config.params;
        bool sic = p.n_sic > 0;
        double tau_db = linear_to_db(p.tau_linear);
        if (row.error.empty()) {
            apply_parameter(p, param, a.value);
            sic = p.n_sic > 0;
            tau_db = linear_to_db(p.tau_linear);
            row.half_width = 0.5 * (m.ci_high.value_or(0.0) - m.ci_low.value_or(0.0));
        }
        row.label = sic ? "sic" : "decoding";
        row.tolerance = std::max(sic ? 0.03 : 0.015, 3.0 * row.half_width);
        row.gated = !sic || tau_db >= 0.0 || options.strict;
        const double diff = std::abs(row.analytic - row.mc);
        row.pass = row.error.empty() && (!row.gated || diff <= row.tolerance);
        if (row.error.empty() && row.gated) report.max_abs_diff = std::max(report.max_abs_diff, diff);
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }

    if (config.params.n_sic > 0) {
        // Interferers seen during SIC without the 1/D thinning: scale lambda by D.
        SystemParams unthinned = config.params;
        unthinned.lambda *= unthinned.d_sectors;
        ro.analytic = false;
        const auto alt = run_grid(param, values, {variant("", unthinned)}, ro);
        for (std::size_t i = 0; i < alt.size(); ++i) {
            report.notes.push_back("sensitivity, unthinned interferers: " + param + " = " +
                                   format_number(alt[i].value) + " -> mc " + format_number(alt[i].probability) +
                                   " (thinned " + format_number(records[2 * i + 1].probability) + ")");
        }
    }
    return report;
}

std::string format_report(const ValidationReport& report) {
    std::ostringstream o;
    o << "param,value,quantity,analytic,mc,abs_diff,tolerance,gated,status\n";
    for (const ValidationRow& r : report.rows) {
        o << r.param << ',' << format_number(r.value) << ',' << r.label << ',' << format_number(r.analytic) << ','
          << format_number(r.mc) << ',' << format_number(std::abs(r.analytic - r.mc)) << ','
          << format_number(r.tolerance) << ',' << (r.gated ? "yes" : "no") << ','
          << (r.pass ? (r.gated ? "ok" : "reported") : "FAIL");
        if (!r.error.empty()) o << ',' << csv_field("error: " + r.error);
        o << '\n';
    }
    for (const std::string& n : report.notes) o << "# " << n << '\n';
    o << "# max gated |analytic - mc| = " << format_number(report.max_abs_diff) << '\n';
    o << "# result: " << (report.pass ? "PASS" : "FAIL") << '\n';
    return o.str();
}

}  // namespace bscatter::cli
