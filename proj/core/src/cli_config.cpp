#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bscatter/cli.hpp"
#include "bscatter/error.hpp"

namespace bscatter::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

long parse_integer(const std::string& key, const std::string& text) {
    long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": needs at least one value");
    return out;
}

int to_int(const std::string& key, double v) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer value");
    return static_cast<int>(v);
}

struct Builder {
    ResolvedConfig cfg;
    std::set<std::string> seen;

    void conflict(const std::string& key, const std::string& other) {
        if (seen.count(other)) throw ConfigError(key + ": conflicts with " + other + " (give one form)");
    }

    void set(const std::string& key, const std::string& value) {
        SystemParams& p = cfg.params;
        SweepSpec& s = cfg.sweep;
        using Setter = std::function<void()>;
        const std::map<std::string, Setter> setters{
            {"lambda", [&] { p.lambda = parse_real(key, value); }},
            {"p_linear", [&] { conflict(key, "p_db"); p.p_linear = parse_real(key, value); }},
            {"p_db", [&] { conflict(key, "p_linear"); p.p_linear = db_to_linear(parse_real(key, value)); }},
            {"sigma2_linear", [&] { conflict(key, "sigma2_db"); p.sigma2_linear = parse_real(key, value); }},
            {"sigma2_db", [&] { conflict(key, "sigma2_linear"); p.sigma2_linear = db_to_linear(parse_real(key, value)); }},
            {"tau_linear", [&] { conflict(key, "tau_db"); p.tau_linear = parse_real(key, value); }},
            {"tau_db", [&] { conflict(key, "tau_linear"); p.tau_linear = db_to_linear(parse_real(key, value)); }},
            {"zeta", [&] { p.zeta = parse_real(key, value); }},
            {"xi", [&] { p.xi = parse_real(key, value); }},
            {"alpha", [&] { p.alpha = parse_real(key, value); }},
            {"bw_hz", [&] { p.bw_hz = parse_real(key, value); }},
            {"delta_hz", [&] { p.delta_hz = parse_real(key, value); }},
            {"d_sectors", [&] { p.d_sectors = static_cast<int>(parse_integer(key, value)); }},
            {"epsilon", [&] { p.epsilon = parse_real(key, value); }},
            {"beta", [&] { p.beta = parse_real(key, value); }},
            {"rho", [&] { p.rho = parse_real(key, value); }},
            {"n_sic", [&] { p.n_sic = static_cast<int>(parse_integer(key, value)); }},
            {"fading_free", [&] { p.fading_free = parse_bool(key, value); }},
            {"mu_f", [&] { p.mu_f = parse_real(key, value); }},
            {"mu_b", [&] { p.mu_b = parse_real(key, value); }},
            {"sweep.param", [&] { s.parameter = value; }},
            {"sweep.values", [&] { s.values = parse_list(key, value); }},
            {"sweep.engines",
             [&] {
                 if (value == "analytic") {
                     s.analytic = true;
                     s.mc = false;
                 } else if (value == "mc") {
                     s.analytic = false;
                     s.mc = true;
                 } else if (value == "both") {
                     s.analytic = s.mc = true;
                 } else {
                     throw ConfigError(key + ": expected analytic, mc or both");
                 }
             }},
            {"sweep.trials", [&] { s.trials = parse_integer(key, value); }},
            {"sweep.seed",
             [&] {
                 const long v = parse_integer(key, value);
                 if (v < 0) throw ConfigError(key + ": must be >= 0");
                 s.seed = static_cast<std::uint64_t>(v);
             }},
        };
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(key + ": unknown key");
        it->second();
        seen.insert(key);
    }

    void line(std::string_view raw, const std::string& where) {
        const auto hash = raw.find('#');
        const std::string text = trim(raw.substr(0, hash));
        if (text.empty()) return;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + text + "'");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + ": expected key = value, got '" + text + "'");
        set(key, value);
    }
};

void check_sweep(const ResolvedConfig& cfg) {
    const SweepSpec& s = cfg.sweep;
    const auto& names = sweepable_parameters();
    if (std::find(names.begin(), names.end(), s.parameter) == names.end()) {
        throw ConfigError("sweep.param: '" + s.parameter + "' cannot be swept");
    }
    if (s.mc && s.trials < 100) throw ConfigError("sweep.trials: must be >= 100 when mc is selected");
    for (double v : s.values) {
        SystemParams probe = cfg.params;
        apply_parameter(probe, s.parameter, v);
    }
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void apply_parameter(SystemParams& target, const std::string& name, double value) {
    if (!std::isfinite(value)) throw ConfigError(name + ": value must be finite");
    SystemParams p = target;
    if (name == "tau_db") {
        p.tau_linear = db_to_linear(value);
    } else if (name == "p_db") {
        p.p_linear = db_to_linear(value);
    } else if (name == "delta_hz") {
        p.delta_hz = value;
    } else if (name == "d_sectors") {
        p.d_sectors = to_int(name, value);
    } else if (name == "rho") {
        p.rho = value;
    } else if (name == "lambda") {
        p.lambda = value;
    } else if (name == "n_sic") {
        p.n_sic = to_int(name, value);
    } else {
        throw ConfigError(name + ": cannot be swept");
    }
    p.validate();
    if (p.n_sic > 0 && !p.fading_free) throw ConfigError("n_sic: SIC analysis requires fading_free = true");
    target = p;
}

ResolvedConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    Builder b;
    std::size_t start = 0;
    int line_no = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto len = (end == std::string_view::npos ? text.size() : end) - start;
        b.line(text.substr(start, len), "line " + std::to_string(++line_no));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    // Overrides may restate a key from the file, including switching between
    // its dB and linear forms.
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq != std::string::npos) {
            const std::string key = trim(std::string_view(o).substr(0, eq));
            for (const char* pair : {"p_", "sigma2_", "tau_"}) {
                if (key.rfind(pair, 0) == 0) {
                    b.seen.erase(std::string(pair) + "db");
                    b.seen.erase(std::string(pair) + "linear");
                }
            }
        }
        b.line(o, "--set " + o);
    }
    b.cfg.params.validate();
    if (b.cfg.params.n_sic > 0 && !b.cfg.params.fading_free) {
        throw ConfigError("n_sic: SIC analysis requires fading_free = true");
    }
    check_sweep(b.cfg);
    return b.cfg;
}

ResolvedConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string echo_config(const SystemParams& p) {
    std::ostringstream o;
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    kv("lambda", format_number(p.lambda));
    kv("p_linear", format_number(p.p_linear));
    o << "# p_db = " << format_number(linear_to_db(p.p_linear)) << '\n';
    kv("sigma2_linear", format_number(p.sigma2_linear));
    o << "# sigma2_db = " << format_number(linear_to_db(p.sigma2_linear)) << '\n';
    kv("tau_linear", format_number(p.tau_linear));
    o << "# tau_db = " << format_number(linear_to_db(p.tau_linear)) << '\n';
    kv("zeta", format_number(p.zeta));
    kv("xi", format_number(p.xi));
    kv("alpha", format_number(p.alpha));
    kv("bw_hz", format_number(p.bw_hz));
    kv("delta_hz", format_number(p.delta_hz));
    kv("d_sectors", std::to_string(p.d_sectors));
    kv("epsilon", format_number(p.epsilon));
    kv("beta", format_number(p.beta));
    kv("rho", format_number(p.rho));
    kv("n_sic", std::to_string(p.n_sic));
    kv("fading_free", p.fading_free ? "true" : "false");
    kv("mu_f", format_number(p.mu_f));
    kv("mu_b", format_number(p.mu_b));
    o << "# gain = " << format_number(p.gain()) << '\n';
    o << "# collision_probability = " << format_number(p.collision_probability()) << '\n';
    o << "# thinned_density = " << format_number(p.thinned_density()) << '\n';
    return o.str();
}

}  // namespace bscatter::cli
