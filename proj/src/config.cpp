#include "padfree/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace padfree {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for '" + key + "': " + value);
    }
    if (used != value.size() || !std::isfinite(out)) throw ConfigError("invalid number for '" + key + "': " + value);
    return out;
}

// Accepts plain numbers and fractions such as 1/80.
double parse_length(const std::string& key, const std::string& value) {
    const auto slash = value.find('/');
    if (slash == std::string::npos) return parse_double(key, value);
    const double num = parse_double(key, trim(value.substr(0, slash)));
    const double den = parse_double(key, trim(value.substr(slash + 1)));
    if (den == 0.0) throw ConfigError("zero denominator for '" + key + "'");
    return num / den;
}

long parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long out = 0;
    try {
        out = std::stol(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for '" + key + "': " + value);
    }
    if (used != value.size()) throw ConfigError("invalid integer for '" + key + "': " + value);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "off" || value == "no" || value == "0") return false;
    throw ConfigError("invalid boolean for '" + key + "': " + value);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_length(key, item));
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) out += ',';
        out += format_double(v[k]);
    }
    return out;
}

}  // namespace

CaseId parse_case_id(const std::string& name) {
    if (name == "converge") return CaseId::converge;
    if (name == "burgers-wave") return CaseId::burgers_wave;
    if (name == "burgers-periodic") return CaseId::burgers_periodic;
    if (name == "kh") return CaseId::kh;
    throw ConfigError("unknown case '" + name + "'");
}

std::string case_name(CaseId id) {
    switch (id) {
        case CaseId::converge: return "converge";
        case CaseId::burgers_wave: return "burgers-wave";
        case CaseId::burgers_periodic: return "burgers-periodic";
        case CaseId::kh: return "kh";
    }
    return "unknown";
}

AdaptivityConfig RunConfig::adaptivity() const {
    AdaptivityConfig a;
    a.eps_upper = eps_upper;
    a.eps_lower = eps_lower;
    a.p_min = p_min;
    a.p_max = p_max;
    a.adapt_interval = adapt_interval;
    switch (case_id) {
        case CaseId::converge: a.monitored_fields = {"phi"}; break;
        case CaseId::burgers_wave:
        case CaseId::burgers_periodic: a.monitored_fields = {"u", "v"}; break;
        case CaseId::kh: a.monitored_fields = {"u", "v", "Y"}; break;
    }
    return a;
}

KhParams RunConfig::kh_params() const { return KhParams{re, sc, ma, at, delta}; }

void RunConfig::validate() const {
    if (resolutions.empty()) throw ConfigError("at least one resolution is required");
    for (double s : resolutions) {
        if (!(s > 0.0)) throw ConfigError("resolution s must be positive");
    }
    for (std::size_t k = 1; k < resolutions.size(); ++k) {
        if (!(resolutions[k] < resolutions[k - 1])) throw ConfigError("resolutions must be strictly decreasing");
    }
    if (!(perturbation >= 0.0 && perturbation <= 0.5)) throw ConfigError("perturbation must lie in [0, 0.5]");
    auto valid_order = [](int p) { return p >= kMinOrder && p <= kMaxOrder && p % 2 == 0; };
    if (!valid_order(p_min) || !valid_order(p_max) || p_min > p_max) {
        throw ConfigError("p_min and p_max must be even orders in [4, 8] with p_min <= p_max");
    }
    if (uniform_p != 0 && !valid_order(uniform_p)) throw ConfigError("uniform_p must be 4, 6 or 8");
    if (uniform_p == 0 && (p_init < p_min || p_init > p_max || p_init % 2 != 0)) {
        throw ConfigError("p_init must be an even order in [p_min, p_max]");
    }
    if (adapting()) {
        if (!(eps_lower > 0.0 && eps_upper > eps_lower)) throw ConfigError("thresholds need eps_upper > eps_lower > 0");
        if (adapt_interval < 1) throw ConfigError("adapt_interval must be at least 1");
    }
    if (!(wavenumber > 0.0)) throw ConfigError("wavenumber must be positive");
    if (!(re > 0.0)) throw ConfigError("re must be positive");
    if (case_id == CaseId::kh) {
        try {
            kh_params().validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (case_id != CaseId::converge) {
        if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
        if (!(output_interval > 0.0)) throw ConfigError("output_interval must be positive");
        for (double t : snapshot_times) {
            if (t < 0.0 || t > t_end) throw ConfigError("snapshot times must lie in [0, t_end]");
        }
    }
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

void RunConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "test_function") {
        if (value == "sin") test_function = TestFunction::sinusoid;
        else if (value == "supergauss") test_function = TestFunction::supergaussian;
        else throw ConfigError("test_function must be sin or supergauss, got '" + value + "'");
    } else if (key == "wavenumber") {
        wavenumber = parse_double(key, value);
    } else if (key == "s") {
        resolutions = {parse_length(key, value)};
    } else if (key == "resolutions") {
        resolutions = parse_list(key, value);
    } else if (key == "perturbation") {
        perturbation = parse_double(key, value);
    } else if (key == "seed") {
        const long v = parse_int(key, value);
        if (v < 0) throw ConfigError("seed must be non-negative");
        seed = static_cast<std::uint64_t>(v);
    } else if (key == "p_init") {
        p_init = static_cast<int>(parse_int(key, value));
    } else if (key == "p_min") {
        p_min = static_cast<int>(parse_int(key, value));
    } else if (key == "p_max") {
        p_max = static_cast<int>(parse_int(key, value));
    } else if (key == "adaptive") {
        adaptive = parse_bool(key, value);
    } else if (key == "uniform_p") {
        uniform_p = static_cast<int>(parse_int(key, value));
    } else if (key == "eps_upper") {
        eps_upper = parse_double(key, value);
    } else if (key == "eps_lower") {
        eps_lower = parse_double(key, value);
    } else if (key == "adapt_interval") {
        adapt_interval = static_cast<int>(parse_int(key, value));
    } else if (key == "re") {
        re = parse_double(key, value);
    } else if (key == "sc") {
        sc = parse_double(key, value);
    } else if (key == "ma") {
        ma = parse_double(key, value);
    } else if (key == "at") {
        at = parse_double(key, value);
    } else if (key == "delta") {
        delta = parse_double(key, value);
    } else if (key == "pressure_gradient") {
        if (value == "as_printed") pressure = PressureGradient::as_printed;
        else if (value == "density_weighted") pressure = PressureGradient::density_weighted;
        else throw ConfigError("pressure_gradient must be as_printed or density_weighted");
    } else if (key == "t_end") {
        t_end = parse_double(key, value);
    } else if (key == "output_interval") {
        output_interval = parse_double(key, value);
    } else if (key == "snapshot_times") {
        snapshot_times = parse_list(key, value);
    } else if (key == "out_dir") {
        out_dir = value;
    } else if (key == "threads") {
        threads = static_cast<int>(parse_int(key, value));
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::to_key_values() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("case", case_name(case_id));
    if (case_id == CaseId::converge) {
        kv.emplace_back("test_function", test_function == TestFunction::sinusoid ? "sin" : "supergauss");
        kv.emplace_back("wavenumber", format_double(wavenumber));
    }
    kv.emplace_back("resolutions", format_list(resolutions));
    kv.emplace_back("perturbation", format_double(perturbation));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("p_init", std::to_string(p_init));
    kv.emplace_back("p_min", std::to_string(p_min));
    kv.emplace_back("p_max", std::to_string(p_max));
    kv.emplace_back("adaptive", adaptive ? "true" : "false");
    kv.emplace_back("uniform_p", std::to_string(uniform_p));
    kv.emplace_back("eps_upper", format_double(eps_upper));
    kv.emplace_back("eps_lower", format_double(eps_lower));
    kv.emplace_back("adapt_interval", std::to_string(adapt_interval));
    if (case_id != CaseId::converge) {
        kv.emplace_back("re", format_double(re));
        if (case_id == CaseId::kh) {
            kv.emplace_back("sc", format_double(sc));
            kv.emplace_back("ma", format_double(ma));
            kv.emplace_back("at", format_double(at));
            kv.emplace_back("delta", format_double(delta));
            kv.emplace_back("pressure_gradient",
                            pressure == PressureGradient::as_printed ? "as_printed" : "density_weighted");
        }
        kv.emplace_back("t_end", format_double(t_end));
        kv.emplace_back("output_interval", format_double(output_interval));
        kv.emplace_back("snapshot_times", format_list(snapshot_times));
    }
    kv.emplace_back("out_dir", out_dir);
    kv.emplace_back("threads", std::to_string(threads));
    return kv;
}

RunConfig defaults_for(CaseId id) {
    RunConfig c;
    c.case_id = id;
    switch (id) {
        case CaseId::converge:
            c.resolutions = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80, 1.0 / 160};
            c.perturbation = 0.5;
            c.p_init = 6;
            c.eps_upper = 1e-2;
            c.eps_lower = 1e-4;
            break;
        case CaseId::burgers_wave:
            c.resolutions = {1.0 / 160};
            c.perturbation = 0.2;
            c.p_init = 8;
            c.eps_upper = 1e-3;
            c.eps_lower = 1e-6;
            c.re = 500.0;
            c.t_end = 1.0;
            c.output_interval = 0.1;
            c.snapshot_times = {0.5, 1.0};
            break;
        case CaseId::burgers_periodic:
            c.resolutions = {1.0 / 80};
            c.perturbation = 0.2;
            c.p_init = 8;
            c.eps_upper = 1e-3;
            c.eps_lower = 1e-6;
            c.re = 100.0;
            c.t_end = 1.0;
            c.output_interval = 0.05;
            c.snapshot_times = {0.5, 1.0};
            break;
        case CaseId::kh:
            c.resolutions = {1.0 / 160};
            c.perturbation = 0.0;
            c.p_init = 8;
            c.eps_upper = 1e-1;
            c.eps_lower = 1e-4;
            c.re = 500.0;
            c.t_end = 2.0;
            c.output_interval = 0.1;
            c.snapshot_times = {1.0, 2.0};
            break;
    }
    return c;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header on line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            parse_case_id(section);  // rejects unknown sections
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value on line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty() || section == case_name(cfg.case_id)) {
            cfg.set(key, value);
        } else {
            RunConfig scratch = defaults_for(parse_case_id(section));
            scratch.set(key, value);  // still reject unknown keys in other sections
        }
    }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str());
}

}  // namespace padfree
