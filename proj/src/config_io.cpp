#include "lambdaprop/config_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lambdaprop {

namespace {

constexpr std::array<std::string_view, 13> kKeys = {
    "omega_p_max", "omega_s_max", "t_p",    "t_s",   "tau_delay", "delta", "gamma",
    "phase_p",     "phase_s",     "length", "n_tau", "n_eta",     "tau_window"};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::invalid_config, msg); }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    std::string buf(text);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v))
        invalid("bad numeric value '" + buf + "' for key '" + std::string(key) + "'");
    return v;
}

int parse_int(std::string_view key, std::string_view text) {
    text = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        invalid("bad integer value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    return v;
}

TauWindow parse_window(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '[') text.remove_prefix(1);
    if (!text.empty() && text.back() == ']') text.remove_suffix(1);
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) invalid("tau_window must be written as [min, max]");
    return {parse_double("tau_window", text.substr(0, comma)), parse_double("tau_window", text.substr(comma + 1))};
}

}  // namespace

std::span<const std::string_view> config_keys() { return kKeys; }

bool is_config_key(std::string_view key) {
    for (auto k : config_keys())
        if (k == key) return true;
    return false;
}

void apply_config_value(SimulationConfig& c, std::string_view key, std::string_view value) {
    if (key == "omega_p_max") c.omega_p_max = parse_double(key, value);
    else if (key == "omega_s_max") c.omega_s_max = parse_double(key, value);
    else if (key == "t_p") c.t_p = parse_double(key, value);
    else if (key == "t_s") c.t_s = parse_double(key, value);
    else if (key == "tau_delay") c.tau_delay = parse_double(key, value);
    else if (key == "delta") c.delta = parse_double(key, value);
    else if (key == "gamma") c.gamma = parse_double(key, value);
    else if (key == "phase_p") c.phase_p = parse_double(key, value);
    else if (key == "phase_s") c.phase_s = parse_double(key, value);
    else if (key == "length") c.length = parse_double(key, value);
    else if (key == "n_tau") c.n_tau = parse_int(key, value);
    else if (key == "n_eta") {
        const auto v = trim(value);
        if (v == "auto") c.n_eta.reset();
        else c.n_eta = parse_int(key, v);
    } else if (key == "tau_window") c.tau_window = parse_window(value);
    else invalid("unknown config key '" + std::string(key) + "'");
}

SimulationConfig default_config() {
    SimulationConfig config;
    if (const char* env = std::getenv(kDefaultGridEnv); env != nullptr && *env != '\0') {
        const std::string_view text(env);
        const auto comma = text.find(',');
        config.n_tau = parse_int(kDefaultGridEnv, text.substr(0, comma));
        if (comma != std::string_view::npos)
            config.eta_steps_per_unit = parse_int(kDefaultGridEnv, text.substr(comma + 1));
    }
    return config;
}

SimulationConfig parse_config(std::istream& in, std::string_view source) {
    SimulationConfig config = default_config();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        auto where = [&] { return std::string(source) + ":" + std::to_string(lineno) + ": "; };
        if (eq == std::string_view::npos) invalid(where() + "expected 'key = value'");
        const auto key = trim(view.substr(0, eq));
        if (!is_config_key(key)) invalid(where() + "unknown config key '" + std::string(key) + "'");
        try {
            apply_config_value(config, key, view.substr(eq + 1));
        } catch (const Error& e) {
            invalid(where() + e.what());
        }
    }
    config.validate();
    return config;
}

SimulationConfig parse_config_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open config file '" + path.string() + "'");
    return parse_config(in, path.string());
}

std::string format_config(const SimulationConfig& c) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "omega_p_max = " << c.omega_p_max << '\n'
        << "omega_s_max = " << c.omega_s_max << '\n'
        << "t_p = " << c.t_p << '\n'
        << "t_s = " << c.t_s << '\n'
        << "tau_delay = " << c.tau_delay << '\n'
        << "delta = " << c.delta << '\n'
        << "gamma = " << c.gamma << '\n'
        << "phase_p = " << c.phase_p << '\n'
        << "phase_s = " << c.phase_s << '\n'
        << "length = " << c.length << '\n'
        << "n_tau = " << c.n_tau << '\n'
        << "n_eta = " << c.eta_steps() << '\n'
        << "tau_window = [" << c.tau_window.min << ", " << c.tau_window.max << "]\n";
    return out.str();
}

}  // namespace lambdaprop
