#include "heterocyl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "heterocyl/io.hpp"

namespace heterocyl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double as_double(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const std::invalid_argument&) {
        throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
    }
}

int as_int(const std::string& key, const std::string& value) {
    try {
        const long long v = parse_integer(value);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            throw std::invalid_argument("range");
        }
        return static_cast<int>(v);
    } catch (const std::invalid_argument&) {
        throw ConfigError("config: " + key + " expects an integer, got '" + value + "'");
    }
}

std::vector<double> as_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(as_double(key, trim(item)));
    if (out.empty()) throw ConfigError("config: " + key + " is empty");
    return out;
}

void require_positive(const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("config: ") + key + " must be positive and finite");
    }
}

}  // namespace

void validate(const RunConfig& c) {
    if (c.nx < 4) throw ConfigError("config: nx must be at least 4");
    if (c.nz_per_unit < 0) throw ConfigError("config: nz_per_unit must be >= 0");
    if (c.lambda_nx < 4) throw ConfigError("config: lambda_nx must be at least 4");
    require_positive("grad_tol", c.grad_tol);
    require_positive("eps_tail", c.eps_tail);
    require_positive("eps_H", c.eps_H);
    require_positive("lambda_tol", c.lambda_tol);
    require_positive("bisect_tol", c.bisect_tol);
    require_positive("window_half_height", c.window_half_height);
    require_positive("central_half_height", c.central_half_height);
    require_positive("momentum_order_min", c.momentum_order_min);
    if (c.n_schedule.empty()) throw ConfigError("config: n_schedule is empty");
    for (std::size_t k = 0; k < c.n_schedule.size(); ++k) {
        require_positive("n_schedule", c.n_schedule[k]);
        if (k > 0 && !(c.n_schedule[k] > c.n_schedule[k - 1])) {
            throw ConfigError("config: n_schedule must be strictly increasing");
        }
    }
    if (c.lambda_override) require_positive("lambda_override", *c.lambda_override);
}

std::string serialize(const RunConfig& c) {
    std::ostringstream out;
    out << "nx = " << c.nx << '\n';
    out << "nz_per_unit = " << c.nz_per_unit << '\n';
    out << "n_schedule = ";
    for (std::size_t k = 0; k < c.n_schedule.size(); ++k) {
        out << (k ? "," : "") << format_double(c.n_schedule[k]);
    }
    out << '\n';
    out << "grad_tol = " << format_double(c.grad_tol) << '\n';
    out << "eps_tail = " << format_double(c.eps_tail) << '\n';
    out << "eps_H = " << format_double(c.eps_H) << '\n';
    out << "lambda_tol = " << format_double(c.lambda_tol) << '\n';
    out << "lambda_override = "
        << (c.lambda_override ? format_double(*c.lambda_override) : std::string("none")) << '\n';
    out << "output_dir = " << c.output_dir << '\n';
    out << "seed = " << c.seed << '\n';
    out << "lambda_nx = " << c.lambda_nx << '\n';
    out << "bisect_tol = " << format_double(c.bisect_tol) << '\n';
    out << "window_half_height = " << format_double(c.window_half_height) << '\n';
    out << "central_half_height = " << format_double(c.central_half_height) << '\n';
    out << "momentum_order_min = " << format_double(c.momentum_order_min) << '\n';
    return out.str();
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "nx") c.nx = as_int(key, value);
    else if (key == "nz_per_unit") c.nz_per_unit = as_int(key, value);
    else if (key == "n_schedule") c.n_schedule = as_list(key, value);
    else if (key == "grad_tol") c.grad_tol = as_double(key, value);
    else if (key == "eps_tail") c.eps_tail = as_double(key, value);
    else if (key == "eps_H") c.eps_H = as_double(key, value);
    else if (key == "lambda_tol") c.lambda_tol = as_double(key, value);
    else if (key == "lambda_override") {
        if (value.empty() || value == "none") c.lambda_override.reset();
        else c.lambda_override = as_double(key, value);
    } else if (key == "output_dir") c.output_dir = value;
    else if (key == "seed") {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
            throw ConfigError("config: seed expects a non-negative integer, got '" + value + "'");
        }
        c.seed = v;
    } else if (key == "lambda_nx") c.lambda_nx = as_int(key, value);
    else if (key == "bisect_tol") c.bisect_tol = as_double(key, value);
    else if (key == "window_half_height") c.window_half_height = as_double(key, value);
    else if (key == "central_half_height") c.central_half_height = as_double(key, value);
    else if (key == "momentum_order_min") c.momentum_order_min = as_double(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        set_config_value(c, trim(t.substr(0, eq)), t.substr(eq + 1));
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text(path));
}

std::optional<std::string> output_dir_from_env() {
    const char* v = std::getenv("HETEROCYL_OUTPUT_DIR");
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

}  // namespace heterocyl
