#include "heterocyl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace heterocyl {

namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void append_row(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view text) {
    const std::string_view s = strip(text);
    if (s.empty()) throw std::invalid_argument("empty number");
    const char* first = s.data();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

long long parse_integer(std::string_view text) {
    const std::string_view s = strip(text);
    if (s.empty()) throw std::invalid_argument("empty integer");
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Checkpoint
// ---------------------------------------------------------------------------

std::string checkpoint_text(const CylinderField& field, double lambda) {
    std::string out = kCheckpointHeader;
    out += '\n';
    out += "nx," + std::to_string(field.nx) + '\n';
    out += "nz," + std::to_string(field.nz) + '\n';
    out += "L," + format_double(field.half_length) + '\n';
    out += "shift," + format_double(field.shift) + '\n';
    out += "lambda," + format_double(lambda) + '\n';
    for (int i = 0; i <= field.nx; ++i) {
        for (int j = 0; j <= field.nz; ++j) {
            if (j) out += ',';
            out += format_double(field.at(i, j));
        }
        out += '\n';
    }
    return out;
}

Checkpoint parse_checkpoint(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next = [&](const char* what) {
        if (!std::getline(in, line)) throw IoError(std::string("checkpoint: missing ") + what);
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    auto keyed = [&](const char* key) -> std::string_view {
        next(key);
        const auto parts = split(line, ',');
        if (parts.size() != 2 || strip(parts[0]) != key) {
            throw IoError("checkpoint line " + std::to_string(lineno) + ": expected '" + key +
                          ",<value>'");
        }
        return strip(parts[1]);
    };
    auto number = [&](std::string_view s) {
        try {
            const double v = parse_double(s);
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
            return v;
        } catch (const std::invalid_argument&) {
            throw IoError("checkpoint line " + std::to_string(lineno) + ": bad number '" +
                          std::string(s) + "'");
        }
    };
    auto integer = [&](std::string_view s) {
        try {
            return parse_integer(s);
        } catch (const std::invalid_argument&) {
            throw IoError("checkpoint line " + std::to_string(lineno) + ": bad integer");
        }
    };

    next("header");
    if (line != kCheckpointHeader) throw IoError("checkpoint: bad header '" + line + "'");
    const long long nx = integer(keyed("nx"));
    const long long nz = integer(keyed("nz"));
    const double L = number(keyed("L"));
    const double shift = number(keyed("shift"));
    const double lambda = number(keyed("lambda"));
    if (nx < 2 || nz < 2 || nx > 1000000 || nz > 100000000 || !(L > 0.0)) {
        throw IoError("checkpoint: grid sizes out of range");
    }

    Checkpoint cp;
    cp.field = CylinderField(static_cast<int>(nx), static_cast<int>(nz), L);
    cp.field.shift = shift;
    cp.lambda = lambda;
    for (int i = 0; i <= nx; ++i) {
        next("value row");
        const auto parts = split(line, ',');
        if (parts.size() != static_cast<std::size_t>(nz) + 1) {
            throw IoError("checkpoint line " + std::to_string(lineno) + ": expected " +
                          std::to_string(nz + 1) + " values");
        }
        for (int j = 0; j <= nz; ++j) cp.field.at(i, j) = number(parts[j]);
    }
    while (std::getline(in, line)) {
        if (!strip(line).empty()) throw IoError("checkpoint: trailing data");
    }
    return cp;
}

void write_checkpoint(const std::filesystem::path& path, const CylinderField& field,
                      double lambda) {
    write_text(path, checkpoint_text(field, lambda));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint(read_text(path));
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string profile_csv(const CrossSectionProfile& profile) {
    std::string out = "x,phi\n";
    for (int i = 0; i <= profile.nx; ++i) append_row(out, {profile.x(i), profile.values[i]});
    return out;
}

std::string hamiltonian_csv(const HamiltonianTrace& trace) {
    std::string out = "t,H\n";
    for (std::size_t k = 0; k < trace.values.size(); ++k) {
        append_row(out, {trace.heights[k], trace.values[k]});
    }
    return out;
}

std::string flow_csv(const EulerFlow& flow, const std::vector<double>* given) {
    const GridFunction& g = flow.grid;
    const std::vector<double> div = given ? *given : divergence(flow);
    if (div.size() != flow.u1.size()) throw std::invalid_argument("flow_csv: div size mismatch");
    std::string out = "x,z,u1,u2,p,div\n";
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) {
            const std::size_t k = g.index(a, b);
            append_row(out, {g.x(a), g.z(b), flow.u1[k], flow.u2[k], flow.p[k], div[k]});
        }
    }
    return out;
}

std::string theta_csv(const ThetaField& theta) {
    const GridFunction& g = theta.grid;
    std::string out = "x,z,rho,theta\n";
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) {
            const std::size_t k = g.index(a, b);
            append_row(out, {g.x(a), g.z(b), theta.rho[k], theta.theta[k]});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

TextReport::TextReport(std::string title) : text_("# " + std::move(title) + '\n') {}

void TextReport::section(const std::string& name) { text_ += "\n[" + name + "]\n"; }

void TextReport::add(const std::string& key, const std::string& value) {
    text_ += key + ": " + value + '\n';
}

void TextReport::add(const std::string& key, double value) { add(key, format_double(value)); }

void TextReport::add(const std::string& key, long long value) { add(key, std::to_string(value)); }

void TextReport::add(const std::string& key, bool value) {
    add(key, std::string(value ? "true" : "false"));
}

void TextReport::add_row(const std::string& key, const std::vector<double>& values) {
    std::string row;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) row += ", ";
        row += format_double(values[k]);
    }
    add(key, row);
}

std::string TextReport::str() const { return text_; }

std::vector<std::pair<std::string, std::string>> parse_report(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::string prefix;
    while (std::getline(in, line)) {
        const std::string_view s = strip(line);
        if (s.empty() || s.front() == '#') continue;
        if (s.front() == '[' && s.back() == ']') {
            prefix = std::string(s.substr(1, s.size() - 2)) + ".";
            continue;
        }
        const auto colon = s.find(": ");
        if (colon == std::string_view::npos) continue;
        out.emplace_back(prefix + std::string(s.substr(0, colon)),
                         std::string(strip(s.substr(colon + 2))));
    }
    return out;
}

}  // namespace heterocyl
