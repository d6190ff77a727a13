#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heterocyl/diagnostics.hpp"
#include "heterocyl/euler.hpp"
#include "heterocyl/grid.hpp"

namespace heterocyl {

/// File missing, unreadable, unwritable or malformed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits ("%.17g"); round-trips every finite double.
std::string format_double(double v);

/// Whole-string parse (surrounding blanks allowed). Throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

// ---------------------------------------------------------------------------
// Field checkpoint
// ---------------------------------------------------------------------------

struct Checkpoint {
    CylinderField field;
    double lambda = 0.0;
};

inline constexpr const char* kCheckpointHeader = "heterocyl-field v1";

/// Header line, then "nx,<int>", "nz,<int>", "L,<v>", "shift,<v>",
/// "lambda,<v>", then one CSV row of nz + 1 values per x-node i = 0..nx.
std::string checkpoint_text(const CylinderField& field, double lambda);
/// Throws IoError on any deviation from the layout or non-finite values.
Checkpoint parse_checkpoint(const std::string& text);

void write_checkpoint(const std::filesystem::path& path, const CylinderField& field,
                      double lambda);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

/// "x,phi"
std::string profile_csv(const CrossSectionProfile& profile);
/// "t,H"
std::string hamiltonian_csv(const HamiltonianTrace& trace);
/// "x,z,u1,u2,p,div"; div is divergence(flow) unless given (one value per node).
std::string flow_csv(const EulerFlow& flow, const std::vector<double>* div = nullptr);
/// "x,z,rho,theta"
std::string theta_csv(const ThetaField& theta);

// ---------------------------------------------------------------------------
// Structured-text reports
// ---------------------------------------------------------------------------

/// "key: value" lines grouped under "[section]" headers, in insertion order.
class TextReport {
public:
    explicit TextReport(std::string title);

    void section(const std::string& name);
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);
    void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
    void add(const std::string& key, bool value);
    /// A row of a table: "key: v1, v2, ...".
    void add_row(const std::string& key, const std::vector<double>& values);

    std::string str() const;

private:
    std::string text_;
};

/// Parses "key: value" lines of a TextReport (sections are prefixed as
/// "section.key"); later duplicates win.
std::vector<std::pair<std::string, std::string>> parse_report(const std::string& text);

}  // namespace heterocyl
