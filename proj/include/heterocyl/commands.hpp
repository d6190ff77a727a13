#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "heterocyl/config.hpp"
#include "heterocyl/euler.hpp"

namespace heterocyl {

/// Process exit codes shared by every subcommand.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;          // bad arguments, unreadable or corrupt input
inline constexpr int disagreement = 2;   // lambda* oracles disagree
inline constexpr int nonconvergence = 3; // solver did not meet its criteria
inline constexpr int verification = 4;   // a verification check failed
}  // namespace exit_code

/// One recorded check: measured value against a threshold.
struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", "<", ">=", ">"
    double threshold = 0.0;
    bool pass = false;
};

Check make_check(const std::string& name, double value, const std::string& relation,
                 double threshold);

struct CnRow {
    double n = 0.0;
    double c_n = 0.0;
    double H_n = 0.0;
    double bottom_err = 0.0;
    double top_err = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
};

struct VerificationReport {
    double lambda_star = 0.0;
    int nx = 0;
    int nz = 0;
    double half_length = 0.0;
    std::vector<CnRow> cn_table;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> info;  // measured values without a threshold

    bool all_pass() const;
    const Check* find(const std::string& name) const;
    std::string str() const;
};

/// Everything cmd_verify checks, without file output. Throws SolverError
/// only for failures outside the checks themselves.
VerificationReport verify_field(const CylinderField& field, double lambda,
                                const RunConfig& config);

// File names inside output_dir.
inline constexpr const char* kLambdaReport = "lambda_star.txt";
inline constexpr const char* kPhiCsv = "phi.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.csv";
inline constexpr const char* kHamiltonianCsv = "hamiltonian.csv";
inline constexpr const char* kSolveReport = "solve_report.txt";
inline constexpr const char* kVerifyReport = "verification.txt";
inline constexpr const char* kSummaryReport = "summary.txt";

/// Both lambda* methods at config.lambda_nx; exit 0 iff they agree within
/// lambda_tol (relative), 2 otherwise.
int cmd_lambda_star(const RunConfig& config, std::ostream& log);

/// lambda* at config.nx (or lambda_override), then the continuation. Writes
/// the checkpoint (partial on failure), Hamiltonian trace and convergence
/// report; exit 0 iff the tail and Hamiltonian criteria hold, 3 otherwise.
int cmd_solve(const RunConfig& config, std::ostream& log);

/// Full diagnostic suite on a checkpoint; exit 0 iff every check passes,
/// 4 otherwise, 1 for an unreadable checkpoint.
int cmd_verify(const std::filesystem::path& checkpoint, const RunConfig& config,
               std::ostream& log);

/// Flow and theta CSVs for the extension on the window, sampled at the
/// checkpoint's hx. Exit 1 when the window leaves the representable range.
int cmd_euler_export(const std::filesystem::path& checkpoint, DomainKind kind,
                     const Window& window, const RunConfig& config, std::ostream& log);

/// Gathers the reports present in output_dir into summary.txt and prints it.
int cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace heterocyl
