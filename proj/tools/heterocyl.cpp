// heterocyl: lambda*, heteroclinic solve, verification and Euler export.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heterocyl/commands.hpp"
#include "heterocyl/config.hpp"
#include "heterocyl/euler.hpp"

using namespace heterocyl;

namespace {

// Flags that mirror RunConfig; only the ones given on the command line are applied.
struct Overrides {
    std::optional<int> nx, nz_per_unit, lambda_nx;
    std::optional<std::vector<double>> n_schedule;
    std::optional<double> grad_tol, eps_tail, eps_H, lambda_tol, lambda, bisect_tol;
    std::optional<double> window_half_height, central_half_height, momentum_order_min;
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;

    void apply(RunConfig& c) const {
        if (nx) c.nx = *nx;
        if (nz_per_unit) c.nz_per_unit = *nz_per_unit;
        if (lambda_nx) c.lambda_nx = *lambda_nx;
        if (n_schedule) c.n_schedule = *n_schedule;
        if (grad_tol) c.grad_tol = *grad_tol;
        if (eps_tail) c.eps_tail = *eps_tail;
        if (eps_H) c.eps_H = *eps_H;
        if (lambda_tol) c.lambda_tol = *lambda_tol;
        if (lambda) c.lambda_override = *lambda;
        if (bisect_tol) c.bisect_tol = *bisect_tol;
        if (window_half_height) c.window_half_height = *window_half_height;
        if (central_half_height) c.central_half_height = *central_half_height;
        if (momentum_order_min) c.momentum_order_min = *momentum_order_min;
        if (output_dir) c.output_dir = *output_dir;
        if (seed) c.seed = *seed;
    }
};

void add_config_flags(CLI::App& app, Overrides& o) {
    app.add_option("--nx", o.nx, "Cross-section intervals for solve");
    app.add_option("--nz-per-unit", o.nz_per_unit, "Slices per unit length in z (0: same as nx)");
    app.add_option("--n-schedule", o.n_schedule, "Cylinder half-lengths, increasing")
        ->delimiter(',');
    app.add_option("--grad-tol", o.grad_tol, "Residual tolerance of the truncated solves");
    app.add_option("--eps-tail", o.eps_tail, "Tail tolerance at distance 1 from the ends");
    app.add_option("--eps-H", o.eps_H, "Hamiltonian tolerance");
    app.add_option("--lambda-tol", o.lambda_tol, "Relative agreement of the lambda* oracles");
    app.add_option("--lambda", o.lambda, "Use this lambda instead of computing lambda*");
    app.add_option("--lambda-nx", o.lambda_nx, "Resolution of lambda-star");
    app.add_option("--bisect-tol", o.bisect_tol, "Bisection width for lambda*");
    app.add_option("--window-half-height", o.window_half_height, "Theta/stagnation window");
    app.add_option("--central-half-height", o.central_half_height, "Non-shear/momentum window");
    app.add_option("--momentum-order-min", o.momentum_order_min, "Verify: minimum momentum order");
    app.add_option("--output-dir", o.output_dir, "Directory for reports and exports");
    app.add_option("--seed", o.seed, "Seed (randomized tests only)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heteroclinic solutions of -Lap u = u^3 - lambda u^5 in a strip"};
    app.require_subcommand(1);
    std::string config_path;
    Overrides over;
    app.add_option("--config", config_path, "key = value configuration file");
    add_config_flags(app, over);
    app.fallthrough();

    auto* lam = app.add_subcommand("lambda-star", "Compute lambda* by both methods");
    auto* solve = app.add_subcommand("solve", "Compute the heteroclinic solution");
    auto* verify = app.add_subcommand("verify", "Run the diagnostic suite on a checkpoint");
    auto* exp = app.add_subcommand("euler-export", "Write Euler flow and theta CSVs");
    auto* report = app.add_subcommand("report", "Summarize the reports in output_dir");

    std::string checkpoint;
    verify->add_option("checkpoint", checkpoint, "Field checkpoint")->required();
    std::string exp_checkpoint;
    std::string kind = "strip";
    std::vector<double> window{0.0, 1.0, -8.0, 8.0};
    exp->add_option("checkpoint", exp_checkpoint, "Field checkpoint")->required();
    exp->add_option("--kind", kind, "strip, half_plane or plane")->capture_default_str();
    exp->add_option("--window", window, "x_lo,x_hi,z_lo,z_hi")
        ->delimiter(',')
        ->expected(4)
        ->capture_default_str();
    (void)lam;
    (void)solve;
    (void)report;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = load_config(config_path);
        if (auto env = output_dir_from_env()) config.output_dir = *env;
        over.apply(config);
        validate(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::usage;
    }

    if (app.got_subcommand("lambda-star")) return cmd_lambda_star(config, std::cerr);
    if (app.got_subcommand("solve")) return cmd_solve(config, std::cerr);
    if (app.got_subcommand("verify")) return cmd_verify(checkpoint, config, std::cerr);
    if (app.got_subcommand("euler-export")) {
        DomainKind k;
        try {
            k = parse_domain_kind(kind);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_code::usage;
        }
        return cmd_euler_export(exp_checkpoint, k, {window[0], window[1], window[2], window[3]},
                                config, std::cerr);
    }
    return cmd_report(config, std::cout);
}
