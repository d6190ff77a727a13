#include "heterocyl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "heterocyl/cross_section.hpp"
#include "heterocyl/cylinder.hpp"
#include "heterocyl/diagnostics.hpp"
#include "heterocyl/error.hpp"
#include "heterocyl/io.hpp"

namespace heterocyl {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCnTol = 1e-10;       // c_n may rise by rounding only
constexpr double kBoundTol = 1e-12;    // phi is recomputed, so allow its rounding
constexpr double kMonotoneTol = 1e-10;
constexpr double kDivTol = 1e-12;
constexpr double kNonShearMin = 1e-2;
constexpr double kStabilityRel = 1e-2;
constexpr double kStabilityPhiMin = -1e-6;
constexpr int kStabilityNx = 256;
constexpr double kCoreHalfWidth = 4.0;
constexpr double kTailMargin = 1.0;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void require_output_dir(const RunConfig& config) {
    if (config.output_dir.empty()) throw UsageError("output_dir is required");
}

fs::path output_for(const RunConfig& config, const fs::path& checkpoint) {
    if (!config.output_dir.empty()) return config.output_dir;
    return checkpoint.has_parent_path() ? checkpoint.parent_path() : fs::path(".");
}

// Uniform error-to-exit-code mapping for the commands.
template <class Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const IoError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const SolverError& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::nonconvergence;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return exit_code::usage;
    }
}

HeteroclinicConfig heteroclinic_config(const RunConfig& config, double nz_per_unit) {
    HeteroclinicConfig hc;
    hc.cylinder.nz_per_unit = nz_per_unit;
    hc.cylinder.grad_tol = config.grad_tol;
    hc.n_schedule = config.n_schedule;
    hc.eps_tail = config.eps_tail;
    hc.eps_H = config.eps_H;
    hc.tail_margin = kTailMargin;
    return hc;
}

std::string schedule_text(const std::vector<double>& s) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + format_double(s[k]);
    return out;
}

// Every other (s-th) node of g, keeping the lower-left corner.
GridFunction subsample(const GridFunction& g, int s) {
    GridFunction c;
    c.n1 = g.n1 / s;
    c.n2 = g.n2 / s;
    c.x_lo = g.x_lo;
    c.z_lo = g.z_lo;
    c.h1 = g.h1 * s;
    c.h2 = g.h2 * s;
    for (int a = 0; a <= c.n1; ++a) {
        for (int b = 0; b <= c.n2; ++b) c.values.push_back(g.at(a * s, b * s));
    }
    return c;
}

// Drops `m` nodes on every side of the flow and theta grids.
GridFunction crop(const GridFunction& g, int m) {
    GridFunction c;
    c.n1 = g.n1 - 2 * m;
    c.n2 = g.n2 - 2 * m;
    c.x_lo = g.x(m);
    c.z_lo = g.z(m);
    c.h1 = g.h1;
    c.h2 = g.h2;
    return c;
}

std::vector<double> crop(const GridFunction& g, const std::vector<double>& v, int m) {
    std::vector<double> out;
    for (int a = m; a <= g.n1 - m; ++a) {
        for (int b = m; b <= g.n2 - m; ++b) out.push_back(v[g.index(a, b)]);
    }
    return out;
}

}  // namespace

Check make_check(const std::string& name, double value, const std::string& relation,
                 double threshold) {
    Check c{name, value, relation, threshold, false};
    if (relation == "<=") c.pass = value <= threshold;
    else if (relation == "<") c.pass = value < threshold;
    else if (relation == ">=") c.pass = value >= threshold;
    else if (relation == ">") c.pass = value > threshold;
    else throw std::invalid_argument("make_check: unknown relation " + relation);
    return c;
}

bool VerificationReport::all_pass() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* VerificationReport::find(const std::string& name) const {
    for (const Check& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string VerificationReport::str() const {
    TextReport r("heterocyl verification report");
    r.section("setup");
    r.add("lambda_star", lambda_star);
    r.add("nx", nx);
    r.add("nz", nz);
    r.add("L", half_length);
    r.section("cn_table");
    r.add("columns", std::string("n, c_n, H_n, bottom_err, top_err, grad_norm"));
    for (const CnRow& row : cn_table) {
        r.add_row("n=" + format_double(row.n),
                  {row.n, row.c_n, row.H_n, row.bottom_err, row.top_err, row.grad_norm});
    }
    r.section("checks");
    std::string failed;
    for (const Check& c : checks) {
        r.add(c.name, std::string(c.pass ? "PASS " : "FAIL ") + format_double(c.value) + " " +
                          c.relation + " " + format_double(c.threshold));
        if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    r.section("info");
    for (const auto& [key, value] : info) r.add(key, value);
    r.section("result");
    r.add("all_pass", all_pass());
    r.add("failed", failed.empty() ? std::string("none") : failed);
    return r.str();
}

VerificationReport verify_field(const CylinderField& field, double lambda,
                                const RunConfig& config) {
    VerificationReport rep;
    rep.lambda_star = lambda;
    rep.nx = field.nx;
    rep.nz = field.nz;
    rep.half_length = field.half_length;
    auto add = [&](const std::string& name, double value, const char* rel, double thr) {
        rep.checks.push_back(make_check(name, value, rel, thr));
    };

    add("lambda_positive", lambda, ">", 0.0);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) return rep;
    const QuinticNonlinearity nl({lambda});

    // Limit state at this parameter, computed independently of the field.
    CrossSectionProfile phi;
    try {
        phi = minimal_minimizer(nl, field.nx).phi;
        add("phi_available", 1.0, ">=", 1.0);
    } catch (const SolverError&) {
        add("phi_available", 0.0, ">=", 1.0);
        return rep;
    }
    rep.info.emplace_back("phi_action", phi.action);
    rep.info.emplace_back("phi_max", phi.max_abs());

    // Truncated-minimiser suite on the checkpoint's grid.
    const double nz_per_unit = field.nz / (2.0 * field.half_length);
    try {
        const HeteroclinicResult h =
            solve_heteroclinic(nl, phi, heteroclinic_config(config, nz_per_unit));
        double min_c = std::numeric_limits<double>::infinity();
        double max_rise = -std::numeric_limits<double>::infinity();
        double max_H = -std::numeric_limits<double>::infinity();
        double max_g = 0.0;
        double tail_rise = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < h.steps.size(); ++k) {
            const ContinuationStep& s = h.steps[k];
            rep.cn_table.push_back({s.solve.n, s.solve.c_n, s.solve.H_n, s.bottom_err, s.top_err,
                                    s.solve.grad_norm, s.solve.converged});
            min_c = std::min(min_c, s.solve.c_n);
            max_H = std::max(max_H, s.solve.H_n);
            max_g = std::max(max_g, s.solve.grad_norm);
            if (k > 0) {
                const ContinuationStep& p = h.steps[k - 1];
                max_rise = std::max(max_rise, s.solve.c_n - p.solve.c_n);
                tail_rise = std::max({tail_rise, s.bottom_err - p.bottom_err, s.top_err - p.top_err});
            }
        }
        add("truncated_steps", static_cast<double>(h.steps.size()), ">=",
            static_cast<double>(config.n_schedule.size()));
        add("truncated_residual", max_g, "<=", config.grad_tol);
        add("cn_positive", min_c, ">", 0.0);
        if (h.steps.size() > 1) {
            add("cn_nonincreasing", max_rise, "<=", kCnTol);
            add("tails_nonincreasing", tail_rise, "<=", 0.0);
        }
        add("Hn_negative", max_H, "<", 0.0);
    } catch (const NonConvergenceError& e) {
        add("truncated_residual", e.grad_norm(), "<=", config.grad_tol);
    }

    // Checks on the stored field.
    const HamiltonianTrace tr = hamiltonian_trace(field, nl);
    add("hamiltonian_max_abs", tr.max_abs, "<=", config.eps_H);
    add("hamiltonian_drift", tr.drift, "<=", config.eps_H);

    const MonotoneCheck mono = check_monotone(field);
    add("monotone_min_dz", mono.min_interior_dz, ">=", -kMonotoneTol);
    add("monotone_min_resolved_dz", mono.min_resolved_dz, ">", 0.0);
    rep.info.emplace_back("monotone_min_x", field.x(mono.min_i));
    rep.info.emplace_back("monotone_min_z", field.z(mono.min_j));

    const BoundsCheck bounds = check_bounds(field, phi);
    add("bound_violation", bounds.max_violation, "<=", kBoundTol);
    double core_failures = 0.0;
    for (int j = 1; j < field.nz; ++j) {
        if (!bounds.slice_strict[j - 1] && std::abs(field.z(j)) <= kCoreHalfWidth) ++core_failures;
    }
    add("strict_core_failures", core_failures, "<=", 0.0);

    if (field.half_length > kTailMargin) {
        const auto [bottom, top] = limit_profile_errors(field, phi, kTailMargin);
        add("limit_bottom", bottom, "<=", config.eps_tail);
        add("limit_top", top, "<=", config.eps_tail);
    }

    const StabilityReport s0 = stability_spectrum(CrossSectionProfile::zero(kStabilityNx), nl,
                                                  StateKind::zero);
    const double pi2 = kPi * kPi;
    add("stability_zero_rel_err", std::abs(s0.smallest_eig - pi2) / pi2, "<=", kStabilityRel);
    const StabilityReport sp = stability_spectrum(phi, nl, StateKind::phi);
    add("stability_phi", sp.smallest_eig, ">=", kStabilityPhiMin);
    rep.info.emplace_back("stability_zero_eig", s0.smallest_eig);
    rep.info.emplace_back("stability_phi_eig", sp.smallest_eig);

    // Euler flow and theta field.
    const double w = std::min(config.window_half_height, field.half_length);
    const double c = std::min(config.central_half_height, field.half_length);
    const Window outer{0.0, 1.0, -w, w};
    const Window central{0.0, 1.0, -c, c};
    const EulerFlow flow = euler_fields(restrict_to_window(field, outer), nl);
    const EulerResidual div = euler_residual({flow});
    add("euler_divergence", div.div_res, "<=", kDivTol);

    const GridFunction cg = restrict_to_window(field, central);
    std::vector<EulerFlow> flows;
    for (int s : {4, 2, 1}) flows.push_back(euler_fields(subsample(cg, s), nl));
    const EulerResidual mom = euler_residual(flows, &central);
    add("euler_momentum_order", mom.order, ">=", config.momentum_order_min);
    rep.info.emplace_back("euler_momentum_residual", mom.momentum_res);

    const ShearFit shear = non_shear_certificate(flows.back());
    add("non_shear_certificate", shear.deviation, ">", kNonShearMin);
    rep.info.emplace_back("non_shear_angle_deg", shear.angle * 180.0 / kPi);

    const StagnationCheck stag = stagnation_check(flow);
    add("stagnation_min_speed", stag.min_speed, ">", 0.0);
    add("stagnation_sign_change_cells", static_cast<double>(stag.sign_change_cells), "<=", 0.0);
    rep.info.emplace_back("stagnation_min_x", stag.min_x);
    rep.info.emplace_back("stagnation_min_z", stag.min_z);

    const ThetaSummary th = theta_analysis(field, outer).summary;
    add("rho_min", th.min_rho, ">", 0.0);
    add("theta_min", th.theta_min, ">", 0.0);
    add("theta_max", th.theta_max, "<", kPi);
    add("theta_left_trace", th.left_trace_err, "<=", 2.0 * field.hx);
    add("theta_right_trace", th.right_trace_err, "<=", 2.0 * field.hx);
    add("theta_column_jump", th.max_column_jump, "<=", kPi / 2.0);
    rep.info.emplace_back("rho_min_x", th.min_rho_x);
    rep.info.emplace_back("rho_min_z", th.min_rho_z);
    rep.info.emplace_back("rho_floor", th.rho_floor);
    rep.info.emplace_back("rho_unresolved_nodes", static_cast<double>(th.unresolved_rho));
    rep.info.emplace_back("critical_points", static_cast<double>(th.critical_points));
    rep.info.emplace_back("bcn_residual", th.bcn_residual);
    return rep;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_lambda_star(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate(config);
        require_output_dir(config);
        const fs::path dir = config.output_dir;

        log << "lambda-star: bisection at nx=" << config.lambda_nx << '\n';
        const LambdaStarResult bis = lambda_star_bisection(config.lambda_nx, config.bisect_tol);
        log << "lambda-star: time map\n";
        const TimeMapPoint tm = lambda_star_timemap_point(1e-12);
        const QuinticNonlinearity nl({bis.lambda_star});
        const CrossSectionProfile shot = bvp_by_shooting(nl, 8 * config.lambda_nx, config.lambda_nx);
        double shot_diff = 0.0;
        for (int i = 0; i <= config.lambda_nx; ++i) {
            shot_diff = std::max(shot_diff, std::abs(shot.values[i] - bis.phi.values[i]));
        }
        const double gap = std::abs(bis.lambda_star - tm.lambda) / std::abs(tm.lambda);
        const bool agree = gap <= config.lambda_tol;

        TextReport r("heterocyl lambda-star report");
        r.section("bisection");
        r.add("nx", config.lambda_nx);
        r.add("lambda_star", bis.lambda_star);
        r.add("bracket_lo", bis.bracket_lo);
        r.add("bracket_hi", bis.bracket_hi);
        r.add("phi_action", bis.phi.action);
        r.add("phi_max", bis.phi.max_abs());
        r.add("zero_tol", bis.zero_tol);
        r.add("candidates", static_cast<long long>(bis.candidates.size()));
        r.add("candidates_ordered", bis.candidates_ordered);
        r.section("timemap");
        r.add("lambda_star", tm.lambda);
        r.add("turning_value", tm.M);
        r.add("width_residual", tm.width_residual);
        r.add("action_residual", tm.action_residual);
        r.section("shooting");
        r.add("action", energy_I(shot, nl));
        r.add("max_diff_vs_phi", shot_diff);
        r.section("agreement");
        r.add("relative_gap", gap);
        r.add("lambda_tol", config.lambda_tol);
        r.add("agree", agree);
        r.section("m_trace");
        r.add("columns", std::string("lambda, m_lambda"));
        for (std::size_t k = 0; k < bis.m_trace.size(); ++k) {
            r.add_row("row" + std::to_string(k), {bis.m_trace[k].first, bis.m_trace[k].second});
        }
        write_text(dir / kLambdaReport, r.str());
        write_text(dir / kPhiCsv, profile_csv(bis.phi));

        log << "lambda_star bisection " << format_double(bis.lambda_star) << '\n';
        log << "lambda_star timemap   " << format_double(tm.lambda) << '\n';
        log << "relative gap " << format_double(gap) << (agree ? " (agree)" : " (DISAGREE)")
            << '\n';
        return agree ? exit_code::ok : exit_code::disagreement;
    });
}

int cmd_solve(const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate(config);
        require_output_dir(config);
        const fs::path dir = config.output_dir;

        double lambda = 0.0;
        CrossSectionProfile phi;
        std::string source;
        if (config.lambda_override) {
            lambda = *config.lambda_override;
            source = "override";
            phi = minimal_minimizer(QuinticNonlinearity({lambda}), config.nx).phi;
        } else {
            log << "solve: lambda* at nx=" << config.nx << '\n';
            const LambdaStarResult bis = lambda_star_bisection(config.nx, config.bisect_tol);
            lambda = bis.lambda_star;
            phi = bis.phi;
            source = "bisection";
        }
        const QuinticNonlinearity nl({lambda});
        const int nzpu = config.effective_nz_per_unit();

        TextReport r("heterocyl solve report");
        r.section("setup");
        r.add("nx", config.nx);
        r.add("nz_per_unit", nzpu);
        r.add("n_schedule", schedule_text(config.n_schedule));
        r.add("grad_tol", config.grad_tol);
        r.add("lambda_source", source);
        r.add("lambda_star", lambda);
        r.add("phi_action", phi.action);
        r.add("phi_max", phi.max_abs());

        log << "solve: continuation over n = " << schedule_text(config.n_schedule) << '\n';
        HeteroclinicResult h;
        try {
            h = solve_heteroclinic(nl, phi, heteroclinic_config(config, nzpu));
        } catch (const NonConvergenceError& e) {
            // No step finished: keep the best iterate of the first cylinder.
            const double n = config.n_schedule.front();
            CylinderField partial(config.nx, static_cast<int>(std::lround(2.0 * n * nzpu)), n);
            partial.values = e.best();
            write_checkpoint(dir / kCheckpointFile, partial, lambda);
            r.section("final");
            r.add("steps_completed", 0);
            r.add("residual", e.grad_norm());
            r.add("converged", false);
            write_text(dir / kSolveReport, r.str());
            log << "solve: " << e.what() << " (partial checkpoint written)\n";
            return exit_code::nonconvergence;
        }

        r.section("continuation");
        r.add("columns", std::string("n, c_n, H_n, z_n, iterations, residual, bottom_err, "
                                     "top_err, H_max, H_drift, shift"));
        for (const ContinuationStep& s : h.steps) {
            r.add_row("n=" + format_double(s.solve.n),
                      {s.solve.n, s.solve.c_n, s.solve.H_n, s.solve.z_n,
                       static_cast<double>(s.solve.iterations), s.solve.grad_norm, s.bottom_err,
                       s.top_err, s.H_max, s.H_drift, s.shift});
        }
        const ContinuationStep& last = h.steps.back();
        const bool tails_ok = last.bottom_err <= config.eps_tail && last.top_err <= config.eps_tail;
        const bool h_ok = last.H_max <= config.eps_H;
        r.section("final");
        r.add("steps_completed", static_cast<long long>(h.steps.size()));
        r.add("nz", h.field.nz);
        r.add("L", h.field.half_length);
        r.add("bottom_err", last.bottom_err);
        r.add("top_err", last.top_err);
        r.add("eps_tail", config.eps_tail);
        r.add("tails_ok", tails_ok);
        r.add("H_max", last.H_max);
        r.add("H_drift", last.H_drift);
        r.add("eps_H", config.eps_H);
        r.add("hamiltonian_ok", h_ok);
        r.add("converged", h.converged);

        write_checkpoint(dir / kCheckpointFile, h.field, lambda);
        write_text(dir / kHamiltonianCsv, hamiltonian_csv(hamiltonian_trace(h.field, nl)));
        write_text(dir / kSolveReport, r.str());

        log << "solve: bottom " << format_double(last.bottom_err) << ", top "
            << format_double(last.top_err) << ", max|H| " << format_double(last.H_max) << '\n';
        log << "solve: " << (h.converged ? "converged" : "criteria not met") << '\n';
        return h.converged ? exit_code::ok : exit_code::nonconvergence;
    });
}

int cmd_verify(const fs::path& checkpoint, const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        validate(config);
        const Checkpoint cp = read_checkpoint(checkpoint);
        log << "verify: " << checkpoint.string() << '\n';
        const VerificationReport rep = verify_field(cp.field, cp.lambda, config);
        write_text(output_for(config, checkpoint) / kVerifyReport, rep.str());
        for (const Check& c : rep.checks) {
            log << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << format_double(c.value) << ' '
                << c.relation << ' ' << format_double(c.threshold) << '\n';
        }
        return rep.all_pass() ? exit_code::ok : exit_code::verification;
    });
}

int cmd_euler_export(const fs::path& checkpoint, DomainKind kind, const Window& window,
                     const RunConfig& config, std::ostream& log) {
    return guarded(log, [&] {
        const Checkpoint cp = read_checkpoint(checkpoint);
        const CylinderField& f = cp.field;
        const double L = f.half_length;
        const double eps = 1e-9;
        if (!(window.x_hi > window.x_lo) || !(window.z_hi > window.z_lo)) {
            throw UsageError("empty window");
        }
        if (window.z_lo < -L - eps || window.z_hi > L + eps) {
            throw UsageError("window leaves the stored z-range [-L, L]");
        }
        if ((kind == DomainKind::strip && (window.x_lo < -eps || window.x_hi > 1.0 + eps)) ||
            (kind == DomainKind::half_plane && window.x_lo < -eps)) {
            throw UsageError("window leaves the domain of the " + to_string(kind) + " extension");
        }
        const QuinticNonlinearity nl({cp.lambda});

        // Sample with a one-node halo taken from the plane extension (it agrees
        // with every kind on its domain and is itself a solution), so that the
        // exported nodes all get central stencils.
        ExtendedSolution sol;
        sol.base = f;
        sol.phi = CrossSectionProfile(f.nx, f.slice(f.nz), cp.lambda);
        sol.kind = DomainKind::plane;
        const double h = std::min(f.hx, f.hz);
        const Window halo{window.x_lo - h, window.x_hi + h, window.z_lo - h, window.z_hi + h};
        const GridFunction wide = sample_extended(sol, halo, h);
        const EulerFlow wide_flow = euler_fields(wide, nl);
        const ThetaField wide_theta = theta_analysis(wide);

        EulerFlow flow;
        flow.grid = crop(wide, 1);
        flow.grid.values = crop(wide, wide.values, 1);
        flow.u1 = crop(wide, wide_flow.u1, 1);
        flow.u2 = crop(wide, wide_flow.u2, 1);
        flow.p = crop(wide, wide_flow.p, 1);
        ThetaField theta;
        theta.grid = flow.grid;
        theta.rho = crop(wide, wide_theta.rho, 1);
        theta.theta = crop(wide, wide_theta.theta, 1);
        std::vector<double> div;
        {
            const std::vector<double> d = divergence(wide_flow);
            div = crop(wide, d, 1);
        }
        const GridFunction& g = flow.grid;

        const fs::path dir = output_for(config, checkpoint);
        const std::string stem = "euler_" + to_string(kind);
        write_text(dir / (stem + "_flow.csv"), flow_csv(flow, &div));
        write_text(dir / (stem + "_theta.csv"), theta_csv(theta));

        double max_div = 0.0;
        for (double d : div) max_div = std::max(max_div, std::abs(d));
        log << "euler-export: " << to_string(kind) << " on [" << format_double(g.x(0)) << ", "
            << format_double(g.x(g.n1)) << "] x [" << format_double(g.z(0)) << ", "
            << format_double(g.z(g.n2)) << "], " << (g.n1 + 1) * (g.n2 + 1) << " nodes\n";
        log << "euler-export: max |div| " << format_double(max_div) << '\n';
        return exit_code::ok;
    });
}

int cmd_report(const RunConfig& config, std::ostream& out) {
    return guarded(out, [&] {
        require_output_dir(config);
        const fs::path dir = config.output_dir;
        auto value = [](const std::vector<std::pair<std::string, std::string>>& kv,
                        const std::string& key) {
            std::string v = "missing";
            for (const auto& [k, val] : kv) {
                if (k == key) v = val;
            }
            return v;
        };

        TextReport r("heterocyl summary");
        bool any = false;
        if (fs::exists(dir / kLambdaReport)) {
            const auto kv = parse_report(read_text(dir / kLambdaReport));
            r.section("lambda_star");
            r.add("bisection", value(kv, "bisection.lambda_star"));
            r.add("timemap", value(kv, "timemap.lambda_star"));
            r.add("relative_gap", value(kv, "agreement.relative_gap"));
            r.add("agree", value(kv, "agreement.agree"));
            any = true;
        }
        if (fs::exists(dir / kSolveReport)) {
            const auto kv = parse_report(read_text(dir / kSolveReport));
            r.section("solve");
            r.add("lambda_star", value(kv, "setup.lambda_star"));
            r.add("steps_completed", value(kv, "final.steps_completed"));
            r.add("bottom_err", value(kv, "final.bottom_err"));
            r.add("top_err", value(kv, "final.top_err"));
            r.add("H_max", value(kv, "final.H_max"));
            r.add("converged", value(kv, "final.converged"));
            any = true;
        }
        if (fs::exists(dir / kVerifyReport)) {
            const auto kv = parse_report(read_text(dir / kVerifyReport));
            r.section("verification");
            r.add("all_pass", value(kv, "result.all_pass"));
            r.add("failed", value(kv, "result.failed"));
            any = true;
        }
        if (!any) throw IoError("no reports in " + dir.string());
        write_text(dir / kSummaryReport, r.str());
        out << r.str();
        return exit_code::ok;
    });
}

}  // namespace heterocyl
