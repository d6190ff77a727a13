// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heterocyl/commands.hpp"
#include "heterocyl/cross_section.hpp"
#include "heterocyl/cylinder.hpp"
#include "heterocyl/diagnostics.hpp"
#include "heterocyl/euler.hpp"
#include "heterocyl/io.hpp"

using namespace heterocyl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

class Criterion {
public:
    explicit Criterion(int number) : number_(number), start_(std::chrono::steady_clock::now()) {}

    // Records one condition; the criterion passes only if every condition does.
    void check(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        (ok ? detail_ : failed_) << (ok ? "; " : "; FAILED ") << what;
    }

    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (!pass_) ++failures;
        std::ostringstream t;
        t.precision(3);
        t << secs;
        std::cout << "criterion " << number_ << ": " << (pass_ ? "PASS" : "FAIL") << " (" << t.str()
                  << " s)" << failed_.str() << detail_.str() << std::endl;
    }

private:
    int number_;
    std::chrono::steady_clock::time_point start_;
    bool pass_ = true;
    std::ostringstream detail_;
    std::ostringstream failed_;
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Solved {
    double lambda;
    CrossSectionProfile phi;
    HeteroclinicResult result;
};

Solved solve(int nx, bool keep) {
    const LambdaStarResult r = lambda_star_bisection(nx, 1e-15);
    HeteroclinicConfig cfg;
    cfg.cylinder.nz_per_unit = nx;
    cfg.keep_step_fields = keep;
    return {r.lambda_star, r.phi, solve_heteroclinic(QuinticNonlinearity({r.lambda_star}), r.phi, cfg)};
}

// Largest relative gap between an analytic gradient and central differences.
template <class Energy>
double fd_gap(std::vector<double>& x, const std::vector<double>& grad,
              const std::vector<char>& free, Energy energy) {
    double gap = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!free[k]) continue;
        const double h = 1e-5, x0 = x[k];
        x[k] = x0 + h;
        const double ep = energy();
        x[k] = x0 - h;
        const double em = energy();
        x[k] = x0;
        gap = std::max(gap, std::abs((ep - em) / (2 * h) - grad[k]));
        scale = std::max(scale, std::abs(grad[k]));
    }
    return gap / scale;
}

void gradients() {
    Criterion c(1);
    const QuinticNonlinearity nl({0.0172});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    double worst_I = 0.0, worst_J = 0.0;
    for (int k = 0; k < 100; ++k) {
        CrossSectionProfile p = CrossSectionProfile::zero(32);
        for (int i = 1; i < 32; ++i) p.values[i] = u(rng);
        std::vector<char> free_I(33, 1);
        free_I.front() = free_I.back() = 0;
        worst_I = std::max(worst_I, fd_gap(p.values, grad_I(p, nl), free_I,
                                           [&] { return energy_I(p, nl); }));

        CylinderField f(16, 32, 1.5);
        std::vector<char> free_J(f.values.size(), 0);
        for (int i = 1; i < 16; ++i) {
            for (int j = 1; j < 32; ++j) {
                f.at(i, j) = u(rng);
                free_J[f.index(i, j)] = 1;
            }
        }
        for (int i = 1; i < 16; ++i) f.at(i, 32) = u(rng);
        worst_J = std::max(worst_J, fd_gap(f.values, grad_J(f, nl), free_J,
                                           [&] { return energy_J(f, nl); }));
    }
    c.check(worst_I <= 1e-6, "cross-section gradient gap " + num(worst_I) + " <= 1e-6 (33 nodes)");
    c.check(worst_J <= 1e-6, "cylinder gradient gap " + num(worst_J) + " <= 1e-6 (17x33 nodes)");
}

void lambda_oracles() {
    Criterion c(2);
    const LambdaStarResult bis = lambda_star_bisection(512, 1e-15);
    const double tm = lambda_star_timemap(1e-15);
    const double rel = std::abs(bis.lambda_star - tm) / tm;
    c.check(rel <= 1e-3, "bisection " + num(bis.lambda_star) + " vs time map " + num(tm) +
                             ", relative gap " + num(rel) + " <= 1e-3");

    const QuinticNonlinearity nl({bis.lambda_star});
    const CrossSectionProfile shot = bvp_by_shooting(nl, 8 * 512, 512);
    const double action = energy_I(shot, nl);
    double gap = 0.0;
    for (int i = 0; i <= 512; ++i) gap = std::max(gap, std::abs(shot.values[i] - bis.phi.values[i]));
    c.check(std::abs(action) <= 1e-4, "shooting action " + num(action) + ", |I| <= 1e-4");
    c.check(gap <= 1e-4, "shooting vs minimiser max gap " + num(gap) + " <= 1e-4");
}

void hamiltonian(const Solved& s32, const Solved& s64) {
    Criterion c(3);
    const double d32 = hamiltonian_trace(s32.result.field, QuinticNonlinearity({s32.lambda})).drift;
    const double d64 = hamiltonian_trace(s64.result.field, QuinticNonlinearity({s64.lambda})).drift;
    c.check(d64 <= 1e-3, "drift at nx=64 " + num(d64) + " <= 1e-3");
    c.check(d32 / d64 >= 3.0, "drift ratio under halving " + num(d32 / d64) + " >= 3");
}

void truncated(const Solved& s) {
    Criterion c(4);
    const auto& steps = s.result.steps;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const TruncatedSolveReport& r = steps[k].solve;
        const CylinderField& u = *steps[k].field;
        const std::string n = "n=" + num(r.n) + ": ";
        c.check(r.c_n > 0.0, n + "c_n " + num(r.c_n) + " > 0");
        if (k > 0) {
            const double prev = steps[k - 1].solve.c_n;
            c.check(r.c_n <= prev + 1e-10, n + "c_n <= previous c_n + 1e-10");
        }
        c.check(r.H_n < 0.0, n + "H_n " + num(r.H_n) + " < 0");
        const BoundsCheck b = check_bounds(u, s.phi);
        c.check(b.max_violation <= 0.0, n + "0 <= u <= phi exactly");
        c.check(b.strict_core, n + "strictly inside on |z| <= 4 at 1e-12");
        const MonotoneCheck m = check_monotone(u);
        c.check(m.pass, n + "min resolved d_z u " + num(m.min_resolved_dz) + " > 0");
    }
    c.check(steps.size() == 4, "schedule 4, 6, 8, 12 completed");
}

void limits(const Solved& s) {
    Criterion c(5);
    const auto& steps = s.result.steps;
    const ContinuationStep& last = steps.back();
    c.check(last.bottom_err <= 1e-2, "bottom tail " + num(last.bottom_err) + " <= 1e-2");
    c.check(last.top_err <= 1e-2, "top tail " + num(last.top_err) + " <= 1e-2");
    bool decreasing = true;
    for (std::size_t k = 1; k < steps.size(); ++k) {
        decreasing = decreasing && steps[k].bottom_err <= steps[k - 1].bottom_err &&
                     steps[k].top_err <= steps[k - 1].top_err;
    }
    c.check(decreasing, "tails nonincreasing along the schedule");
    const double H = hamiltonian_trace(s.result.field, QuinticNonlinearity({s.lambda})).max_abs;
    c.check(H <= 1e-3, "max |H| " + num(H) + " <= 1e-3");
}

void stability(const Solved& s) {
    Criterion c(6);
    const StabilityReport z = stability_spectrum(CrossSectionProfile::zero(256),
                                                 QuinticNonlinearity({s.lambda}), StateKind::zero);
    const double rel = std::abs(z.smallest_eig - kPi * kPi) / (kPi * kPi);
    c.check(rel <= 1e-2, "zero state eigenvalue " + num(z.smallest_eig) + " within 1% of pi^2");
    const StabilityReport p = stability_spectrum(s.phi, QuinticNonlinearity({s.lambda}), StateKind::phi);
    c.check(p.smallest_eig >= -1e-6, "eigenvalue at phi " + num(p.smallest_eig) + " >= -1e-6");
}

CylinderField flat_field(const CrossSectionProfile& phi, int nz, double L) {
    CylinderField f(phi.nx, nz, L);
    for (int i = 0; i <= phi.nx; ++i) {
        for (int j = 0; j <= nz; ++j) f.at(i, j) = phi.values[i];
    }
    return f;
}

void euler(const std::vector<const Solved*>& ladder) {
    Criterion c(7);
    // Structural checks at the acceptance resolution, orders over the whole ladder.
    const Solved& s = *ladder[1];
    const QuinticNonlinearity nl({s.lambda});
    const double div = max_abs(divergence(euler_fields(s.result.field, nl)));
    c.check(div <= 1e-12, "divergence " + num(div) + " <= 1e-12");

    const Window central{0.0, 1.0, -2.0, 2.0};
    std::vector<EulerFlow> flows;
    for (const Solved* t : ladder) {
        flows.push_back(euler_fields(restrict_to_window(t->result.field, central),
                                     QuinticNonlinearity({t->lambda})));
    }
    const EulerResidual r = euler_residual(flows);
    const double order = *std::min_element(r.orders.begin(), r.orders.end());
    std::string orders;
    for (double o : r.orders) orders += (orders.empty() ? "" : ", ") + num(o);
    c.check(r.orders.size() == 2 && order >= 1.8, "momentum orders " + orders + " >= 1.8");

    const ShearFit fit = non_shear_certificate(flows[1]);
    c.check(fit.deviation > 0.01, "non-shear certificate " + num(fit.deviation) + " > 0.01");
    const ShearFit control = non_shear_certificate(euler_fields(flat_field(s.phi, 128, 1.0), nl));
    c.check(control.deviation <= 1e-3, "shear control " + num(control.deviation) + " <= 1e-3");
}

void no_critical_points(const Solved& s) {
    Criterion c(8);
    const double h = 1.0 / s.phi.nx;
    const ThetaField t = theta_analysis(s.result.field, {0.0, 1.0, -8.0, 8.0});
    const ThetaSummary& m = t.summary;
    c.check(m.min_rho > 0.0, "min rho on [0,1]x[-8,8] " + num(m.min_rho) + " > 0 (at z=" +
                                 num(m.min_rho_z) + ")");
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    std::string mins;
    for (double T : {1.0, 2.0, 4.0, 8.0}) {
        const double v = theta_analysis(s.result.field, {0.0, 1.0, -T, T}).summary.min_rho;
        decreasing = decreasing && v < prev;
        mins += (mins.empty() ? "" : ", ") + num(v);
        prev = v;
    }
    c.check(decreasing, "min rho over T=1,2,4,8 decreasing: " + mins);
    c.check(m.left_trace_err <= 2 * h && m.right_trace_err <= 2 * h,
            "theta traces 0 and pi within 2h (" + num(m.left_trace_err) + ", " +
                num(m.right_trace_err) + ")");
    c.check(m.unresolved_rho == 0, num(m.unresolved_rho) + " nodes with rho at rounding level");
    c.check(m.theta_min > 0.0 && m.theta_max < kPi,
            "theta range [" + num(m.theta_min) + ", " + num(m.theta_max) + "] inside (0, pi)");

    const ThetaGrowth g = theta_growth_probe({s.result.field, s.phi, DomainKind::plane},
                                             {4.0, 8.0, 16.0}, 2.0, h);
    bool toward = std::abs(g.ratios.back() - kPi) <= 0.1;
    for (std::size_t k = 1; k < g.ratios.size(); ++k) {
        toward = toward && g.ratios[k] >= g.ratios[k - 1] - 0.1 && g.ratios[k] <= kPi + 0.1;
    }
    c.check(toward, "growth ratios " + num(g.ratios[0]) + ", " + num(g.ratios[1]) + ", " +
                        num(g.ratios[2]) + " approach pi within 0.1");
}

void determinism() {
    Criterion c(9);
    const fs::path root = fs::temp_directory_path() / ("heterocyl_acceptance_" + std::to_string(::getpid()));
    std::vector<fs::path> dirs{root / "a", root / "b"};
    std::vector<int> codes;
    for (const fs::path& d : dirs) {
        fs::remove_all(d);
        RunConfig cfg;
        cfg.output_dir = d.string();
        std::ostringstream log;
        codes.push_back(cmd_solve(cfg, log));
    }
    c.check(codes[0] == codes[1], "exit codes " + std::to_string(codes[0]) + " and " +
                                      std::to_string(codes[1]) + " agree");
    for (const char* f : {kCheckpointFile, kSolveReport, kHamiltonianCsv}) {
        const bool same = fs::exists(dirs[0] / f) &&
                          read_text(dirs[0] / f) == read_text(dirs[1] / f);
        c.check(same, std::string(f) + " byte-identical");
    }
    fs::remove_all(root);
}

}  // namespace

int main() {
    std::cout.setf(std::ios::unitbuf);
    gradients();
    lambda_oracles();
    const Solved s32 = solve(32, false);
    const Solved s64 = solve(64, true);
    const Solved s128 = solve(128, false);
    hamiltonian(s32, s64);
    truncated(s64);
    limits(s64);
    stability(s64);
    euler({&s32, &s64, &s128});
    no_critical_points(s64);
    determinism();
    std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
