#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "heterocyl/commands.hpp"
#include "heterocyl/config.hpp"
#include "heterocyl/io.hpp"

using namespace heterocyl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() /
                       ("heterocyl_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig small_config(const fs::path& dir) {
    RunConfig c;
    c.nx = 32;
    c.lambda_nx = 64;
    c.output_dir = dir.string();
    return c;
}

// One nx = 32 solve shared by the checkpoint-based tests.
const fs::path& solved_dir() {
    static const fs::path dir = [] {
        const fs::path d = scratch("solve");
        std::ostringstream log;
        const int rc = cmd_solve(small_config(d), log);
        REQUIRE(rc == exit_code::nonconvergence);  // H criterion needs nx >= 256
        return d;
    }();
    return dir;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
    std::istringstream in(read_text(p));
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            row.push_back(parse_double(line.substr(start, pos - start)));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("config round-trips through its text form") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(1e-12, 1.0);
    std::uniform_int_distribution<int> n(2, 4096);
    for (int k = 0; k < 200; ++k) {
        RunConfig c;
        c.nx = n(rng);
        c.nz_per_unit = n(rng) % 3 == 0 ? 0 : n(rng);
        c.n_schedule.clear();
        double s = 2.0;
        for (int j = 0; j < 1 + k % 5; ++j) c.n_schedule.push_back(s += 1.0 + 10.0 * u(rng));
        c.grad_tol = u(rng);
        c.eps_tail = u(rng);
        c.eps_H = u(rng);
        c.lambda_tol = u(rng);
        if (k % 2) c.lambda_override = u(rng);
        c.output_dir = k % 3 ? "out/dir " + std::to_string(k) : "";
        c.seed = rng();
        c.lambda_nx = n(rng);
        c.bisect_tol = u(rng);
        c.window_half_height = 1.0 + u(rng);
        c.central_half_height = 1.0 + u(rng);
        c.momentum_order_min = u(rng);
        CHECK(parse_config(serialize(c)) == c);
    }
    CHECK(parse_config("") == RunConfig{});
    CHECK(parse_config("# comment\n\n  nx = 16  \n").nx == 16);
}

TEST_CASE("config errors are usage errors") {
    CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("nx = sixty-four\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("nx 64\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grad_tol = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("eps_H = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_schedule = 4, 4, 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_schedule = 8, 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("lambda_override = nan\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/heterocyl.cfg"), std::exception);

    RunConfig c;
    set_config_value(c, "n_schedule", "4,6");
    CHECK(c.n_schedule == std::vector<double>{4.0, 6.0});
    set_config_value(c, "lambda_override", "none");
    CHECK_FALSE(c.lambda_override.has_value());
    CHECK(c.effective_nz_per_unit() == c.nx);
}

TEST_CASE("output directory from the environment") {
    ::unsetenv("HETEROCYL_OUTPUT_DIR");
    CHECK_FALSE(output_dir_from_env().has_value());
    ::setenv("HETEROCYL_OUTPUT_DIR", "", 1);
    CHECK_FALSE(output_dir_from_env().has_value());
    ::setenv("HETEROCYL_OUTPUT_DIR", "/tmp/x y", 1);
    CHECK(output_dir_from_env() == std::optional<std::string>("/tmp/x y"));
    ::unsetenv("HETEROCYL_OUTPUT_DIR");
}

TEST_CASE("numbers round-trip at 17 digits") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 10000; ++k) {
        double v;
        do {
            const std::uint64_t bits = rng();
            std::memcpy(&v, &bits, sizeof v);
        } while (!std::isfinite(v));
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(std::signbit(parse_double(format_double(-0.0))));
    CHECK(parse_double(" +1.5 ") == 1.5);
    CHECK_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
    CHECK(parse_integer("42") == 42);
    CHECK_THROWS_AS(parse_integer("4.2"), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit for bit and reject corruption") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 3.0);
    CylinderField f(5, 12, 2.5);
    for (double& v : f.values) v = g(rng);
    f.values[3] = 5e-320;
    f.values[4] = -0.0;
    f.shift = -0.0123;
    const std::string text = checkpoint_text(f, 0.0172);
    const Checkpoint cp = parse_checkpoint(text);
    CHECK(cp.lambda == 0.0172);
    CHECK(cp.field.nx == 5);
    CHECK(cp.field.nz == 12);
    CHECK(cp.field.half_length == 2.5);
    CHECK(cp.field.shift == f.shift);
    CHECK(std::memcmp(cp.field.values.data(), f.values.data(), f.values.size() * sizeof(double)) == 0);
    CHECK(checkpoint_text(cp.field, cp.lambda) == text);

    const fs::path dir = scratch("checkpoint");
    write_checkpoint(dir / "a" / "cp.csv", f, 0.5);
    CHECK(read_checkpoint(dir / "a" / "cp.csv").field.values == f.values);
    CHECK_THROWS_AS(read_checkpoint(dir / "missing.csv"), IoError);

    auto replace = [&](const std::string& from, const std::string& to) {
        std::string t = text;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_THROWS_AS(parse_checkpoint(replace(kCheckpointHeader, "heterocyl-field v2")), IoError);
    CHECK_THROWS_AS(parse_checkpoint(replace("nx,5", "nx,five")), IoError);
    CHECK_THROWS_AS(parse_checkpoint(replace("lambda,", "lambda,nan")), IoError);
    CHECK_THROWS_AS(parse_checkpoint(replace("nz,12", "nz,13")), IoError);
    CHECK_THROWS_AS(parse_checkpoint(text.substr(0, text.size() / 2)), IoError);
    CHECK_THROWS_AS(parse_checkpoint(text + "1,2,3\n"), IoError);
    CHECK_THROWS_AS(parse_checkpoint(""), IoError);
    CHECK_NOTHROW(parse_checkpoint(text + "\n\n"));
}

TEST_CASE("csv exports and reports parse back") {
    CrossSectionProfile p(4, {0.0, 0.5, 1.0 / 3.0, 0.25, 0.0});
    CHECK(profile_csv(p) == "x,phi\n0,0\n0.25,0.5\n0.5,0.33333333333333331\n0.75,0.25\n1,0\n");

    TextReport r("title line");
    r.section("alpha");
    r.add("a", 1.0 / 3.0);
    r.add("b", 7);
    r.add("c", true);
    r.section("beta");
    r.add("a", std::string("text value"));
    r.add_row("row", {1.0, 2.5});
    const auto kv = parse_report(r.str());
    REQUIRE(kv.size() == 5);
    CHECK(kv[0].first == "alpha.a");
    CHECK(parse_double(kv[0].second) == 1.0 / 3.0);
    CHECK(kv[1].second == "7");
    CHECK(kv[2].second == "true");
    CHECK(kv[3] == std::pair<std::string, std::string>{"beta.a", "text value"});
    CHECK(kv[4].second == "1, 2.5");
    CHECK(r.str().rfind("# title line\n", 0) == 0);
}

TEST_CASE("lambda-star command") {
    std::ostringstream log;
    RunConfig none = small_config("");
    CHECK(cmd_lambda_star(none, log) == exit_code::usage);

    const fs::path dir = scratch("lambda");
    CHECK(cmd_lambda_star(small_config(dir), log) == exit_code::ok);
    CHECK(fs::exists(dir / kLambdaReport));
    const auto phi = read_csv(dir / kPhiCsv);
    CHECK(phi.size() == 65);
    double bis = 0.0, tm = 0.0;
    for (const auto& [k, v] : parse_report(read_text(dir / kLambdaReport))) {
        if (k == "bisection.lambda_star") bis = parse_double(v);
        if (k == "timemap.lambda_star") tm = parse_double(v);
    }
    CHECK(bis == doctest::Approx(0.017205450374375346439).epsilon(1e-12));
    CHECK(tm == doctest::Approx(0.0172130623214377933738).epsilon(1e-10));

    RunConfig strict = small_config(dir);
    strict.lambda_tol = 1e-12;
    CHECK(cmd_lambda_star(strict, log) == exit_code::disagreement);
}

TEST_CASE("solve writes a reloadable checkpoint and reports deterministically") {
    const fs::path& dir = solved_dir();
    for (const char* f : {kCheckpointFile, kHamiltonianCsv, kSolveReport}) CHECK(fs::exists(dir / f));
    const std::string text = read_text(dir / kCheckpointFile);
    const Checkpoint cp = parse_checkpoint(text);
    CHECK(checkpoint_text(cp.field, cp.lambda) == text);
    CHECK(cp.field.nx == 32);
    CHECK(cp.field.half_length == 12.0);

    const fs::path again = scratch("solve_again");
    std::ostringstream log;
    CHECK(cmd_solve(small_config(again), log) == exit_code::nonconvergence);
    CHECK(read_text(again / kCheckpointFile) == text);
    CHECK(read_text(again / kSolveReport) == read_text(dir / kSolveReport));
    CHECK(read_text(again / kHamiltonianCsv) == read_text(dir / kHamiltonianCsv));

    std::ostringstream log2;
    CHECK(cmd_solve(small_config(""), log2) == exit_code::usage);
}

TEST_CASE("verify flags constructed faults") {
    const fs::path& dir = solved_dir();
    const Checkpoint cp = read_checkpoint(dir / kCheckpointFile);
    const RunConfig cfg = small_config(dir);

    const VerificationReport good = verify_field(cp.field, cp.lambda, cfg);
    for (const char* name : {"monotone_min_dz", "bound_violation", "limit_bottom", "limit_top",
                             "euler_divergence", "non_shear_certificate", "theta_left_trace"}) {
        const Check* c = good.find(name);
        REQUIRE(c != nullptr);
        CHECK_MESSAGE(c->pass, name);
    }
    for (const Check& c : good.checks) {
        CHECK(!c.relation.empty());
        CHECK(std::isfinite(c.threshold));
    }

    CylinderField bad = cp.field;
    bad.at(16, bad.nz / 2) = -bad.at(16, bad.nz / 2);
    const VerificationReport neg = verify_field(bad, cp.lambda, cfg);
    CHECK_FALSE(neg.find("monotone_min_dz")->pass);
    CHECK_FALSE(neg.all_pass());
    const fs::path faulty = scratch("faulty");
    write_checkpoint(faulty / "cp.csv", bad, cp.lambda);
    std::ostringstream log;
    CHECK(cmd_verify(faulty / "cp.csv", small_config(""), log) == exit_code::verification);
    CHECK(fs::exists(faulty / kVerifyReport));

    const VerificationReport zero = verify_field(CylinderField(32, cp.field.nz, 12.0), cp.lambda, cfg);
    CHECK_FALSE(zero.find("limit_top")->pass);

    write_text(faulty / "corrupt.csv", "heterocyl-field v1\nnx,32\n");
    CHECK(cmd_verify(faulty / "corrupt.csv", small_config(""), log) == exit_code::usage);
    CHECK(cmd_verify(faulty / "absent.csv", small_config(""), log) == exit_code::usage);
}

TEST_CASE("euler export") {
    const fs::path& dir = solved_dir();
    const fs::path cp = dir / kCheckpointFile;
    const fs::path out = scratch("export");
    const RunConfig cfg = small_config(out);
    std::ostringstream log;

    REQUIRE(cmd_euler_export(cp, DomainKind::strip, {0.0, 1.0, -8.0, 8.0}, cfg, log) == exit_code::ok);
    std::string header;
    const auto strip = read_csv(out / "euler_strip_flow.csv", &header);
    CHECK(header == "x,z,u1,u2,p,div");
    CHECK(strip.size() == 33u * 513u);
    double dmax = 0.0;
    for (const auto& row : strip) dmax = std::max(dmax, std::abs(row[5]));
    CHECK(dmax <= 1e-12);
    CHECK(fs::exists(out / "euler_strip_theta.csv"));

    REQUIRE(cmd_euler_export(cp, DomainKind::plane, {-4.0, 4.0, -4.0, 4.0}, cfg, log) == exit_code::ok);
    const auto plane = read_csv(out / "euler_plane_flow.csv");
    // Rows are x-major on a symmetric grid: row (a, b) mirrors row (n - a, b).
    const std::size_t nz = 257, nxn = plane.size() / nz;
    REQUIRE(nxn * nz == plane.size());
    for (std::size_t a = 0; a < nxn; ++a) {
        for (std::size_t b = 0; b < nz; b += 16) {
            const auto& p = plane[a * nz + b];
            const auto& q = plane[(nxn - 1 - a) * nz + b];
            CHECK(p[0] == -q[0]);
            CHECK(p[2] == -q[2]);  // u1 = -d_z u is odd in x
            CHECK(p[3] == q[3]);   // u2 = d_x u is even in x
        }
    }

    REQUIRE(cmd_euler_export(cp, DomainKind::half_plane, {1.5, 2.5, -2.0, 2.0}, cfg, log) == exit_code::ok);
    int on_line = 0;
    for (const auto& row : read_csv(out / "euler_half_plane_flow.csv")) {
        if (row[0] == 2.0) {
            ++on_line;
            CHECK(row[2] == 0.0);
        }
    }
    CHECK(on_line == 129);

    CHECK(cmd_euler_export(cp, DomainKind::strip, {0.0, 1.5, -1.0, 1.0}, cfg, log) == exit_code::usage);
    CHECK(cmd_euler_export(cp, DomainKind::strip, {0.0, 1.0, -13.0, 1.0}, cfg, log) == exit_code::usage);
    CHECK(cmd_euler_export(cp, DomainKind::half_plane, {-1.0, 1.0, -1.0, 1.0}, cfg, log) == exit_code::usage);
    CHECK(cmd_euler_export(out / "absent.csv", DomainKind::strip, {0.0, 1.0, -1.0, 1.0}, cfg, log) ==
          exit_code::usage);
}

TEST_CASE("report summarises what is present") {
    std::ostringstream out;
    CHECK(cmd_report(small_config(""), out) == exit_code::usage);
    CHECK(cmd_report(small_config(scratch("empty")), out) == exit_code::usage);
    CHECK(cmd_report(small_config("/nonexistent/heterocyl"), out) == exit_code::usage);

    const fs::path& dir = solved_dir();
    std::ostringstream summary;
    CHECK(cmd_report(small_config(dir), summary) == exit_code::ok);
    CHECK(fs::exists(dir / kSummaryReport));
    CHECK(summary.str() == read_text(dir / kSummaryReport));
}
