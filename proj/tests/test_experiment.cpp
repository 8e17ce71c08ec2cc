#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "hdpa/errors.hpp"
#include "hdpa/experiment.hpp"

using namespace hdpa;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("hdpa_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::size_t count_data_rows(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        ++n;
    }
    return n;
}

#ifdef HDPA_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(HDPA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST_CASE("config file and overrides") {
    ExperimentConfig cfg;
    std::istringstream in("# comment\nscalar = 1f\nplan=pm4:3  # trailing\n\nprofile=high-bus\nseed=9\nnoise=0.5\n");
    apply_config_text(cfg, in);
    CHECK(cfg.scalar == "1f");
    CHECK(cfg.plan == "pm4:3");
    CHECK(cfg.profile == "high-bus");
    CHECK(cfg.seed == 9);
    CHECK(cfg.noise == 0.5);
    apply_config_value(cfg, "plan", "pm2");
    CHECK(cfg.plan == "pm2");

    std::istringstream bad_key("seed=1\ncolour=red\n");
    CHECK_THROWS_WITH_AS(apply_config_text(cfg, bad_key), "config line 2: unknown config key 'colour'", FormatError);
    std::istringstream bad_value("seed=-1\n");
    CHECK_THROWS_AS(apply_config_text(cfg, bad_value), FormatError);
    std::istringstream no_eq("seed\n");
    CHECK_THROWS_AS(apply_config_text(cfg, no_eq), FormatError);
    CHECK_THROWS_AS(apply_config_file(cfg, "/nonexistent/hdpa.cfg"), IoError);
}

TEST_CASE("plan selectors") {
    CHECK(resolve_plan("pm1") == plan_pm1());
    CHECK(resolve_plan("pm3") == plan_pm3());
    CHECK(resolve_plan("pm4:5") == mixed_plan_random(5, MixedStyle::PM4));
    CHECK(resolve_plan("pm5:5") == mixed_plan_random(5, MixedStyle::PM5));
    for (const char* bad : {"pm6", "pm4", "pm4:", "pm4:x", "pm1:2", ""}) CHECK_THROWS_AS(resolve_plan(bad), ValidationError);
    CHECK(sweep_selectors(2) == std::vector<std::string>{"pm1", "pm2", "pm3", "pm4:2", "pm5:2"});
}

TEST_CASE("points") {
    CHECK(resolve_point("base") == b233::generator());
    const auto& g = b233::generator();
    CHECK(resolve_point(g.x.to_hex() + "," + g.y.to_hex()) == g);
    CHECK_THROWS_AS(resolve_point(g.x.to_hex() + "," + g.x.to_hex()), ValidationError);
    CHECK_THROWS_AS(resolve_point("12"), FormatError);
}

TEST_CASE("cmd_kp") {
    ExperimentConfig cfg;
    cfg.scalar = "1";
    const auto& g = b233::generator();
    CHECK(cmd_kp(cfg) == "x=" + g.x.to_hex() + "\ny=" + g.y.to_hex() + "\n");
    cfg.scalar = "2";
    const auto d = affine_double(g);
    CHECK(cmd_kp(cfg) == "x=" + d.x.to_hex() + "\ny=" + d.y.to_hex() + "\n");
    cfg.scalar = b233::order().to_hex();
    CHECK(cmd_kp(cfg) == "infinity\n");
    cfg.scalar = "0";
    CHECK_THROWS_AS(cmd_kp(cfg), ValidationError);
}

TEST_CASE("cmd_trace: length, determinism, plan sensitivity") {
    TempDir dir("trace");
    ExperimentConfig cfg;
    cfg.scalar = "3fff1";
    cfg.out = dir.path / "a";
    const auto p1 = cmd_trace(cfg);
    const std::string first = read_file(p1);
    CHECK(count_data_rows(first) == 45 + (18 - 2) * 54 + postamble_cycles());
    cfg.out = dir.path / "b";
    CHECK(read_file(cmd_trace(cfg)) == first);

    cfg.plan = "pm2";
    std::istringstream a(first), b(read_file(cmd_trace(cfg)));
    CHECK(read_trace_csv(a).values != read_trace_csv(b).values);

    cfg.out = "/proc/hdpa-not-writable";
    CHECK_THROWS_AS(cmd_trace(cfg), IoError);
}

TEST_CASE("cmd_attack: report files") {
    TempDir dir("attack");
    ExperimentConfig cfg;
    cfg.profile = "high-bus";
    cfg.out = dir.path;
    const auto trace = cmd_trace(cfg);
    const auto o = cmd_attack(cfg, trace);
    CHECK(o.report.candidates.size() == 54);
    CHECK(o.report.sorted_folded.front() == 100);
    const std::string report = read_file(o.report_path);
    CHECK(count_data_rows(report) == 54);
    const std::string sorted = read_file(o.sorted_path);
    CHECK(cmd_attack(cfg, trace).report == o.report);
    CHECK(read_file(o.report_path) == report);
    CHECK(read_file(o.sorted_path) == sorted);

    std::istringstream in(report);
    const auto back = read_report_csv(in);
    CHECK(back.sorted_folded == o.report.sorted_folded);

    write_file_atomic(dir.path / "broken.csv", "cycle,power\n0,1\n1,?\n");
    CHECK_THROWS_WITH_AS(cmd_attack(cfg, dir.path / "broken.csv"),
                         doctest::Contains("line 3"), FormatError);
    cfg.scalar = "5";
    CHECK_THROWS_AS(cmd_attack(cfg, trace), ValidationError);
    CHECK_THROWS_AS(cmd_attack(cfg, dir.path / "missing.csv"), IoError);
}

TEST_CASE("cmd_sweep: cells, layout, reproducibility") {
    TempDir dir("sweep");
    ExperimentConfig cfg;
    cfg.scalar = "1ffe3f0a5";
    cfg.out = dir.path / "one";
    const auto r = cmd_sweep(cfg, 3);
    REQUIRE(r.ok());
    REQUIRE(r.cells.size() == 10);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& c : r.cells) {
        seen.insert({c.design, c.profile});
        CHECK(c.trace_length == r.cells[0].trace_length);
        REQUIRE(c.report);
        CHECK(c.report->candidates.size() == 54);
    }
    CHECK(seen.size() == 10);
    CHECK(count_data_rows(read_file(cfg.out / "sweep.csv")) == 540);
    CHECK(count_data_rows(read_file(cfg.out / "sweep_sorted.csv")) == 540);

    ExperimentConfig again = cfg;
    again.out = dir.path / "two";
    cmd_sweep(again, 1);
    for (const auto& entry : fs::recursive_directory_iterator(cfg.out)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), cfg.out);
        REQUIRE(fs::exists(again.out / rel));
        CHECK(read_file(entry.path()) == read_file(again.out / rel));
        CHECK(entry.path().extension() != ".tmp");
    }
}

TEST_CASE("cmd_sweep: failing cells are reported") {
    TempDir dir("sweep_fail");
    ExperimentConfig cfg;
    cfg.scalar = "3";  // too short for a slot layout
    cfg.out = dir.path;
    const auto r = cmd_sweep(cfg, 2);
    CHECK_FALSE(r.ok());
    for (const auto& c : r.cells) CHECK_FALSE(c.error.empty());
}

TEST_CASE("cmd_gc table") {
    ExperimentConfig cfg;
    const std::string t = cmd_gc(cfg);
    CHECK(t.find("pm1,\"classical(59)\",59,3481,3364,6845\n") != std::string::npos);
    CHECK(t == cmd_gc(cfg));
    cfg.plan_seed = 2;
    CHECK(t != cmd_gc(cfg));
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ValidationError("x")) == kExitValidation);
    CHECK(exit_code_for(PlanError("x")) == kExitValidation);
    CHECK(exit_code_for(DomainError("x")) == kExitValidation);
    CHECK(exit_code_for(FormatError("x")) == kExitFormat);
    CHECK(exit_code_for(IoError("x")) == kExitIo);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitOther);
}

#ifdef HDPA_CLI_PATH
TEST_CASE("command-line tool") {
    TempDir dir("cli");
    CHECK(run_cli("kp --scalar 2") == 0);
    CHECK(run_cli("kp --scalar 0") == kExitValidation);
    CHECK(run_cli("kp --scalar 0xzz") == kExitFormat);
    CHECK(run_cli("kp --plan pm7") == kExitValidation);
    CHECK(run_cli("trace --out /proc/hdpa-nope") == kExitIo);
    CHECK(run_cli("bogus") == kExitValidation);
    CHECK(run_cli("gc") == 0);

    const fs::path cfg = dir.path / "run.cfg";
    write_file_atomic(cfg, "scalar=7f3\nplan=pm3\nprofile=low-bus\nout=" + dir.path.string() + "\n");
    CHECK(run_cli("trace --config " + cfg.string() + " --plan pm2") == 0);
    CHECK(fs::exists(dir.path / "trace_pm2_low-bus.csv"));
    CHECK_FALSE(fs::exists(dir.path / "trace_pm3_low-bus.csv"));
    CHECK(run_cli("attack --config " + cfg.string() + " " + (dir.path / "trace_pm2_low-bus.csv").string()) == 0);
    CHECK(fs::exists(dir.path / "report_pm2_low-bus.csv"));
}
#endif
