// hdpa: kP, power traces, horizontal DPA and the multiplier sweep.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hdpa/errors.hpp"
#include "hdpa/experiment.hpp"

using namespace hdpa;

namespace {

struct Flags {
    std::string config, scalar, point, plan, profile, seed, noise, plan_seed, out;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "flat key=value file; flags override it");
    cmd->add_option("--scalar", f.scalar, "scalar k in hex");
    cmd->add_option("--point", f.point, "'base' or '<x hex>,<y hex>'");
    cmd->add_option("--plan", f.plan, "pm1|pm2|pm3|pm4:<seed>|pm5:<seed>");
    cmd->add_option("--profile", f.profile, "leakage profile (low-bus|high-bus)");
    cmd->add_option("--seed", f.seed, "noise seed");
    cmd->add_option("--noise", f.noise, "Gaussian noise sigma, overrides the profile");
    cmd->add_option("--plan-seed", f.plan_seed, "seed of pm4/pm5 in sweep and gc");
    cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig build_config(const Flags& f) {
    ExperimentConfig cfg;
    if (!f.config.empty()) apply_config_file(cfg, f.config);
    const std::pair<const char*, const std::string*> flags[] = {
        {"scalar", &f.scalar}, {"point", &f.point}, {"plan", &f.plan},           {"profile", &f.profile},
        {"seed", &f.seed},     {"noise", &f.noise}, {"plan_seed", &f.plan_seed}, {"out", &f.out}};
    for (const auto& [key, value] : flags)
        if (!value->empty()) apply_config_value(cfg, key, *value);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Horizontal DPA study of a B-233 Montgomery-ladder kP design"};
    app.require_subcommand(1);
    Flags flags;
    std::string trace_path;
    unsigned threads = 0;

    auto* kp_cmd = app.add_subcommand("kp", "print k*P");
    auto* trace_cmd = app.add_subcommand("trace", "simulate a power trace of k*P");
    auto* attack_cmd = app.add_subcommand("attack", "difference-of-means attack on a trace file");
    auto* sweep_cmd = app.add_subcommand("sweep", "all designs x all profiles");
    auto* gc_cmd = app.add_subcommand("gc", "gate-complexity table");
    for (auto* c : {kp_cmd, trace_cmd, attack_cmd, sweep_cmd, gc_cmd}) add_common(c, flags);
    attack_cmd->add_option("trace", trace_path, "trace CSV")->required();
    sweep_cmd->add_option("--threads", threads, "worker threads (default: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        const ExperimentConfig cfg = build_config(flags);
        if (*kp_cmd) {
            std::cout << cmd_kp(cfg);
        } else if (*trace_cmd) {
            std::cout << cmd_trace(cfg).string() << '\n';
        } else if (*attack_cmd) {
            const auto o = cmd_attack(cfg, trace_path);
            const auto& best = o.report.candidates[o.report.best_j - 1];
            std::cout << o.report_path.string() << '\n'
                      << o.sorted_path.string() << '\n'
                      << "best j=" << best.j << " delta_folded=" << format_double(best.score.delta_folded) << '\n';
        } else if (*sweep_cmd) {
            const auto r = cmd_sweep(cfg, threads);
            for (const auto& cell : r.cells) {
                std::cout << cell.design << ' ' << cell.profile << ' ';
                if (cell.error.empty())
                    std::cout << "best j=" << cell.report->best_j
                              << " delta_folded=" << format_double(cell.report->sorted_folded.front()) << '\n';
                else
                    std::cout << "FAILED: " << cell.error << '\n';
            }
            if (!r.ok()) return kExitOther;
        } else if (*gc_cmd) {
            std::cout << cmd_gc(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "hdpa: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}
