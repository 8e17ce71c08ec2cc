#include "hdpa/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hdpa/errors.hpp"

namespace hdpa {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw FormatError(key + ": expected an unsigned integer, got '" + v + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw FormatError(key + ": expected a number, got '" + v + "'");
    return out;
}

// "pm4:7" -> "pm4-7"
std::string file_tag(std::string s) {
    std::replace(s.begin(), s.end(), ':', '-');
    return s;
}

}  // namespace

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "scalar")
        cfg.scalar = value;
    else if (key == "point")
        cfg.point = value;
    else if (key == "plan")
        cfg.plan = value;
    else if (key == "profile")
        cfg.profile = value;
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "noise")
        cfg.noise = parse_double(key, value);
    else if (key == "plan_seed")
        cfg.plan_seed = parse_u64(key, value);
    else if (key == "out")
        cfg.out = value;
    else
        throw FormatError("unknown config key '" + key + "'");
}

void apply_config_text(ExperimentConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
        try {
            apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const FormatError& e) {
            throw FormatError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_config_file(ExperimentConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    apply_config_text(cfg, in);
}

MultiplierPlan resolve_plan(const std::string& selector) {
    if (selector == "pm1") return plan_pm1();
    if (selector == "pm2") return plan_pm2();
    if (selector == "pm3") return plan_pm3();
    const auto colon = selector.find(':');
    const std::string head = selector.substr(0, colon);
    if ((head == "pm4" || head == "pm5") && colon != std::string::npos) {
        const std::string tail = selector.substr(colon + 1);
        std::uint64_t seed = 0;
        const auto r = std::from_chars(tail.data(), tail.data() + tail.size(), seed);
        if (!tail.empty() && r.ec == std::errc{} && r.ptr == tail.data() + tail.size())
            return mixed_plan_random(seed, head == "pm4" ? MixedStyle::PM4 : MixedStyle::PM5);
    }
    throw ValidationError("unknown plan selector '" + selector + "' (expected pm1|pm2|pm3|pm4:<seed>|pm5:<seed>)");
}

AffinePoint resolve_point(const std::string& text) {
    if (text == "base" || text == "B-233") return b233::generator();
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw FormatError("point must be 'base' or '<x hex>,<y hex>'");
    const AffinePoint p{FieldElement::from_hex(trim(text.substr(0, comma))),
                        FieldElement::from_hex(trim(text.substr(comma + 1))), false};
    if (!on_curve(p)) throw ValidationError("point is not on B-233");
    return p;
}

PowerProfile resolve_profile(const ExperimentConfig& cfg) {
    PowerProfile p = profile_by_name(cfg.profile);
    if (cfg.noise) p.noise_sigma = *cfg.noise;
    p.validate();
    return p;
}

std::vector<std::string> sweep_selectors(std::uint64_t plan_seed) {
    const std::string s = std::to_string(plan_seed);
    return {"pm1", "pm2", "pm3", "pm4:" + s, "pm5:" + s};
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path.string() + "'");
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cmd_kp(const ExperimentConfig& cfg) {
    const auto r = kp(Scalar::from_hex(cfg.scalar), resolve_point(cfg.point), resolve_plan(cfg.plan));
    if (r.point.infinity) return "infinity\n";
    return "x=" + r.point.x.to_hex() + "\ny=" + r.point.y.to_hex() + "\n";
}

PowerTrace make_trace(const ExperimentConfig& cfg) {
    const Scalar k = Scalar::from_hex(cfg.scalar);
    const MultiplierPlan plan = resolve_plan(cfg.plan);
    const PowerProfile profile = resolve_profile(cfg);
    auto run = kp(k, resolve_point(cfg.point), plan);
    PowerTrace t = simulate(run.log, profile, gate_complexity(plan, kPmWidth), cfg.seed);
    t.layout = run.layout;
    t.metadata.design = cfg.plan;
    t.metadata.plan = plan.to_string();
    return t;
}

fs::path cmd_trace(const ExperimentConfig& cfg) {
    const PowerTrace t = make_trace(cfg);
    std::ostringstream ss;
    write_trace_csv(ss, t);
    const fs::path path = cfg.out / ("trace_" + file_tag(cfg.plan) + "_" + cfg.profile + ".csv");
    write_file_atomic(path, ss.str());
    return path;
}

namespace {

AttackOutputs write_attack(const ExperimentConfig& cfg, const AttackReport& report, const std::string& stem) {
    AttackOutputs o{report, cfg.out / ("report_" + stem + ".csv"), cfg.out / ("sorted_" + stem + ".csv")};
    std::ostringstream r, s;
    write_report_csv(r, report);
    write_sorted_csv(s, report);
    write_file_atomic(o.report_path, r.str());
    write_file_atomic(o.sorted_path, s.str());
    return o;
}

}  // namespace

AttackOutputs cmd_attack(const ExperimentConfig& cfg, const fs::path& trace_path) {
    std::istringstream in(read_file(trace_path));
    PowerTrace t;
    try {
        t = read_trace_csv(in);
    } catch (const FormatError& e) {
        throw FormatError(trace_path.string() + ": " + e.what());
    }
    std::string stem = trace_path.stem().string();
    if (stem.rfind("trace_", 0) == 0) stem.erase(0, 6);
    return write_attack(cfg, run_attack(t, Scalar::from_hex(cfg.scalar)), stem);
}

bool SweepResult::ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.error.empty(); });
}

SweepResult cmd_sweep(const ExperimentConfig& cfg, unsigned threads) {
    const Scalar k = Scalar::from_hex(cfg.scalar);
    SweepResult result;
    for (const auto& sel : sweep_selectors(cfg.plan_seed))
        for (const auto& [name, profile] : profile_library()) result.cells.push_back({sel, name, {}, 0, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < result.cells.size();) {
            SweepCell& cell = result.cells[i];
            try {
                ExperimentConfig c = cfg;
                c.plan = cell.design;
                c.profile = cell.profile;
                const PowerTrace t = make_trace(c);
                cell.trace_length = t.size();
                const std::string stem = file_tag(cell.design) + "_" + cell.profile;
                c.out = cfg.out / "cells";
                std::ostringstream ss;
                write_trace_csv(ss, t);
                write_file_atomic(c.out / ("trace_" + stem + ".csv"), ss.str());
                cell.report = write_attack(c, run_attack(t, k), stem).report;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(result.cells.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream all, sorted;
    all << "design,profile,j,delta_folded\n";
    sorted << "design,profile,rank,delta_folded\n";
    for (const auto& cell : result.cells) {
        if (!cell.report) continue;
        for (const auto& c : cell.report->candidates)
            all << cell.design << ',' << cell.profile << ',' << c.j << ',' << format_double(c.score.delta_folded) << '\n';
        std::size_t rank = 1;
        for (double v : cell.report->sorted_folded)
            sorted << cell.design << ',' << cell.profile << ',' << rank++ << ',' << format_double(v) << '\n';
    }
    write_file_atomic(cfg.out / "sweep.csv", all.str());
    write_file_atomic(cfg.out / "sweep_sorted.csv", sorted.str());
    return result;
}

std::string cmd_gc(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "design,plan,width,and,xor,total\n";
    for (const auto& sel : sweep_selectors(cfg.plan_seed)) {
        const MultiplierPlan plan = resolve_plan(sel);
        const GateComplexity pm = gate_complexity(plan, kPmWidth);
        const GateComplexity field = field_gate_complexity(plan);
        out << sel << ",\"" << plan.to_string() << "\"," << kPmWidth << ',' << pm.and_count << ',' << pm.xor_count << ','
            << pm.total() << '\n';
        out << sel << ",field," << FieldElement::kDegree << ',' << field.and_count << ',' << field.xor_count << ','
            << field.total() << '\n';
    }
    return out.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const FormatError*>(&e)) return kExitFormat;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const DomainError*>(&e))
        return kExitValidation;
    return kExitOther;
}

}  // namespace hdpa
