#include "hdpa/powersim.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "hdpa/errors.hpp"

namespace hdpa {

std::size_t hamming_weight(std::uint64_t v) { return static_cast<std::size_t>(std::popcount(v)); }
std::size_t hamming_weight(const BitPoly& v) { return v.popcount(); }
std::size_t hamming_weight(const FieldElement& v) { return v.popcount(); }

std::size_t hamming_distance(std::uint64_t a, std::uint64_t b) { return hamming_weight(a ^ b); }

std::size_t hamming_distance(const BitPoly& a, const BitPoly& b) {
    if (a.width() != b.width())
        throw ArgumentError("hamming_distance: widths " + std::to_string(a.width()) + " and " +
                            std::to_string(b.width()) + " differ");
    return (a ^ b).popcount();
}

std::size_t hamming_distance(const FieldElement& a, const FieldElement& b) { return add(a, b).popcount(); }

void PowerProfile::validate() const {
    const double params[] = {weight_register, weight_bus, weight_pm, weight_alu, baseline, noise_sigma, pm_gc_scale};
    for (double p : params) {
        if (!std::isfinite(p) || p < 0) throw ValidationError("profile '" + name + "': parameters must be finite and >= 0");
    }
}

const std::map<std::string, PowerProfile>& profile_library() {
    static const std::map<std::string, PowerProfile> lib = [] {
        std::map<std::string, PowerProfile> m;
        // Bus activity drowned by the multiplier and register file.
        PowerProfile low{"low-bus", 1.0, 0.05, 1.0, 0.5, 100.0, 0.0, 1.0};
        // Bus lines dominate the cycle power.
        PowerProfile high{"high-bus", 1.0, 4.0, 0.3, 0.5, 100.0, 0.0, 1.0};
        m.emplace(low.name, low);
        m.emplace(high.name, high);
        return m;
    }();
    return lib;
}

const PowerProfile& profile_by_name(const std::string& name) {
    const auto& lib = profile_library();
    const auto it = lib.find(name);
    if (it == lib.end()) throw ValidationError("unknown profile '" + name + "'");
    return it->second;
}

double pm_scale_factor(const PowerProfile& profile, const GateComplexity& plan_gc) {
    static const double classical = static_cast<double>(gate_complexity(plan_pm1(), kPmWidth).total());
    if (plan_gc.total() == 0) return 0.0;
    return std::pow(static_cast<double>(plan_gc.total()) / classical, profile.pm_gc_scale);
}

std::vector<CycleActivity> tally_activity(const ActivityLog& log) {
    std::vector<CycleActivity> out(log.size());
    FieldElement bus;
    PmOperands pm;
    AluEvent alu{};
    for (std::size_t c = 0; c < log.size(); ++c) {
        const CycleRecord& rec = log.cycles[c];
        CycleActivity& a = out[c];
        for (const auto& w : rec.writes) a.register_flips += hamming_distance(w.before, w.after);
        if (rec.bus) {
            a.bus_toggles = hamming_distance(bus, *rec.bus);
            bus = *rec.bus;
        }
        if (rec.pm) {
            a.pm_toggles = hamming_distance(pm.a, rec.pm->a) + hamming_distance(pm.b, rec.pm->b);
            pm = *rec.pm;
        }
        for (const auto& e : rec.alu) {
            a.alu_flips += hamming_distance(alu.lhs, e.lhs) + hamming_distance(alu.rhs, e.rhs);
            alu = e;
        }
    }
    return out;
}

namespace {

// Box-Muller on raw 64-bit draws; std::normal_distribution is not portable
// across standard libraries.
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;          // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 rng_;
    std::optional<double> spare_;
};

}  // namespace

PowerTrace simulate(const ActivityLog& log, const PowerProfile& profile, const GateComplexity& plan_gc,
                    std::uint64_t seed) {
    profile.validate();
    const double pm_weight = profile.weight_pm * pm_scale_factor(profile, plan_gc);
    PowerTrace trace;
    trace.metadata.profile = profile.name;
    trace.metadata.seed = seed;
    trace.values.reserve(log.size());
    GaussianSource noise(seed);
    for (const auto& a : tally_activity(log)) {
        double v = profile.baseline + profile.weight_register * static_cast<double>(a.register_flips) +
                   profile.weight_bus * static_cast<double>(a.bus_toggles) +
                   pm_weight * static_cast<double>(a.pm_toggles) +
                   profile.weight_alu * static_cast<double>(a.alu_flips);
        if (profile.noise_sigma > 0) v = std::max(0.0, v + profile.noise_sigma * noise.next());
        trace.values.push_back(v);
    }
    return trace;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void format_fail(std::size_t line_no, const std::string& what) {
    throw FormatError("line " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_u64(std::string_view s, std::size_t line_no) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
        format_fail(line_no, "expected an unsigned integer, got '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size())
        format_fail(line_no, "expected a number, got '" + std::string(s) + "'");
    return v;
}

}  // namespace

void write_metadata(std::ostream& out, const TraceMetadata& meta, const std::optional<ScheduleLayout>& layout) {
    out << "# design=" << meta.design << '\n'
        << "# plan=" << meta.plan << '\n'
        << "# profile=" << meta.profile << '\n'
        << "# seed=" << meta.seed << '\n';
    if (layout) {
        out << "# l=" << layout->scalar_length << '\n'
            << "# init_cycles=" << ScheduleLayout::kInitSlotCycles << '\n'
            << "# slot_cycles=" << ScheduleLayout::kMainSlotCycles << '\n'
            << "# slots=" << layout->slot_count << '\n'
            << "# postamble_cycles=" << layout->postamble_cycles << '\n';
    }
}

void read_metadata_line(std::string_view body, std::size_t line_no, TraceMetadata& meta,
                        std::optional<ScheduleLayout>& layout) {
    body = trim(body);
    if (body.empty()) return;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) format_fail(line_no, "metadata line without '='");
    const std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    auto ensure_layout = [&]() -> ScheduleLayout& {
        if (!layout) layout.emplace();
        return *layout;
    };
    if (key == "design") {
        meta.design = value;
    } else if (key == "plan") {
        meta.plan = value;
    } else if (key == "profile") {
        meta.profile = value;
    } else if (key == "seed") {
        meta.seed = parse_u64(value, line_no);
    } else if (key == "l") {
        ensure_layout().scalar_length = parse_u64(value, line_no);
    } else if (key == "slots") {
        ensure_layout().slot_count = parse_u64(value, line_no);
    } else if (key == "postamble_cycles") {
        ensure_layout().postamble_cycles = parse_u64(value, line_no);
    } else if (key == "init_cycles") {
        if (parse_u64(value, line_no) != ScheduleLayout::kInitSlotCycles) format_fail(line_no, "unsupported init_cycles");
    } else if (key == "slot_cycles") {
        if (parse_u64(value, line_no) != ScheduleLayout::kMainSlotCycles) format_fail(line_no, "unsupported slot_cycles");
    }
    // Unknown keys are carried by newer writers; ignore them.
}

void write_trace_csv(std::ostream& out, const PowerTrace& trace) {
    write_metadata(out, trace.metadata, trace.layout);
    out << "cycle,power\n";
    for (std::size_t c = 0; c < trace.values.size(); ++c) out << c << ',' << format_double(trace.values[c]) << '\n';
    if (!out) throw IoError("failed writing trace");
}

PowerTrace read_trace_csv(std::istream& in) {
    PowerTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view s = trim(line);
        if (!header) {
            if (s.empty()) continue;
            if (s.front() == '#') {
                read_metadata_line(s.substr(1), line_no, trace.metadata, trace.layout);
                continue;
            }
            if (s != "cycle,power") format_fail(line_no, "expected header 'cycle,power'");
            header = true;
            continue;
        }
        if (s.empty()) continue;
        const auto comma = s.find(',');
        if (comma == std::string_view::npos || s.find(',', comma + 1) != std::string_view::npos)
            format_fail(line_no, "expected two fields");
        const std::uint64_t cycle = parse_u64(trim(s.substr(0, comma)), line_no);
        if (cycle != trace.values.size())
            format_fail(line_no, "cycle " + std::to_string(cycle) + " out of sequence");
        const double v = parse_double(trim(s.substr(comma + 1)), line_no);
        if (!std::isfinite(v)) format_fail(line_no, "non-finite power value");
        trace.values.push_back(v);
    }
    if (!header) format_fail(line_no, "missing 'cycle,power' header");
    if (trace.layout) {
        const auto& l = *trace.layout;
        if (l.scalar_length < 3 || l.slot_count != l.scalar_length - 2)
            throw FormatError("inconsistent layout metadata (l=" + std::to_string(l.scalar_length) +
                              ", slots=" + std::to_string(l.slot_count) + ")");
    }
    return trace;
}

}  // namespace hdpa
