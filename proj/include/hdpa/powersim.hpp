#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdpa/bitpoly.hpp"
#include "hdpa/field.hpp"
#include "hdpa/ladder.hpp"
#include "hdpa/polymul.hpp"

namespace hdpa {

std::size_t hamming_weight(std::uint64_t v);
std::size_t hamming_weight(const BitPoly& v);
std::size_t hamming_weight(const FieldElement& v);
std::size_t hamming_distance(std::uint64_t a, std::uint64_t b);
// Throws ArgumentError when the declared widths differ.
std::size_t hamming_distance(const BitPoly& a, const BitPoly& b);
std::size_t hamming_distance(const FieldElement& a, const FieldElement& b);

/// Block-level leakage weights. Power units are arbitrary.
struct PowerProfile {
    std::string name;
    double weight_register = 1.0;  // per flipped register bit
    double weight_bus = 1.0;       // per toggled bus line
    double weight_pm = 1.0;        // per PM input toggle, before gate-count scaling
    double weight_alu = 1.0;       // per ALU operand bit flip
    double baseline = 0.0;
    double noise_sigma = 0.0;
    // Exponent applied to gc(plan) / gc(classical); 0 disables the scaling.
    double pm_gc_scale = 1.0;

    // Throws ValidationError for negative or non-finite parameters.
    void validate() const;
};

// "low-bus" and "high-bus".
const std::map<std::string, PowerProfile>& profile_library();
// Throws ValidationError for unknown names.
const PowerProfile& profile_by_name(const std::string& name);

double pm_scale_factor(const PowerProfile& profile, const GateComplexity& plan_gc);

// Raw switching counts of one cycle; the power value is affine in these.
struct CycleActivity {
    std::size_t register_flips = 0;
    std::size_t bus_toggles = 0;
    std::size_t pm_toggles = 0;
    std::size_t alu_flips = 0;
};

// Bus lines and PM/ALU inputs hold their last value through idle cycles;
// everything starts at zero.
std::vector<CycleActivity> tally_activity(const ActivityLog& log);

struct TraceMetadata {
    std::string design;
    std::string plan;
    std::string profile;
    std::uint64_t seed = 0;
    friend bool operator==(const TraceMetadata&, const TraceMetadata&) = default;
};

struct PowerTrace {
    std::vector<double> values;
    std::optional<ScheduleLayout> layout;
    TraceMetadata metadata;

    std::size_t size() const { return values.size(); }
    friend bool operator==(const PowerTrace&, const PowerTrace&) = default;
};

/// One power value per clock cycle:
///   baseline + w_reg*flips + w_bus*toggles + w_pm*s*pm_toggles + w_alu*alu_flips
/// with s = pm_scale_factor(profile, plan_gc), plus optional Gaussian noise
/// drawn from mt19937_64(seed) and clamped at zero. `plan_gc` is the
/// partial multiplier's own gate complexity at width 59.
PowerTrace simulate(const ActivityLog& log, const PowerProfile& profile, const GateComplexity& plan_gc,
                    std::uint64_t seed = 0);

// "# key=value" block shared by trace and report files.
void write_metadata(std::ostream& out, const TraceMetadata& meta, const std::optional<ScheduleLayout>& layout);
// Consumes one comment line (without the leading '#'); throws FormatError.
void read_metadata_line(std::string_view body, std::size_t line_no, TraceMetadata& meta,
                        std::optional<ScheduleLayout>& layout);

// CSV with a "# key=value" metadata block and a "cycle,power" header. Values
// use 17 significant digits, so reading back is exact.
void write_trace_csv(std::ostream& out, const PowerTrace& trace);
// Throws FormatError naming the offending line.
PowerTrace read_trace_csv(std::istream& in);

std::string format_double(double v);

}  // namespace hdpa
