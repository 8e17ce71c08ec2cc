#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdpa/attack.hpp"
#include "hdpa/ladder.hpp"
#include "hdpa/polymul.hpp"
#include "hdpa/powersim.hpp"

namespace hdpa {

// B-233 base-point x with bit 232 set: a fixed, published 233-bit scalar.
inline constexpr const char* kDefaultScalarHex = "1fac9dfcbac8313bb2139f1bb755fef65bc391f8b36f8f8eb7371fd558b";

struct ExperimentConfig {
    std::string scalar = kDefaultScalarHex;
    std::string point = "base";  // "base" or "<x hex>,<y hex>"
    std::string plan = "pm1";    // pm1|pm2|pm3|pm4:<seed>|pm5:<seed>
    std::string profile = "low-bus";
    std::uint64_t seed = 0;          // noise seed
    std::optional<double> noise;     // overrides the profile's noise_sigma
    std::uint64_t plan_seed = 1;     // seed of pm4/pm5 in sweeps
    std::filesystem::path out = ".";
};

// Flat "key=value" lines; '#' starts a comment. Unknown keys and bad values
// throw FormatError naming the line.
void apply_config_text(ExperimentConfig& cfg, std::istream& in);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
// Single key=value assignment, used by both the file reader and flags.
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Throws ValidationError for unknown selectors.
MultiplierPlan resolve_plan(const std::string& selector);
AffinePoint resolve_point(const std::string& text);
PowerProfile resolve_profile(const ExperimentConfig& cfg);
std::vector<std::string> sweep_selectors(std::uint64_t plan_seed);

// Writes to a sibling temporary and renames over `path`; throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// Lowercase hex of x and y, or "infinity".
std::string cmd_kp(const ExperimentConfig& cfg);

PowerTrace make_trace(const ExperimentConfig& cfg);
// Returns the written trace path.
std::filesystem::path cmd_trace(const ExperimentConfig& cfg);

struct AttackOutputs {
    AttackReport report;
    std::filesystem::path report_path;
    std::filesystem::path sorted_path;
};
AttackOutputs cmd_attack(const ExperimentConfig& cfg, const std::filesystem::path& trace_path);

struct SweepCell {
    std::string design;
    std::string profile;
    std::optional<AttackReport> report;
    std::size_t trace_length = 0;
    std::string error;  // empty on success
};

struct SweepResult {
    std::vector<SweepCell> cells;  // selector-major, profile-minor
    bool ok() const;
};

// All sweep selectors x all library profiles, cells run concurrently. Writes
// per-cell trace/report files plus sweep.csv and sweep_sorted.csv.
SweepResult cmd_sweep(const ExperimentConfig& cfg, unsigned threads = 0);

std::string cmd_gc(const ExperimentConfig& cfg);

// Exit status for an exception escaping a command.
int exit_code_for(const std::exception& e);
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitFormat = 3;
inline constexpr int kExitIo = 4;

}  // namespace hdpa
