#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hdpa/ladder.hpp"
#include "hdpa/powersim.hpp"

namespace hdpa {

// Key guess in processing order: entry t is the guess for key bit l-3-t.
using KeyBits = std::vector<std::uint8_t>;

/// Main-loop part of a trace, one row per slot (temporal order) and one
/// column per clock cycle within the slot.
struct SlotMatrix {
    static constexpr std::size_t kColumns = ScheduleLayout::kMainSlotCycles;

    std::size_t rows = 0;
    std::vector<double> values;         // row-major, rows * kColumns
    std::vector<std::size_t> key_bit;   // key-bit index processed by each row

    double at(std::size_t row, std::size_t col) const { return values[row * kColumns + col]; }
};

using MeanSlot = std::vector<double>;  // kColumns entries

// Throws FormatError when the trace has no layout or is shorter than it.
SlotMatrix fragment(const PowerTrace& trace);
// Column means accumulated in ascending row order; ArgumentError when empty.
MeanSlot mean_slot(const SlotMatrix& m);
// candidate[j][t] = 1 iff mean[j] >= m.at(t, j).
std::vector<KeyBits> derive_candidates(const SlotMatrix& m, const MeanSlot& mean);

struct Correctness {
    double delta_raw = 0;     // percent of bits matching
    double delta_folded = 0;  // 50 + |50 - delta_raw|
    friend bool operator==(const Correctness&, const Correctness&) = default;
};

// Compares against k_{l-3}..k_0; ArgumentError unless candidate.size() == l-2.
Correctness correctness(const KeyBits& candidate, const Scalar& k);
double fold(double delta_raw);

struct CandidateResult {
    std::size_t j = 0;  // 1-based cycle within the slot
    KeyBits bits;
    Correctness score;
    friend bool operator==(const CandidateResult&, const CandidateResult&) = default;
};

struct AttackReport {
    std::vector<CandidateResult> candidates;  // j = 1..54
    std::size_t best_j = 0;                   // max folded correctness, lowest j on ties
    std::vector<double> sorted_folded;        // non-increasing
    TraceMetadata metadata;
    std::optional<ScheduleLayout> layout;
    friend bool operator==(const AttackReport&, const AttackReport&) = default;
};

// ValidationError when k does not match the trace's scalar length.
AttackReport run_attack(const PowerTrace& trace, const Scalar& k);

// "j,delta_raw,delta_folded", one row per candidate.
void write_report_csv(std::ostream& out, const AttackReport& report);
// "rank,j,delta_folded" in sorted order.
void write_sorted_csv(std::ostream& out, const AttackReport& report);
// Rebuilds scores and ordering; candidate bits are not stored in the file.
AttackReport read_report_csv(std::istream& in);

}  // namespace hdpa
