#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdpa/field.hpp"
#include "hdpa/polymul.hpp"

namespace hdpa {

/// Nonzero scalar of at most 233 bits; length() is the position of the most
/// significant set bit plus one (l).
class Scalar {
  public:
    // Throws ValidationError for zero, FormatError for bad hex.
    static Scalar from_hex(std::string_view hex);
    static Scalar from_bits(const FieldElement& bits);
    static Scalar from_u64(std::uint64_t v);

    std::size_t length() const { return length_; }
    bool bit(std::size_t i) const { return bits_.bit(i); }
    const FieldElement& bits() const { return bits_; }
    std::string to_hex() const;  // minimal digits, no prefix

    friend bool operator==(const Scalar&, const Scalar&) = default;

  private:
    FieldElement bits_;
    std::size_t length_ = 0;
};

struct AffinePoint {
    FieldElement x;
    FieldElement y;
    bool infinity = false;

    static AffinePoint at_infinity() { return {{}, {}, true}; }
    friend bool operator==(const AffinePoint&, const AffinePoint&) = default;
};

// sect233r1 / NIST B-233: y^2 + xy = x^3 + x^2 + b.
namespace b233 {
const FieldElement& b();
const AffinePoint& generator();
const Scalar& order();
}  // namespace b233

bool on_curve(const AffinePoint& p);
AffinePoint negate(const AffinePoint& p);
AffinePoint affine_double(const AffinePoint& p);
AffinePoint affine_add(const AffinePoint& p, const AffinePoint& q);

// MSB-first double-and-add in affine coordinates; no scheduling, no log.
AffinePoint reference_double_and_add(const Scalar& k, const AffinePoint& p);

// Lopez-Dahab x-only ladder pair: (X1:Z1) = mP, (X2:Z2) = (m+1)P.
struct LadderState {
    FieldElement x1, z1, x2, z2;
    friend bool operator==(const LadderState&, const LadderState&) = default;
};

struct ScheduleLayout {
    static constexpr std::size_t kInitSlotCycles = 45;
    static constexpr std::size_t kMainSlotCycles = 54;
    static constexpr std::size_t kMultsPerSlot = 6;
    static constexpr std::size_t kCyclesPerMult = 9;
    static_assert(kMainSlotCycles == kMultsPerSlot * kCyclesPerMult);

    std::size_t scalar_length = 0;  // l
    std::size_t slot_count = 0;     // l - 2
    std::size_t postamble_cycles = 0;

    std::size_t init_start() const { return 0; }
    std::size_t main_start() const { return kInitSlotCycles; }
    std::size_t slot_start(std::size_t t) const { return main_start() + t * kMainSlotCycles; }
    std::size_t main_cycles() const { return slot_count * kMainSlotCycles; }
    std::size_t postamble_start() const { return main_start() + main_cycles(); }
    std::size_t total_cycles() const { return postamble_start() + postamble_cycles; }
    // Key bit processed by main slot t (MSB first).
    std::size_t key_bit_of_slot(std::size_t t) const { return scalar_length - 3 - t; }

    friend bool operator==(const ScheduleLayout&, const ScheduleLayout&) = default;
};

// Cycles of the affine conversion after the main loop (one inversion chain
// plus the y-recovery products); independent of the scalar.
std::size_t postamble_cycles();

// Throws ValidationError when l < 3.
ScheduleLayout layout_of(const Scalar& k);

// ---------------------------------------------------------------------------
// Activity log

enum class Reg : std::uint8_t {
    X1, Z1, X2, Z2, XP, YP, B,
    T1, T2, T3, T4, T5,
    S1, S2, S3, S4, S5,
    Q1, Q2, Q3, Z12, U, V, W, N, Inv, XR, YR,
    Count
};
std::string_view to_string(Reg r);

enum class Phase : std::uint8_t { Init, Main, Post };
std::string_view to_string(Phase p);

struct RegisterWrite {
    Reg reg;
    FieldElement before;
    FieldElement after;
};

struct AluEvent {
    FieldElement lhs;
    FieldElement rhs;  // zero for squaring
};

struct CycleRecord {
    std::uint32_t cycle = 0;
    Phase phase = Phase::Init;
    std::int32_t slot = -1;     // main-loop slot index, -1 outside the main loop
    std::int32_t key_bit = -1;  // key-bit index processed, -1 if none
    std::string op;             // key-independent micro-op signature
    std::vector<RegisterWrite> writes;
    std::optional<FieldElement> bus;  // value driven onto the shared bus
    std::optional<PmOperands> pm;     // partial-multiplier inputs this cycle
    std::vector<AluEvent> alu;
};

struct ActivityLog {
    std::vector<CycleRecord> cycles;
    std::size_t size() const { return cycles.size(); }
};

// One line per cycle; diagnostic only.
void write_activity_log(std::ostream& out, const ActivityLog& log);

// ---------------------------------------------------------------------------

// One main-loop iteration (six field multiplications through `plan`).
LadderState ladder_step(const LadderState& state, bool key_bit, const FieldElement& x_p, const FieldElement& b,
                        const MultiplierPlan& plan, std::size_t* mult_count = nullptr);

// Ladder state after the initialization slot has processed k_{l-2}.
LadderState ladder_init(bool second_bit, const FieldElement& x_p, const FieldElement& b, const MultiplierPlan& plan,
                        std::size_t* mult_count = nullptr);

struct KpResult {
    AffinePoint point;
    ActivityLog log;
    std::optional<ScheduleLayout> layout;  // absent when l < 3
};

/// k*P with the cycle-scheduled Montgomery ladder.
///
/// The MSB is absorbed by initialization, k_{l-2} runs in the 45-cycle init
/// slot, k_{l-3}..k_0 in 54-cycle main slots, and the affine conversion in a
/// fixed-length postamble. Throws ValidationError for P off the curve, P at
/// infinity or with x = 0.
KpResult kp(const Scalar& k, const AffinePoint& p, const MultiplierPlan& plan);

}  // namespace hdpa
