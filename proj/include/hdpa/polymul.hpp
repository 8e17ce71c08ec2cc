#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hdpa/bitpoly.hpp"
#include "hdpa/field.hpp"

namespace hdpa {

// Atomic formulae a plan leaf may name. Karatsuba2 and Winograd3 leaves are
// one level of the formula over schoolbook sub-products.
enum class Method { Classical, Karatsuba2, Winograd3 };

// Segmentations of an internal plan node; the value is the partial-product
// count the node needs.
enum class Segmentation { Karatsuba2, Winograd3, Classical2 };

std::string_view to_string(Method m);
std::string_view to_string(Segmentation s);
std::size_t segment_count(Segmentation s);
std::size_t partial_product_count(Segmentation s);
std::size_t partial_product_count(Method m);  // 1 for Classical

struct GateComplexity {
    std::uint64_t and_count = 0;
    std::uint64_t xor_count = 0;

    std::uint64_t total() const { return and_count + xor_count; }
    GateComplexity& operator+=(const GateComplexity& o) {
        and_count += o.and_count;
        xor_count += o.xor_count;
        return *this;
    }
    friend bool operator==(const GateComplexity&, const GateComplexity&) = default;
};

/// Width of each sub-operand when splitting n bits into k segments: the low
/// k-1 segments take ceil(n/k) bits and the top segment the remainder; the
/// top segment is zero-extended so every partial product sees equal widths.
std::size_t segment_width(std::size_t n, std::size_t k);
// Whether a k-way split of n bits leaves a non-empty top segment.
bool splittable(std::size_t n, std::size_t k);

/// Recursive partial-multiplication formula. Immutable after construction;
/// factories validate and throw PlanError.
class MultiplierPlan {
  public:
    static MultiplierPlan leaf(Method method, std::size_t width);
    static MultiplierPlan split(Segmentation seg, std::size_t width, std::vector<MultiplierPlan> children);
    // Inverse of to_string(), e.g. "karatsuba2(59)[classical(30),classical(30),winograd3(30)]".
    static MultiplierPlan parse(std::string_view text);

    bool is_leaf() const { return leaf_; }
    Method method() const { return method_; }
    Segmentation segmentation() const { return segmentation_; }
    std::size_t width() const { return width_; }
    const std::vector<MultiplierPlan>& children() const { return children_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

    std::string to_string() const;

    friend bool operator==(const MultiplierPlan&, const MultiplierPlan&) = default;

  private:
    MultiplierPlan() = default;

    bool leaf_ = true;
    Method method_ = Method::Classical;
    Segmentation segmentation_ = Segmentation::Karatsuba2;
    std::size_t width_ = 0;
    std::vector<MultiplierPlan> children_;
};

struct MulResult {
    BitPoly product;      // width 2n - 1
    GateComplexity gates;  // instrumented during evaluation
};

// Largest operand width the multipliers accept (products must fit BitPoly).
inline constexpr std::size_t kMaxOperandWidth = 256;

MulResult classical_mul(const BitPoly& a, const BitPoly& b);
MulResult karatsuba2_mul(const BitPoly& a, const BitPoly& b);
MulResult winograd3_mul(const BitPoly& a, const BitPoly& b);

// Evaluate a product through the plan tree. Operand widths must equal the
// plan width.
MulResult pm_apply(const MultiplierPlan& plan, const BitPoly& a, const BitPoly& b);

// Closed-form AND/XOR count of one multiplication under the plan, computed
// without evaluating it. Throws PlanError if n differs from the plan width.
GateComplexity gate_complexity(const MultiplierPlan& plan, std::size_t n);

// ---------------------------------------------------------------------------
// The 233-bit field multiplier: 4 segments, two nested Karatsuba levels, nine
// partial products executed one per clock cycle on a 59-bit partial multiplier.

inline constexpr std::size_t kPmWidth = 59;
inline constexpr std::size_t kTopSegmentWidth = 56;
inline constexpr std::size_t kFieldJobs = 9;

struct SegmentedOperand {
    // segments[0] = A_0 (least significant) ... segments[3] = A_3 (56 bits).
    std::array<std::uint64_t, 4> segments{};

    static constexpr std::size_t width(std::size_t index) { return index == 3 ? kTopSegmentWidth : kPmWidth; }
    friend bool operator==(const SegmentedOperand&, const SegmentedOperand&) = default;
};

SegmentedOperand seg4_split(const FieldElement& a);
FieldElement seg4_join(const SegmentedOperand& s);

// One partial-product job. The operand of the job is the XOR of the segments
// named in segment_mask (bit i = A_i), and likewise for B.
struct PmJob {
    std::size_t group = 0;   // outer Karatsuba product: 0 low halves, 1 high halves, 2 sums
    std::size_t member = 0;  // inner Karatsuba product: 0 low, 1 high, 2 sum
    std::uint8_t segment_mask = 0;
    friend bool operator==(const PmJob&, const PmJob&) = default;
};

// Fixed job order: group major, member minor. Job i runs in cycle i of the
// field multiplication. Throws PlanError unless plan.width() == 59.
std::vector<PmJob> seg4_schedule(const MultiplierPlan& plan);

struct PmOperands {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    friend bool operator==(const PmOperands&, const PmOperands&) = default;
};

struct FieldProduct {
    BitPoly product;  // unreduced, width 465
    std::array<PmOperands, kFieldJobs> jobs{};
    GateComplexity gates;  // nine PM evaluations plus segment recombination
};

FieldProduct field_multiply(const FieldElement& a, const FieldElement& b, const MultiplierPlan& plan);
GateComplexity field_gate_complexity(const MultiplierPlan& plan);

// ---------------------------------------------------------------------------
// Named partial multipliers.

MultiplierPlan plan_pm1();  // classical
MultiplierPlan plan_pm2();  // Karatsuba2 over classical
MultiplierPlan plan_pm3();  // Winograd3 over classical

enum class MixedStyle { PM4, PM5 };

/// Seeded random mixed plan for 59-bit operands.
///
/// PM4: a Classical2 split whose four sub-multipliers M_1..M_4 each get a
/// random leaf method. PM5: a Karatsuba2 split whose three children are
/// splits with a random segmentation and random leaf methods.
///
/// Randomness is std::mt19937_64 seeded with `seed`; each choice draws one
/// output and takes it modulo the number of options, in depth-first order.
/// A draw that is invalid for the width is redrawn.
MultiplierPlan mixed_plan_random(std::uint64_t seed, MixedStyle style);

}  // namespace hdpa
