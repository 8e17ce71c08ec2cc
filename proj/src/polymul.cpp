#include "hdpa/polymul.hpp"

#include <cctype>
#include <random>
#include <utility>

#include "hdpa/errors.hpp"

namespace hdpa {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Classical: return "classical";
        case Method::Karatsuba2: return "karatsuba2";
        case Method::Winograd3: return "winograd3";
    }
    return "?";
}

std::string_view to_string(Segmentation s) {
    switch (s) {
        case Segmentation::Karatsuba2: return "karatsuba2";
        case Segmentation::Winograd3: return "winograd3";
        case Segmentation::Classical2: return "classical2";
    }
    return "?";
}

std::size_t segment_count(Segmentation s) { return s == Segmentation::Winograd3 ? 3 : 2; }

std::size_t partial_product_count(Segmentation s) {
    switch (s) {
        case Segmentation::Karatsuba2: return 3;
        case Segmentation::Winograd3: return 6;
        case Segmentation::Classical2: return 4;
    }
    return 0;
}

std::size_t partial_product_count(Method m) {
    switch (m) {
        case Method::Classical: return 1;
        case Method::Karatsuba2: return 3;
        case Method::Winograd3: return 6;
    }
    return 0;
}

std::size_t segment_width(std::size_t n, std::size_t k) { return (n + k - 1) / k; }

bool splittable(std::size_t n, std::size_t k) { return k >= 1 && n >= k && n > (k - 1) * segment_width(n, k); }

namespace {

bool method_fits(Method m, std::size_t n) {
    if (n < 1 || n > kMaxOperandWidth) return false;
    switch (m) {
        case Method::Classical: return true;
        case Method::Karatsuba2: return splittable(n, 2);
        case Method::Winograd3: return splittable(n, 3);
    }
    return false;
}

Segmentation as_segmentation(Method m) {
    return m == Method::Winograd3 ? Segmentation::Winograd3 : Segmentation::Karatsuba2;
}

}  // namespace

MultiplierPlan MultiplierPlan::leaf(Method method, std::size_t width) {
    if (!method_fits(method, width))
        throw PlanError("leaf " + std::string(hdpa::to_string(method)) + " cannot take width " +
                        std::to_string(width));
    MultiplierPlan p;
    p.leaf_ = true;
    p.method_ = method;
    p.width_ = width;
    return p;
}

MultiplierPlan MultiplierPlan::split(Segmentation seg, std::size_t width, std::vector<MultiplierPlan> children) {
    const std::size_t k = segment_count(seg);
    if (width > kMaxOperandWidth || !splittable(width, k))
        throw PlanError(std::string(hdpa::to_string(seg)) + " split cannot take width " + std::to_string(width));
    if (children.size() != partial_product_count(seg))
        throw PlanError(std::string(hdpa::to_string(seg)) + " split needs " +
                        std::to_string(partial_product_count(seg)) + " children, got " +
                        std::to_string(children.size()));
    const std::size_t m = segment_width(width, k);
    for (const auto& c : children) {
        if (c.width() != m)
            throw PlanError("child width " + std::to_string(c.width()) + " does not match segment width " +
                            std::to_string(m));
    }
    MultiplierPlan p;
    p.leaf_ = false;
    p.segmentation_ = seg;
    p.width_ = width;
    p.children_ = std::move(children);
    return p;
}

std::size_t MultiplierPlan::depth() const {
    std::size_t d = 0;
    for (const auto& c : children_) d = std::max(d, c.depth());
    return leaf_ ? 0 : d + 1;
}

std::size_t MultiplierPlan::leaf_count() const {
    if (leaf_) return 1;
    std::size_t n = 0;
    for (const auto& c : children_) n += c.leaf_count();
    return n;
}

std::string MultiplierPlan::to_string() const {
    std::string out(leaf_ ? hdpa::to_string(method_) : hdpa::to_string(segmentation_));
    out += '(' + std::to_string(width_) + ')';
    if (!leaf_) {
        out += '[';
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (i) out += ',';
            out += children_[i].to_string();
        }
        out += ']';
    }
    return out;
}

namespace {

class PlanParser {
  public:
    explicit PlanParser(std::string_view text) : text_(text) {}

    MultiplierPlan parse_all() {
        MultiplierPlan p = parse_plan();
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters");
        return p;
    }

  private:
    MultiplierPlan parse_plan() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        expect('(');
        const std::size_t width = parse_number();
        expect(')');
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '[') {
            ++pos_;
            Segmentation seg{};
            if (name == "karatsuba2")
                seg = Segmentation::Karatsuba2;
            else if (name == "winograd3")
                seg = Segmentation::Winograd3;
            else if (name == "classical2")
                seg = Segmentation::Classical2;
            else
                fail("unknown segmentation '" + std::string(name) + "'");
            std::vector<MultiplierPlan> children;
            children.push_back(parse_plan());
            skip_space();
            while (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                children.push_back(parse_plan());
                skip_space();
            }
            expect(']');
            return MultiplierPlan::split(seg, width, std::move(children));
        }
        if (name == "classical") return MultiplierPlan::leaf(Method::Classical, width);
        if (name == "karatsuba2") return MultiplierPlan::leaf(Method::Karatsuba2, width);
        if (name == "winograd3") return MultiplierPlan::leaf(Method::Winograd3, width);
        fail("unknown method '" + std::string(name) + "'");
    }

    std::size_t parse_number() {
        skip_space();
        const std::size_t start = pos_;
        std::size_t v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
            if (v > 1'000'000) fail("width too large");
            ++pos_;
        }
        if (pos_ == start) fail("expected width");
        return v;
    }

    void expect(char c) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError("plan text at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

MultiplierPlan MultiplierPlan::parse(std::string_view text) { return PlanParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Instrumented evaluation. Every signal carries a support mask (the positions
// a wire of that port width can drive); an XOR gate is tallied wherever two
// supports overlap, and a schoolbook leaf tallies one AND per operand-bit pair.

namespace {

struct Wire {
    BitPoly value;
    BitPoly support;
};

Wire port(const BitPoly& value, std::size_t width) { return {value.resized(width), full_support(width)}; }

Wire shifted(const Wire& w, std::size_t s) { return {w.value.shifted(s), w.support.shifted(s)}; }

struct JobRecorder {
    std::array<PmOperands, kFieldJobs>* jobs = nullptr;
    std::size_t depth = 0;
    std::size_t next = 0;
};

class Evaluator {
  public:
    explicit Evaluator(JobRecorder recorder = {}) : recorder_(recorder) {}

    GateComplexity gates;

    Wire eval(const MultiplierPlan& plan, const Wire& a, const Wire& b, std::size_t depth = 0) {
        if (recorder_.jobs != nullptr && depth == recorder_.depth) {
            if (recorder_.next >= kFieldJobs) throw PlanError("more partial products than scheduled jobs");
            (*recorder_.jobs)[recorder_.next++] = {a.value.low_word(), b.value.low_word()};
        }
        if (plan.is_leaf()) return eval_leaf(plan.method(), plan.width(), a, b);
        return eval_split(plan.segmentation(), plan.width(), a, b, [&](std::size_t i, const Wire& x, const Wire& y) {
            return eval(plan.children()[i], x, y, depth + 1);
        });
    }

    Wire eval_leaf(Method method, std::size_t n, const Wire& a, const Wire& b) {
        if (method == Method::Classical) return schoolbook(a, b);
        return eval_split(as_segmentation(method), n, a, b,
                          [&](std::size_t, const Wire& x, const Wire& y) { return schoolbook(x, y); });
    }

    Wire schoolbook(const Wire& a, const Wire& b) {
        const std::size_t n = a.value.width();
        Wire out{BitPoly(2 * n - 1), BitPoly(2 * n - 1)};
        const std::uint64_t b_ports = b.support.popcount();
        std::uint64_t pairs = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (a.value.bit(i)) out.value ^= b.value.shifted(i);
            if (a.support.bit(i)) {
                pairs += b_ports;
                out.support |= b.support.shifted(i);
            }
        }
        out.value = out.value.resized(2 * n - 1);
        out.support = out.support.resized(2 * n - 1);
        gates.and_count += pairs;
        // Each output coefficient sums its products with (terms - 1) XORs.
        gates.xor_count += pairs - out.support.popcount();
        return out;
    }

    void xor_into(Wire& dst, const Wire& src) {
        gates.xor_count += (dst.support & src.support).popcount();
        dst.value ^= src.value;
        dst.support |= src.support;
    }

    template <class Child>
    Wire eval_split(Segmentation seg, std::size_t n, const Wire& a, const Wire& b, Child&& child) {
        const std::size_t k = segment_count(seg);
        const std::size_t m = segment_width(n, k);
        std::array<Wire, 3> as, bs;
        for (std::size_t i = 0; i < k; ++i) {
            as[i] = port(a.value.slice(i * m, m), m);
            bs[i] = port(b.value.slice(i * m, m), m);
        }
        auto sum = [&](const Wire& x, const Wire& y) {
            Wire s = x;
            xor_into(s, y);
            return s;
        };

        Wire acc;
        switch (seg) {
            case Segmentation::Karatsuba2: {
                const Wire p0 = child(0, as[0], bs[0]);
                const Wire p1 = child(1, as[1], bs[1]);
                const Wire sa = sum(as[0], as[1]);
                const Wire sb = sum(bs[0], bs[1]);
                Wire mid = child(2, sa, sb);
                xor_into(mid, p0);
                xor_into(mid, p1);
                acc = p0;
                xor_into(acc, shifted(mid, m));
                xor_into(acc, shifted(p1, 2 * m));
                break;
            }
            case Segmentation::Classical2: {
                acc = child(0, as[0], bs[0]);
                Wire mid = child(1, as[0], bs[1]);
                xor_into(mid, child(2, as[1], bs[0]));
                const Wire p11 = child(3, as[1], bs[1]);
                xor_into(acc, shifted(mid, m));
                xor_into(acc, shifted(p11, 2 * m));
                break;
            }
            case Segmentation::Winograd3: {
                const Wire p0 = child(0, as[0], bs[0]);
                const Wire p1 = child(1, as[1], bs[1]);
                const Wire p2 = child(2, as[2], bs[2]);
                const Wire s01a = sum(as[0], as[1]), s02a = sum(as[0], as[2]), s12a = sum(as[1], as[2]);
                const Wire s01b = sum(bs[0], bs[1]), s02b = sum(bs[0], bs[2]), s12b = sum(bs[1], bs[2]);
                Wire c1 = child(3, s01a, s01b);
                Wire c2 = child(4, s02a, s02b);
                Wire c3 = child(5, s12a, s12b);
                // c1 = a0b1 + a1b0, c2 = a0b2 + a2b0 + a1b1, c3 = a1b2 + a2b1
                xor_into(c1, p0);
                xor_into(c1, p1);
                xor_into(c2, p0);
                xor_into(c2, p2);
                xor_into(c2, p1);
                xor_into(c3, p1);
                xor_into(c3, p2);
                acc = p0;
                xor_into(acc, shifted(c1, m));
                xor_into(acc, shifted(c2, 2 * m));
                xor_into(acc, shifted(c3, 3 * m));
                xor_into(acc, shifted(p2, 4 * m));
                break;
            }
        }
        // Coefficients beyond 2n-2 are zero because the padded operand bits are zero.
        return {acc.value.resized(2 * n - 1), acc.support.resized(2 * n - 1)};
    }

  private:
    JobRecorder recorder_;
};

void check_operands(const BitPoly& a, const BitPoly& b, std::size_t min_width) {
    if (a.width() != b.width()) throw ArgumentError("operand widths differ");
    if (a.width() < min_width) throw ArgumentError("operand width below " + std::to_string(min_width));
    if (a.width() > kMaxOperandWidth) throw ArgumentError("operand width above 256");
}

MulResult run_leaf(Method method, const BitPoly& a, const BitPoly& b) {
    Evaluator ev;
    const Wire r = ev.eval_leaf(method, a.width(), port(a, a.width()), port(b, b.width()));
    return {r.value, ev.gates};
}

}  // namespace

MulResult classical_mul(const BitPoly& a, const BitPoly& b) {
    check_operands(a, b, 1);
    return run_leaf(Method::Classical, a, b);
}

MulResult karatsuba2_mul(const BitPoly& a, const BitPoly& b) {
    check_operands(a, b, 2);
    return run_leaf(Method::Karatsuba2, a, b);
}

MulResult winograd3_mul(const BitPoly& a, const BitPoly& b) {
    check_operands(a, b, 3);
    if (!splittable(a.width(), 3)) throw ArgumentError("width " + std::to_string(a.width()) + " leaves an empty top segment");
    return run_leaf(Method::Winograd3, a, b);
}

MulResult pm_apply(const MultiplierPlan& plan, const BitPoly& a, const BitPoly& b) {
    if (a.width() != plan.width() || b.width() != plan.width())
        throw PlanError("operand width does not match plan width " + std::to_string(plan.width()));
    Evaluator ev;
    const Wire r = ev.eval(plan, port(a, a.width()), port(b, b.width()));
    return {r.value, ev.gates};
}

// ---------------------------------------------------------------------------
// Closed forms. With every port fully driven, a segment of width m yields
// partial products of 2m-1 coefficients, and the recombination overlaps are:
//   Karatsuba2: 2m pre-add + 2(2m-1) middle + 2(m-1) shifts  = 8m - 4
//   Classical2:  (2m-1) middle + 2(m-1) shifts               = 4m - 3
//   Winograd3:  6m pre-add + 7(2m-1) coefficients + 4(m-1)   = 24m - 11

namespace {

std::uint64_t recombination_xors(Segmentation seg, std::uint64_t m) {
    switch (seg) {
        case Segmentation::Karatsuba2: return 8 * m - 4;
        case Segmentation::Classical2: return 4 * m - 3;
        case Segmentation::Winograd3: return 24 * m - 11;
    }
    return 0;
}

GateComplexity schoolbook_gates(std::uint64_t n) { return {n * n, (n - 1) * (n - 1)}; }

GateComplexity static_gates(const MultiplierPlan& plan) {
    const std::size_t n = plan.width();
    if (plan.is_leaf()) {
        if (plan.method() == Method::Classical) return schoolbook_gates(n);
        const Segmentation seg = as_segmentation(plan.method());
        const std::uint64_t m = segment_width(n, segment_count(seg));
        GateComplexity g;
        for (std::size_t i = 0; i < partial_product_count(seg); ++i) g += schoolbook_gates(m);
        g.xor_count += recombination_xors(seg, m);
        return g;
    }
    GateComplexity g;
    for (const auto& c : plan.children()) g += static_gates(c);
    g.xor_count += recombination_xors(plan.segmentation(), segment_width(n, segment_count(plan.segmentation())));
    return g;
}

}  // namespace

GateComplexity gate_complexity(const MultiplierPlan& plan, std::size_t n) {
    if (n != plan.width())
        throw PlanError("plan width " + std::to_string(plan.width()) + " does not match n = " + std::to_string(n));
    return static_gates(plan);
}

// ---------------------------------------------------------------------------
// Field multiplier.

namespace {

constexpr std::size_t kHalfWidth = 2 * kPmWidth;  // 118
constexpr std::size_t kPaddedWidth = 4 * kPmWidth;  // 236

void require_pm_width(const MultiplierPlan& plan) {
    if (plan.width() != kPmWidth)
        throw PlanError("partial multiplier plan must take 59-bit operands, got " + std::to_string(plan.width()));
}

// 236-bit operands (233 zero-extended), split as halves of 118, then 59.
MultiplierPlan field_plan(const MultiplierPlan& pm) {
    std::vector<MultiplierPlan> inner;
    for (int i = 0; i < 3; ++i)
        inner.push_back(MultiplierPlan::split(Segmentation::Karatsuba2, kHalfWidth, {pm, pm, pm}));
    return MultiplierPlan::split(Segmentation::Karatsuba2, kPaddedWidth, std::move(inner));
}

}  // namespace

SegmentedOperand seg4_split(const FieldElement& a) {
    const BitPoly p = a.to_poly();
    SegmentedOperand s;
    for (std::size_t i = 0; i < 4; ++i) s.segments[i] = p.slice(i * kPmWidth, SegmentedOperand::width(i)).low_word();
    return s;
}

FieldElement seg4_join(const SegmentedOperand& s) {
    BitPoly p(FieldElement::kDegree);
    for (std::size_t i = 0; i < 4; ++i)
        p ^= BitPoly::from_u64(s.segments[i], SegmentedOperand::width(i)).shifted(i * kPmWidth);
    return FieldElement::from_poly(p.resized(FieldElement::kDegree));
}

std::vector<PmJob> seg4_schedule(const MultiplierPlan& plan) {
    require_pm_width(plan);
    // Segment sets of the low/high 59-bit halves of each outer operand.
    constexpr std::array<std::pair<std::uint8_t, std::uint8_t>, 3> kGroups{{
        {0b0001, 0b0010},  // A1:A0
        {0b0100, 0b1000},  // A3:A2
        {0b0101, 0b1010},  // (A1+A3):(A0+A2)
    }};
    std::vector<PmJob> jobs;
    for (std::size_t g = 0; g < 3; ++g) {
        const auto [lo, hi] = kGroups[g];
        jobs.push_back({g, 0, lo});
        jobs.push_back({g, 1, hi});
        jobs.push_back({g, 2, static_cast<std::uint8_t>(lo | hi)});
    }
    return jobs;
}

FieldProduct field_multiply(const FieldElement& a, const FieldElement& b, const MultiplierPlan& plan) {
    require_pm_width(plan);
    FieldProduct out;
    Evaluator ev(JobRecorder{&out.jobs, 2, 0});
    const Wire r = ev.eval(field_plan(plan), port(a.to_poly(), kPaddedWidth), port(b.to_poly(), kPaddedWidth));
    out.product = r.value.resized(2 * FieldElement::kDegree - 1);
    out.gates = ev.gates;
    return out;
}

GateComplexity field_gate_complexity(const MultiplierPlan& plan) {
    require_pm_width(plan);
    return static_gates(field_plan(plan));
}

// ---------------------------------------------------------------------------

MultiplierPlan plan_pm1() { return MultiplierPlan::leaf(Method::Classical, kPmWidth); }

MultiplierPlan plan_pm2() {
    const std::size_t m = segment_width(kPmWidth, 2);
    const auto c = MultiplierPlan::leaf(Method::Classical, m);
    return MultiplierPlan::split(Segmentation::Karatsuba2, kPmWidth, {c, c, c});
}

MultiplierPlan plan_pm3() {
    const std::size_t m = segment_width(kPmWidth, 3);
    const auto c = MultiplierPlan::leaf(Method::Classical, m);
    return MultiplierPlan::split(Segmentation::Winograd3, kPmWidth, {c, c, c, c, c, c});
}

namespace {

constexpr std::array<Method, 3> kMethods{Method::Classical, Method::Karatsuba2, Method::Winograd3};
constexpr std::array<Segmentation, 3> kSegmentations{Segmentation::Karatsuba2, Segmentation::Winograd3,
                                                     Segmentation::Classical2};

MultiplierPlan random_leaf(std::mt19937_64& rng, std::size_t width) {
    for (;;) {
        const Method m = kMethods[rng() % kMethods.size()];
        if (method_fits(m, width)) return MultiplierPlan::leaf(m, width);
    }
}

MultiplierPlan random_split_of_leaves(std::mt19937_64& rng, std::size_t width) {
    Segmentation seg{};
    do {
        seg = kSegmentations[rng() % kSegmentations.size()];
    } while (!splittable(width, segment_count(seg)));
    const std::size_t m = segment_width(width, segment_count(seg));
    std::vector<MultiplierPlan> children;
    for (std::size_t i = 0; i < partial_product_count(seg); ++i) children.push_back(random_leaf(rng, m));
    return MultiplierPlan::split(seg, width, std::move(children));
}

}  // namespace

MultiplierPlan mixed_plan_random(std::uint64_t seed, MixedStyle style) {
    std::mt19937_64 rng(seed);
    if (style == MixedStyle::PM4) {
        const std::size_t m = segment_width(kPmWidth, 2);
        std::vector<MultiplierPlan> children;
        for (int i = 0; i < 4; ++i) children.push_back(random_leaf(rng, m));
        return MultiplierPlan::split(Segmentation::Classical2, kPmWidth, std::move(children));
    }
    const std::size_t m = segment_width(kPmWidth, 2);
    std::vector<MultiplierPlan> children;
    for (int i = 0; i < 3; ++i) children.push_back(random_split_of_leaves(rng, m));
    return MultiplierPlan::split(Segmentation::Karatsuba2, kPmWidth, std::move(children));
}

}  // namespace hdpa
