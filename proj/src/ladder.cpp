#include "hdpa/ladder.hpp"

#include <array>
#include <ostream>
#include <stdexcept>

#include "hdpa/errors.hpp"

namespace hdpa {

// ---------------------------------------------------------------------------
// Scalars and curve constants

Scalar Scalar::from_bits(const FieldElement& bits) {
    if (bits.is_zero()) throw ValidationError("scalar must be nonzero");
    Scalar s;
    s.bits_ = bits;
    for (std::size_t i = FieldElement::kDegree; i-- > 0;) {
        if (bits.bit(i)) {
            s.length_ = i + 1;
            break;
        }
    }
    return s;
}

Scalar Scalar::from_hex(std::string_view hex) { return from_bits(FieldElement::from_hex(hex)); }

Scalar Scalar::from_u64(std::uint64_t v) { return from_bits(FieldElement::from_words({v, 0, 0, 0})); }

std::string Scalar::to_hex() const {
    const std::string full = bits_.to_hex();
    const auto first = full.find_first_not_of('0');
    return full.substr(first == std::string::npos ? full.size() - 1 : first);
}

namespace b233 {

const FieldElement& b() {
    static const FieldElement v = FieldElement::from_hex("066647ede6c332c7f8c0923bb58213b333b20e9ce4281fe115f7d8f90ad");
    return v;
}

const AffinePoint& generator() {
    static const AffinePoint g{FieldElement::from_hex("0fac9dfcbac8313bb2139f1bb755fef65bc391f8b36f8f8eb7371fd558b"),
                               FieldElement::from_hex("1006a08a41903350678e58528bebf8a0beff867a7ca36716f7e01f81052"),
                               false};
    return g;
}

const Scalar& order() {
    static const Scalar n = Scalar::from_hex("1000000000000000000000000000013e974e72f8a6922031d2603cfe0d7");
    return n;
}

}  // namespace b233

bool on_curve(const AffinePoint& p) {
    if (p.infinity) return true;
    const FieldElement x2 = sqr(p.x);
    const FieldElement lhs = add(sqr(p.y), mul(p.x, p.y));
    const FieldElement rhs = add(add(mul(x2, p.x), x2), b233::b());
    return lhs == rhs;
}

AffinePoint negate(const AffinePoint& p) {
    if (p.infinity) return p;
    return {p.x, add(p.x, p.y), false};
}

AffinePoint affine_double(const AffinePoint& p) {
    if (p.infinity || p.x.is_zero()) return AffinePoint::at_infinity();
    const FieldElement lambda = add(p.x, mul(p.y, inv(p.x)));
    const FieldElement x3 = add(add(sqr(lambda), lambda), FieldElement::one());
    const FieldElement y3 = add(sqr(p.x), mul(add(lambda, FieldElement::one()), x3));
    return {x3, y3, false};
}

AffinePoint affine_add(const AffinePoint& p, const AffinePoint& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    if (p.x == q.x) {
        if (p.y == q.y) return affine_double(p);
        return AffinePoint::at_infinity();
    }
    const FieldElement dx = add(p.x, q.x);
    const FieldElement lambda = mul(add(p.y, q.y), inv(dx));
    const FieldElement x3 = add(add(add(sqr(lambda), lambda), dx), FieldElement::one());
    const FieldElement y3 = add(add(mul(lambda, add(p.x, x3)), x3), p.y);
    return {x3, y3, false};
}

AffinePoint reference_double_and_add(const Scalar& k, const AffinePoint& p) {
    if (!on_curve(p)) throw ValidationError("point is not on B-233");
    AffinePoint r = AffinePoint::at_infinity();
    for (std::size_t i = k.length(); i-- > 0;) {
        r = affine_double(r);
        if (k.bit(i)) r = affine_add(r, p);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Layout

namespace {

// Postamble program shape; kept in one place so layout and execution agree.
constexpr std::size_t kPostMults = 10;
constexpr std::size_t kPostAluOps = 8;
constexpr std::size_t kInversionSquarings = FieldElement::kDegree - 1;  // 232
constexpr std::size_t kInversionMults = FieldElement::kDegree - 2;      // 231

}  // namespace

std::size_t postamble_cycles() {
    return (kPostMults + kInversionMults) * ScheduleLayout::kCyclesPerMult + kPostAluOps + kInversionSquarings;
}

ScheduleLayout layout_of(const Scalar& k) {
    if (k.length() < 3) throw ValidationError("scalar must be at least 3 bits long for the slot layout");
    return {k.length(), k.length() - 2, postamble_cycles()};
}

std::string_view to_string(Reg r) {
    static constexpr std::array<std::string_view, static_cast<std::size_t>(Reg::Count)> kNames{
        "X1", "Z1", "X2", "Z2", "XP", "YP", "B",  "T1", "T2", "T3",  "T4", "T5", "S1", "S2",
        "S3", "S4", "S5", "Q1", "Q2", "Q3", "Z12", "U", "V",  "W",   "N",  "INV", "XR", "YR"};
    return kNames.at(static_cast<std::size_t>(r));
}

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Init: return "init";
        case Phase::Main: return "main";
        case Phase::Post: return "post";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Datapath: register file, shared bus, multiplier and ALU, driven cycle by
// cycle by the slot programs below. Values are computed in program order;
// events are attached to the cycle they occupy in the schedule.

namespace {

class Datapath {
  public:
    Datapath(const MultiplierPlan& plan, ActivityLog* log) : plan_(plan), log_(log) {}

    const FieldElement& get(Reg r) const { return regs_[static_cast<std::size_t>(r)]; }

    // Open a block of `cycles` records; subsequent cycle offsets are relative to it.
    void begin_block(Phase phase, std::size_t cycles, std::int32_t slot, std::int32_t key_bit) {
        base_ = next_cycle_;
        next_cycle_ += cycles;
        if (log_ == nullptr) return;
        for (std::size_t i = 0; i < cycles; ++i) {
            CycleRecord rec;
            rec.cycle = static_cast<std::uint32_t>(base_ + i);
            rec.phase = phase;
            rec.slot = slot;
            rec.key_bit = key_bit;
            log_->cycles.push_back(std::move(rec));
        }
    }

    void load(std::size_t c, Reg dst, const FieldElement& v, std::string_view label) {
        note(c, label);
        write(c, dst, v);
    }

    // Nine-cycle field multiplication starting at offset c0. Operands are
    // fetched over the bus at c0 and c0+1 (unless already on the bus) and the
    // product is written back at c0+8.
    void mult(std::size_t c0, Reg dst, Reg a, Reg b, std::string_view label, bool fetch = true) {
        const FieldProduct fp = field_multiply(get(a), get(b), plan_);
        ++mult_count_;
        if (fetch) {
            drive(c0, get(a));
            drive(c0 + 1, get(b));
        }
        if (log_ != nullptr) {
            for (std::size_t j = 0; j < kFieldJobs; ++j) {
                CycleRecord& rec = record(c0 + j);
                rec.pm = fp.jobs[j];
                append_op(rec, std::string(label) + "." + std::to_string(j));
            }
        }
        const FieldElement product = reduce(fp.product);
        drive(c0 + kFieldJobs - 1, product);
        write(c0 + kFieldJobs - 1, dst, product);
    }

    // Squarer: operand fetched over the bus, result written locally.
    void square(std::size_t c, Reg dst, Reg src, std::string_view label, bool fetch = true) {
        const FieldElement v = get(src);
        if (fetch) drive(c, v);
        alu_event(c, v, FieldElement::zero(), label);
        write(c, dst, sqr(v));
    }

    // Adder: operands on local ports, result driven onto the bus for write-back.
    void add_to(std::size_t c, Reg dst, Reg a, Reg b, std::string_view label) {
        const FieldElement r = add(get(a), get(b));
        alu_event(c, get(a), get(b), label);
        drive(c, r);
        write(c, dst, r);
    }

    std::size_t mult_count() const { return mult_count_; }
    std::size_t cycles() const { return next_cycle_; }

  private:
    CycleRecord& record(std::size_t c) {
        if (c >= next_cycle_ - base_) throw std::logic_error("schedule offset outside the current block");
        return log_->cycles[base_ + c];
    }

    void append_op(CycleRecord& rec, const std::string& op) {
        if (op.empty()) return;
        if (!rec.op.empty()) rec.op += ' ';
        rec.op += op;
    }

    void note(std::size_t c, std::string_view label) {
        if (log_ != nullptr) append_op(record(c), std::string(label));
    }

    void drive(std::size_t c, const FieldElement& v) {
        if (log_ == nullptr) return;
        CycleRecord& rec = record(c);
        if (rec.bus && *rec.bus != v) throw std::logic_error("bus conflict in cycle " + std::to_string(rec.cycle));
        rec.bus = v;
    }

    void alu_event(std::size_t c, const FieldElement& lhs, const FieldElement& rhs, std::string_view label) {
        if (log_ == nullptr) return;
        CycleRecord& rec = record(c);
        rec.alu.push_back({lhs, rhs});
        append_op(rec, std::string(label));
    }

    void write(std::size_t c, Reg dst, const FieldElement& v) {
        FieldElement& slot = regs_[static_cast<std::size_t>(dst)];
        if (log_ != nullptr) record(c).writes.push_back({dst, slot, v});
        slot = v;
    }

    const MultiplierPlan& plan_;
    ActivityLog* log_;
    std::array<FieldElement, static_cast<std::size_t>(Reg::Count)> regs_{};
    std::size_t base_ = 0;
    std::size_t next_cycle_ = 0;
    std::size_t mult_count_ = 0;
};

struct Roles {
    Reg xa, za, xd, zd;  // A receives the sum, D is doubled
};

// Bit 1: A = (X1,Z1), D = (X2,Z2). Bit 0: the roles swap.
Roles roles_for(bool bit) {
    return bit ? Roles{Reg::X1, Reg::Z1, Reg::X2, Reg::Z2} : Roles{Reg::X2, Reg::Z2, Reg::X1, Reg::Z1};
}

// Initial loads plus the first ladder iteration with Z1 = 1 known, so the
// X2*Z1 product is a register copy and five multiplications fill 45 cycles.
void run_init_slot(Datapath& dp, bool bit) {
    const Roles r = roles_for(bit);
    dp.load(0, Reg::X1, dp.get(Reg::XP), "ld:X1");
    dp.load(0, Reg::Z1, FieldElement::one(), "ld:Z1");
    dp.square(0, Reg::Z2, Reg::XP, "sqr:Z2");
    dp.mult(0, Reg::T1, Reg::X1, Reg::Z2, "M1", false);
    dp.square(1, Reg::S5, Reg::Z2, "sqr:S5");
    dp.add_to(2, Reg::X2, Reg::S5, Reg::B, "add:X2");
    dp.load(3, Reg::T2, dp.get(Reg::X2), "cp:T2");
    dp.square(4, Reg::S1, r.zd, "sqr:S1");
    dp.square(5, Reg::S2, r.xd, "sqr:S2");
    dp.square(6, Reg::S3, Reg::S1, "sqr:S3");
    dp.square(7, Reg::S4, Reg::S2, "sqr:S4");
    dp.mult(9, Reg::T3, Reg::T1, Reg::T2, "M2");
    dp.add_to(11, Reg::S5, Reg::T1, Reg::T2, "add:S5");
    dp.square(12, r.za, Reg::S5, "sqr:ZA");
    dp.mult(18, Reg::T4, Reg::XP, r.za, "M3");
    dp.mult(27, Reg::T5, Reg::B, Reg::S3, "M4");
    dp.add_to(29, r.xa, Reg::T3, Reg::T4, "add:XA");
    dp.mult(36, r.zd, Reg::S2, Reg::S1, "M5");
    dp.add_to(38, r.xd, Reg::S4, Reg::T5, "add:XD");
}

// One main-loop ladder iteration in 54 cycles:
//   Madd:    T1 = X1*Z2, T2 = X2*Z1, ZA = (T1+T2)^2, XA = XP*ZA + T1*T2
//   Mdouble: XD = XD^4 + B*ZD^4, ZD = XD^2 * ZD^2
// The Madd cross products are fetched from fixed physical registers, the
// doubling operands from the registers selected by the key bit.
void run_main_slot(Datapath& dp, bool bit) {
    const Roles r = roles_for(bit);
    dp.mult(0, Reg::T1, Reg::X1, Reg::Z2, "M1");
    dp.square(2, Reg::S1, r.zd, "sqr:S1");
    dp.square(3, Reg::S2, r.xd, "sqr:S2");
    dp.square(4, Reg::S3, Reg::S1, "sqr:S3");
    dp.square(5, Reg::S4, Reg::S2, "sqr:S4");
    dp.mult(9, Reg::T2, Reg::X2, Reg::Z1, "M2");
    dp.mult(18, Reg::T3, Reg::T1, Reg::T2, "M3");
    dp.add_to(20, Reg::S5, Reg::T1, Reg::T2, "add:S5");
    dp.square(21, r.za, Reg::S5, "sqr:ZA");
    dp.mult(27, Reg::T4, Reg::XP, r.za, "M4");
    dp.mult(36, Reg::T5, Reg::B, Reg::S3, "M5");
    dp.add_to(38, r.xa, Reg::T3, Reg::T4, "add:XA");
    dp.mult(45, r.zd, Reg::S2, Reg::S1, "M6");
    dp.add_to(47, r.xd, Reg::S4, Reg::T5, "add:XD");
}

// Sequential helper for the postamble: each op occupies its own cycles.
class Sequencer {
  public:
    explicit Sequencer(Datapath& dp) : dp_(dp) {}

    void mult(Reg dst, Reg a, Reg b, std::string_view label) {
        dp_.mult(c_, dst, a, b, label);
        c_ += ScheduleLayout::kCyclesPerMult;
    }
    void square(Reg dst, Reg src, std::string_view label) { dp_.square(c_++, dst, src, label); }
    void add_to(Reg dst, Reg a, Reg b, std::string_view label) { dp_.add_to(c_++, dst, a, b, label); }
    std::size_t cycles() const { return c_; }

  private:
    Datapath& dp_;
    std::size_t c_ = 0;
};

// Affine conversion: x = X1/Z1 and the Lopez-Dahab y recovery
//   y = (x + X1/Z1) [(X1 + x Z1)(X2 + x Z2) + (x^2 + y)(Z1 Z2)] (x Z1 Z2)^-1 + y
// with a single Fermat inversion of x Z1 Z2.
void run_postamble(Datapath& dp) {
    Sequencer s(dp);
    s.mult(Reg::Q1, Reg::XP, Reg::Z1, "P1");
    s.mult(Reg::Q2, Reg::XP, Reg::Z2, "P2");
    s.mult(Reg::Z12, Reg::Z1, Reg::Z2, "P3");
    s.mult(Reg::Q3, Reg::XP, Reg::Z12, "P4");
    s.add_to(Reg::U, Reg::X1, Reg::Q1, "add:U");
    s.add_to(Reg::V, Reg::X2, Reg::Q2, "add:V");
    s.square(Reg::W, Reg::XP, "sqr:W");
    s.add_to(Reg::W, Reg::W, Reg::YP, "add:W");
    s.mult(Reg::U, Reg::U, Reg::V, "P5");
    s.mult(Reg::W, Reg::W, Reg::Z12, "P6");
    s.add_to(Reg::N, Reg::U, Reg::W, "add:N");
    // Q3^(2^233 - 2), left to right.
    s.add_to(Reg::Inv, Reg::Q3, Reg::Inv, "mov:INV");  // INV is zero here
    for (std::size_t bit = FieldElement::kDegree - 1; bit-- > 0;) {
        s.square(Reg::Inv, Reg::Inv, "inv:sqr");
        if (bit != 0) s.mult(Reg::Inv, Reg::Inv, Reg::Q3, "inv:mul");
    }
    s.mult(Reg::XR, Reg::X1, Reg::Q2, "P7");
    s.mult(Reg::XR, Reg::XR, Reg::Inv, "P8");
    s.add_to(Reg::YR, Reg::XP, Reg::XR, "add:YR");
    s.mult(Reg::YR, Reg::YR, Reg::N, "P9");
    s.mult(Reg::YR, Reg::YR, Reg::Inv, "P10");
    s.add_to(Reg::YR, Reg::YR, Reg::YP, "add:Y");
    if (s.cycles() != postamble_cycles()) throw std::logic_error("postamble length drifted from layout");
}

void load_inputs(Datapath& dp, const FieldElement& x_p, const FieldElement& y_p, const FieldElement& b) {
    dp.load(0, Reg::XP, x_p, "ld:XP");
    dp.load(0, Reg::YP, y_p, "ld:YP");
    dp.load(0, Reg::B, b, "ld:B");
}

void load_state(Datapath& dp, const LadderState& s) {
    dp.load(0, Reg::X1, s.x1, "");
    dp.load(0, Reg::Z1, s.z1, "");
    dp.load(0, Reg::X2, s.x2, "");
    dp.load(0, Reg::Z2, s.z2, "");
}

LadderState read_state(const Datapath& dp) {
    return {dp.get(Reg::X1), dp.get(Reg::Z1), dp.get(Reg::X2), dp.get(Reg::Z2)};
}

void validate_point(const AffinePoint& p) {
    if (p.infinity) throw ValidationError("base point must not be the point at infinity");
    if (!on_curve(p)) throw ValidationError("point is not on B-233");
    if (p.x.is_zero()) throw ValidationError("x-only ladder needs a point with x != 0");
}

}  // namespace

LadderState ladder_step(const LadderState& state, bool key_bit, const FieldElement& x_p, const FieldElement& b,
                        const MultiplierPlan& plan, std::size_t* mult_count) {
    Datapath dp(plan, nullptr);
    dp.begin_block(Phase::Main, ScheduleLayout::kMainSlotCycles, 0, 0);
    load_inputs(dp, x_p, FieldElement::zero(), b);
    load_state(dp, state);
    run_main_slot(dp, key_bit);
    if (mult_count != nullptr) *mult_count = dp.mult_count();
    return read_state(dp);
}

LadderState ladder_init(bool second_bit, const FieldElement& x_p, const FieldElement& b, const MultiplierPlan& plan,
                        std::size_t* mult_count) {
    Datapath dp(plan, nullptr);
    dp.begin_block(Phase::Init, ScheduleLayout::kInitSlotCycles, -1, 0);
    load_inputs(dp, x_p, FieldElement::zero(), b);
    run_init_slot(dp, second_bit);
    if (mult_count != nullptr) *mult_count = dp.mult_count();
    return read_state(dp);
}

KpResult kp(const Scalar& k, const AffinePoint& p, const MultiplierPlan& plan) {
    validate_point(p);
    const std::size_t l = k.length();

    KpResult out;
    out.log.cycles.reserve(ScheduleLayout::kInitSlotCycles + (l > 2 ? (l - 2) * ScheduleLayout::kMainSlotCycles : 0) +
                           postamble_cycles());
    Datapath dp(plan, &out.log);

    const std::int32_t init_bit = l >= 2 ? static_cast<std::int32_t>(l - 2) : -1;
    dp.begin_block(Phase::Init, ScheduleLayout::kInitSlotCycles, -1, init_bit);
    load_inputs(dp, p.x, p.y, b233::b());
    if (l >= 2) {
        run_init_slot(dp, k.bit(l - 2));
    } else {
        // k = 1: the slot still runs (timing is key independent) and the
        // ladder is reset to (P, 2P) afterwards.
        run_init_slot(dp, true);
        const FieldElement x2 = add(sqr(sqr(p.x)), b233::b());
        dp.load(ScheduleLayout::kInitSlotCycles - 1, Reg::X1, p.x, "rst");
        dp.load(ScheduleLayout::kInitSlotCycles - 1, Reg::Z1, FieldElement::one(), "");
        dp.load(ScheduleLayout::kInitSlotCycles - 1, Reg::X2, x2, "");
        dp.load(ScheduleLayout::kInitSlotCycles - 1, Reg::Z2, sqr(p.x), "");
    }

    for (std::size_t t = 0; l >= 3 && t < l - 2; ++t) {
        const std::size_t bit_index = l - 3 - t;
        dp.begin_block(Phase::Main, ScheduleLayout::kMainSlotCycles, static_cast<std::int32_t>(t),
                       static_cast<std::int32_t>(bit_index));
        run_main_slot(dp, k.bit(bit_index));
    }

    dp.begin_block(Phase::Post, postamble_cycles(), -1, -1);
    run_postamble(dp);

    const LadderState st = read_state(dp);
    if (st.z1.is_zero()) {
        out.point = AffinePoint::at_infinity();
    } else if (st.z2.is_zero()) {
        out.point = negate(p);  // (k+1)P = O
    } else {
        out.point = {dp.get(Reg::XR), dp.get(Reg::YR), false};
    }
    if (l >= 3) out.layout = layout_of(k);
    return out;
}

void write_activity_log(std::ostream& out, const ActivityLog& log) {
    out << "# cycle phase slot key_bit bus pm_a pm_b writes op\n";
    for (const auto& rec : log.cycles) {
        out << rec.cycle << ' ' << to_string(rec.phase) << ' ' << rec.slot << ' ' << rec.key_bit << ' '
            << (rec.bus ? rec.bus->to_hex() : "-") << ' ';
        if (rec.pm)
            out << std::hex << rec.pm->a << ' ' << rec.pm->b << std::dec;
        else
            out << "- -";
        out << ' ';
        if (rec.writes.empty()) out << '-';
        for (std::size_t i = 0; i < rec.writes.size(); ++i) out << (i ? "," : "") << to_string(rec.writes[i].reg);
        out << ' ' << (rec.op.empty() ? "-" : rec.op) << '\n';
    }
}

}  // namespace hdpa
