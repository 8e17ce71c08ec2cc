#include <random>

#include "doctest.h"
#include "hdpa/errors.hpp"
#include "hdpa/polymul.hpp"
#include "oracles.hpp"

using namespace hdpa;

namespace {

std::vector<MultiplierPlan> all_plans() {
    std::vector<MultiplierPlan> plans{plan_pm1(), plan_pm2(), plan_pm3()};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        plans.push_back(mixed_plan_random(seed, MixedStyle::PM4));
        plans.push_back(mixed_plan_random(seed, MixedStyle::PM5));
    }
    return plans;
}

}  // namespace

TEST_CASE("classical_mul: small cases") {
    const auto t1 = BitPoly::from_u64(0b11, 2);
    CHECK(classical_mul(t1, t1).product == BitPoly::from_u64(0b101, 3));
    const auto zero = BitPoly(8);
    std::mt19937_64 rng(1);
    CHECK(classical_mul(oracle::random_poly(rng, 8), zero).product.is_zero());
    CHECK_THROWS_AS(classical_mul(BitPoly(3), BitPoly(4)), ArgumentError);
}

TEST_CASE("classical gate complexity: n^2 AND, (n-1)^2 XOR, against gate-level evaluation") {
    const auto g59 = gate_complexity(plan_pm1(), 59);
    CHECK(g59.and_count == 3481);
    CHECK(g59.xor_count == 3364);
    CHECK(gate_complexity(MultiplierPlan::leaf(Method::Classical, 1), 1) == GateComplexity{1, 0});

    std::mt19937_64 rng(2);
    for (std::size_t n = 1; n <= 64; ++n) {
        const auto a = oracle::random_poly(rng, n);
        const auto b = oracle::random_poly(rng, n);
        const auto [bits, gates] = oracle::schoolbook_gates(oracle::to_bits(a), oracle::to_bits(b));
        const auto r = classical_mul(a, b);
        REQUIRE(oracle::to_bits(r.product) == bits);
        REQUIRE(r.gates.and_count == gates.ands);
        REQUIRE(r.gates.xor_count == gates.xors);
        REQUIRE(r.gates.and_count == n * n);
        REQUIRE(r.gates.xor_count == (n - 1) * (n - 1));
        REQUIRE(gate_complexity(MultiplierPlan::leaf(Method::Classical, n), n) == r.gates);
    }
}

TEST_CASE("karatsuba2_mul and winograd3_mul match the schoolbook oracle") {
    std::mt19937_64 rng(3);
    CHECK(karatsuba2_mul(BitPoly::from_u64(1, 2), BitPoly::from_u64(1, 2)).product == BitPoly::from_u64(1, 3));
    CHECK(winograd3_mul(BitPoly::from_u64(0b100, 3), BitPoly::from_u64(0b100, 3)).product ==
          BitPoly::from_u64(0b10000, 5));
    CHECK_THROWS_AS(karatsuba2_mul(BitPoly(1), BitPoly(1)), ArgumentError);
    CHECK_THROWS_AS(winograd3_mul(BitPoly(2), BitPoly(2)), ArgumentError);
    CHECK_THROWS_AS(winograd3_mul(BitPoly(4), BitPoly(4)), ArgumentError);

    for (int i = 0; i < 10000; ++i) {
        const auto a = oracle::random_poly(rng, 59);
        const auto b = oracle::random_poly(rng, 59);
        const auto expect = classical_mul(a, b).product;
        REQUIRE(karatsuba2_mul(a, b).product == expect);
        REQUIRE(winograd3_mul(a, b).product == expect);
    }
    for (std::size_t n : {2, 3, 5, 7, 11, 30, 64, 117, 233}) {
        const auto a = oracle::random_poly(rng, n);
        const auto b = oracle::random_poly(rng, n);
        const auto expect = oracle::schoolbook(oracle::to_bits(a), oracle::to_bits(b));
        REQUIRE(oracle::to_bits(karatsuba2_mul(a, b).product) == expect);
        if (splittable(n, 3)) REQUIRE(oracle::to_bits(winograd3_mul(a, b).product) == expect);
    }
}

TEST_CASE("partial product counts") {
    CHECK(partial_product_count(Segmentation::Karatsuba2) == 3);
    CHECK(partial_product_count(Segmentation::Winograd3) == 6);
    CHECK(partial_product_count(Segmentation::Classical2) == 4);
    CHECK(plan_pm2().children().size() == 3);
    CHECK(plan_pm3().children().size() == 6);
}

TEST_CASE("segment widths follow the remainder rule") {
    CHECK(segment_width(233, 4) == 59);
    CHECK(233 - 3 * segment_width(233, 4) == 56);
    CHECK(segment_width(59, 2) == 30);
    CHECK(segment_width(59, 3) == 20);
    CHECK_FALSE(splittable(4, 3));
    CHECK(splittable(5, 3));
}

TEST_CASE("plan validation") {
    const auto c30 = MultiplierPlan::leaf(Method::Classical, 30);
    CHECK_THROWS_AS(MultiplierPlan::leaf(Method::Classical, 0), PlanError);
    CHECK_THROWS_AS(MultiplierPlan::leaf(Method::Winograd3, 4), PlanError);
    CHECK_THROWS_AS(MultiplierPlan::split(Segmentation::Karatsuba2, 59, {c30, c30}), PlanError);
    CHECK_THROWS_AS(MultiplierPlan::split(Segmentation::Karatsuba2, 60, {c30, c30, MultiplierPlan::leaf(Method::Classical, 31)}),
                    PlanError);
    CHECK_THROWS_AS(pm_apply(plan_pm1(), BitPoly(58), BitPoly(58)), PlanError);
    CHECK_THROWS_AS(gate_complexity(plan_pm1(), 58), PlanError);
}

TEST_CASE("plan text round trip") {
    for (const auto& p : all_plans()) {
        REQUIRE(MultiplierPlan::parse(p.to_string()) == p);
    }
    CHECK(plan_pm2().to_string() == "karatsuba2(59)[classical(30),classical(30),classical(30)]");
    CHECK_THROWS_AS(MultiplierPlan::parse("karatsuba2(59)[classical(30)"), FormatError);
    CHECK_THROWS_AS(MultiplierPlan::parse("foo(59)"), FormatError);
    CHECK_THROWS_AS(MultiplierPlan::parse("classical2(59)"), FormatError);
}

TEST_CASE("pm_apply: every plan equals schoolbook; static gates equal instrumented gates") {
    std::mt19937_64 rng(4);
    for (const auto& plan : all_plans()) {
        const auto gc = gate_complexity(plan, 59);
        for (int i = 0; i < 2000; ++i) {
            const auto a = oracle::random_poly(rng, 59);
            const auto b = oracle::random_poly(rng, 59);
            const auto r = pm_apply(plan, a, b);
            REQUIRE(r.product == classical_mul(a, b).product);
            REQUIRE(r.gates == gc);
        }
    }
}

TEST_CASE("pm_apply: a single classical leaf is the schoolbook multiplier") {
    std::mt19937_64 rng(5);
    const auto a = oracle::random_poly(rng, 59);
    const auto b = oracle::random_poly(rng, 59);
    const auto r = pm_apply(plan_pm1(), a, b);
    const auto c = classical_mul(a, b);
    CHECK(r.product == c.product);
    CHECK(r.gates == c.gates);
}

TEST_CASE("pm_apply: leaf Karatsuba2 equals explicit Karatsuba2 split over classical leaves") {
    std::mt19937_64 rng(6);
    const auto leaf = MultiplierPlan::leaf(Method::Karatsuba2, 59);
    const auto a = oracle::random_poly(rng, 59);
    const auto b = oracle::random_poly(rng, 59);
    CHECK(pm_apply(leaf, a, b).product == pm_apply(plan_pm2(), a, b).product);
    CHECK(gate_complexity(leaf, 59) == gate_complexity(plan_pm2(), 59));
}

TEST_CASE("structurally different plans: same product, different gate tallies") {
    std::mt19937_64 rng(7);
    const auto a = oracle::random_poly(rng, 59);
    const auto b = oracle::random_poly(rng, 59);
    const auto r1 = pm_apply(plan_pm1(), a, b);
    const auto r2 = pm_apply(plan_pm2(), a, b);
    const auto r3 = pm_apply(plan_pm3(), a, b);
    CHECK(r1.product == r2.product);
    CHECK(r2.product == r3.product);
    CHECK(r1.gates != r2.gates);
    CHECK(r2.gates != r3.gates);
    CHECK(r1.gates.and_count > r2.gates.and_count);
}

TEST_CASE("static gate complexity matches instrumentation at other widths") {
    std::mt19937_64 rng(8);
    for (std::size_t n : {2, 3, 5, 6, 9, 17, 30, 31, 64}) {
        std::vector<MultiplierPlan> plans{MultiplierPlan::leaf(Method::Classical, n),
                                          MultiplierPlan::leaf(Method::Karatsuba2, n)};
        if (splittable(n, 3)) plans.push_back(MultiplierPlan::leaf(Method::Winograd3, n));
        const std::size_t m = segment_width(n, 2);
        const auto c = MultiplierPlan::leaf(Method::Classical, m);
        plans.push_back(MultiplierPlan::split(Segmentation::Classical2, n, {c, c, c, c}));
        for (const auto& p : plans) {
            const auto r = pm_apply(p, oracle::random_poly(rng, n), oracle::random_poly(rng, n));
            REQUIRE(r.gates == gate_complexity(p, n));
        }
    }
}

TEST_CASE("mixed plans: deterministic, valid and seed dependent") {
    for (auto style : {MixedStyle::PM4, MixedStyle::PM5}) {
        const auto p0 = mixed_plan_random(0, style);
        CHECK(p0 == mixed_plan_random(0, style));
        CHECK(p0.width() == 59);
        CHECK(p0 != mixed_plan_random(1, style));
    }
    const auto pm4 = mixed_plan_random(42, MixedStyle::PM4);
    CHECK(pm4.segmentation() == Segmentation::Classical2);
    CHECK(pm4.children().size() == 4);
    for (const auto& c : pm4.children()) CHECK(c.is_leaf());
    const auto pm5 = mixed_plan_random(42, MixedStyle::PM5);
    CHECK(pm5.depth() == 2);
    for (const auto& c : pm5.children()) {
        CHECK_FALSE(c.is_leaf());
        for (const auto& l : c.children()) CHECK(l.is_leaf());
    }
}

TEST_CASE("seg4_split: widths, round trip and top bit") {
    const auto z = seg4_split(FieldElement::zero());
    CHECK(z == SegmentedOperand{});
    const auto top = seg4_split(FieldElement::monomial(232));
    CHECK(top.segments[3] == (std::uint64_t{1} << 55));
    CHECK(top.segments[2] == 0);
    CHECK(top.segments[1] == 0);
    CHECK(top.segments[0] == 0);
    CHECK(kTopSegmentWidth + 3 * kPmWidth == 233);

    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const auto a = oracle::random_element(rng);
        REQUIRE(seg4_join(seg4_split(a)) == a);
    }
}

TEST_CASE("seg4_schedule: nine fixed jobs that reproduce the recorded operands") {
    const auto jobs = seg4_schedule(plan_pm2());
    REQUIRE(jobs.size() == 9);
    CHECK(jobs == seg4_schedule(plan_pm2()));
    CHECK(jobs == seg4_schedule(plan_pm1()));
    CHECK_THROWS_AS(seg4_schedule(MultiplierPlan::leaf(Method::Classical, 30)), PlanError);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        CHECK(jobs[i].group == i / 3);
        CHECK(jobs[i].member == i % 3);
    }

    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = oracle::random_element(rng);
        const auto b = oracle::random_element(rng);
        const auto fp = field_multiply(a, b, plan_pm3());
        const auto sa = seg4_split(a), sb = seg4_split(b);
        for (std::size_t i = 0; i < 9; ++i) {
            std::uint64_t ea = 0, eb = 0;
            for (std::size_t s = 0; s < 4; ++s) {
                if (jobs[i].segment_mask & (1U << s)) {
                    ea ^= sa.segments[s];
                    eb ^= sb.segments[s];
                }
            }
            REQUIRE(fp.jobs[i].a == ea);
            REQUIRE(fp.jobs[i].b == eb);
            REQUIRE(fp.jobs[i].a < (std::uint64_t{1} << 59));
        }
        const auto expect = oracle::schoolbook(oracle::to_bits(a), oracle::to_bits(b));
        auto got = oracle::to_bits(fp.product);
        got.resize(expect.size());
        REQUIRE(got == expect);
    }
}

TEST_CASE("field gate complexity: nine PM evaluations plus recombination") {
    std::mt19937_64 rng(11);
    for (const auto& plan : all_plans()) {
        const auto static_gc = field_gate_complexity(plan);
        const auto pm = gate_complexity(plan, 59);
        CHECK(static_gc.and_count == 9 * pm.and_count);
        CHECK(static_gc.xor_count == 9 * pm.xor_count + 3 * (8 * 59 - 4) + (8 * 118 - 4));
        const auto fp = field_multiply(oracle::random_element(rng), oracle::random_element(rng), plan);
        CHECK(fp.gates == static_gc);
    }
}
