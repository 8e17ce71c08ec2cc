#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hdpa/attack.hpp"
#include "hdpa/errors.hpp"

using namespace hdpa;

namespace {

Scalar random_scalar(std::mt19937_64& rng, std::size_t bits) {
    std::array<std::uint64_t, 4> w{rng(), rng(), rng(), rng()};
    for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t lo = 64 * i;
        if (lo >= bits)
            w[i] = 0;
        else if (bits - lo < 64)
            w[i] &= (std::uint64_t{1} << (bits - lo)) - 1;
    }
    w[(bits - 1) / 64] |= std::uint64_t{1} << ((bits - 1) % 64);
    return Scalar::from_bits(FieldElement::from_words(w));
}

PowerTrace blank_trace(std::size_t l) {
    PowerTrace t;
    t.layout = ScheduleLayout{l, l - 2, postamble_cycles()};
    t.values.assign(t.layout->total_cycles(), 0.0);
    return t;
}

// Column j* (1-based) is 0 where the processed key bit is 1, else 1.
PowerTrace planted_trace(const Scalar& k, std::size_t j_star, std::mt19937_64& rng, bool flip = false) {
    PowerTrace t = blank_trace(k.length());
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (double& v : t.values) v = u(rng);
    const auto& layout = *t.layout;
    for (std::size_t s = 0; s < layout.slot_count; ++s) {
        const bool bit = k.bit(layout.key_bit_of_slot(s));
        t.values[layout.slot_start(s) + j_star - 1] = (bit != flip) ? 0.0 : 1.0;
    }
    return t;
}

KeyBits true_bits(const Scalar& k) {
    KeyBits b;
    for (std::size_t t = 0; t + 2 < k.length(); ++t) b.push_back(k.bit(k.length() - 3 - t) ? 1 : 0);
    return b;
}

}  // namespace

TEST_CASE("fragment: shape and indexing") {
    PowerTrace t = blank_trace(233);
    for (std::size_t c = 0; c < t.values.size(); ++c) t.values[c] = static_cast<double>(c);
    const auto m = fragment(t);
    REQUIRE(m.rows == 231);
    REQUIRE(m.values.size() == 231 * 54);
    for (std::size_t r = 0; r < m.rows; ++r) {
        CHECK(m.key_bit[r] == 230 - r);
        for (std::size_t j = 0; j < 54; ++j) REQUIRE(m.at(r, j) == static_cast<double>(45 + 54 * r + j));
    }
    CHECK(fragment(blank_trace(3)).rows == 1);

    PowerTrace short_trace = blank_trace(10);
    short_trace.values.resize(45 + 54 * 8 - 1);
    CHECK_THROWS_AS(fragment(short_trace), FormatError);
    PowerTrace no_layout;
    no_layout.values.assign(1000, 1.0);
    CHECK_THROWS_AS(fragment(no_layout), FormatError);
}

TEST_CASE("mean_slot") {
    SlotMatrix m;
    m.rows = 2;
    m.values.assign(2 * 54, 0.0);
    for (std::size_t j = 0; j < 54; ++j) m.values[54 + j] = 2.0;
    for (double v : mean_slot(m)) CHECK(v == 1.0);
    CHECK_THROWS_AS(mean_slot(SlotMatrix{}), ArgumentError);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    SlotMatrix big;
    big.rows = 231;
    for (std::size_t i = 0; i < 231 * 54; ++i) big.values.push_back(u(rng));
    const auto mean = mean_slot(big);
    for (std::size_t j = 0; j < 54; ++j) {
        // Pairwise summation, descending rows.
        std::vector<double> col;
        for (std::size_t r = 231; r-- > 0;) col.push_back(big.at(r, j));
        while (col.size() > 1) {
            std::vector<double> next;
            for (std::size_t i = 0; i + 1 < col.size(); i += 2) next.push_back(col[i] + col[i + 1]);
            if (col.size() % 2) next.push_back(col.back());
            col = next;
        }
        CHECK(mean[j] == doctest::Approx(col[0] / 231).epsilon(1e-9));
    }
}

TEST_CASE("derive_candidates: tie rule and planted leak") {
    SlotMatrix flat;
    flat.rows = 5;
    flat.values.assign(5 * 54, 3.25);
    for (const auto& c : derive_candidates(flat, mean_slot(flat)))
        CHECK(std::all_of(c.begin(), c.end(), [](auto b) { return b == 1; }));

    std::mt19937_64 rng(2);
    const Scalar k = random_scalar(rng, 64);
    for (bool flip : {false, true}) {
        const auto m = fragment(planted_trace(k, 17, rng, flip));
        const auto cands = derive_candidates(m, mean_slot(m));
        KeyBits expect = true_bits(k);
        if (flip)
            for (auto& b : expect) b ^= 1;
        CHECK(cands[16] == expect);
    }
}

TEST_CASE("correctness") {
    const Scalar k = Scalar::from_hex("b5");  // 1011 0101, l = 8
    KeyBits t = true_bits(k);
    REQUIRE(t == KeyBits{1, 1, 0, 1, 0, 1});
    CHECK(correctness(t, k) == Correctness{100, 100});
    KeyBits c = t;
    for (auto& b : c) b ^= 1;
    CHECK(correctness(c, k) == Correctness{0, 100});
    CHECK(fold(30) == 70);
    CHECK(fold(50) == 50);
    c[0] ^= 1;  // 1 of 6 matching
    CHECK(correctness(c, k).delta_raw == doctest::Approx(100.0 / 6));
    CHECK_THROWS_AS(correctness(KeyBits(5), k), ArgumentError);
}

TEST_CASE("run_attack: planted leak, report structure") {
    std::mt19937_64 rng(3);
    const Scalar k = random_scalar(rng, 233);
    const auto r = run_attack(planted_trace(k, 40, rng), k);
    REQUIRE(r.candidates.size() == 54);
    CHECK(r.candidates[39].score.delta_folded == 100);
    CHECK(r.best_j == 40);
    CHECK(std::is_sorted(r.sorted_folded.rbegin(), r.sorted_folded.rend()));
    for (const auto& c : r.candidates) {
        CHECK(c.score.delta_folded >= 50);
        CHECK(c.score.delta_folded <= 100);
    }
    CHECK_THROWS_AS(run_attack(planted_trace(k, 40, rng), random_scalar(rng, 200)), ValidationError);
}

TEST_CASE("run_attack: best_j ties go to the lowest j") {
    const Scalar k = Scalar::from_hex("1f");
    const auto r = run_attack(blank_trace(5), k);  // every candidate all-ones; key bits 111
    CHECK(r.best_j == 1);
    CHECK(r.sorted_folded.front() == 100);
}

TEST_CASE("run_attack: affine invariance and complement symmetry") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 5; ++rep) {
        const Scalar k = random_scalar(rng, 233);
        PowerTrace t = blank_trace(233);
        std::uniform_real_distribution<double> u(0.0, 50.0);
        for (double& v : t.values) v = std::floor(u(rng));  // plenty of ties
        const auto base = run_attack(t, k);
        PowerTrace scaled = t;
        for (double& v : scaled.values) v = 4.0 * v - 17.0;
        CHECK(run_attack(scaled, k) == base);
        for (const auto& c : base.candidates) {
            KeyBits comp = c.bits;
            for (auto& b : comp) b ^= 1;
            CHECK(correctness(comp, k).delta_folded == c.score.delta_folded);
        }
    }
}

TEST_CASE("run_attack: pure noise stays near 50%") {
    const Scalar k = b233::order();
    std::normal_distribution<double> noise(0.0, 1.0);
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        PowerTrace t = blank_trace(233);
        for (double& v : t.values) v = 10.0 + noise(rng);
        const auto r = run_attack(t, k);
        double mean = 0;
        for (const auto& c : r.candidates) mean += c.score.delta_folded / 54.0;
        worst = std::max(worst, mean);
    }
    CHECK(worst <= 56.0);
}

TEST_CASE("report CSV round trip and errors") {
    std::mt19937_64 rng(5);
    const Scalar k = random_scalar(rng, 100);
    PowerTrace t = planted_trace(k, 3, rng);
    t.metadata = {"pm1", "classical(59)", "high-bus", 7};
    const auto r = run_attack(t, k);
    std::stringstream ss;
    write_report_csv(ss, r);
    const auto back = read_report_csv(ss);
    CHECK(back.metadata == r.metadata);
    CHECK(back.layout == r.layout);
    CHECK(back.best_j == r.best_j);
    CHECK(back.sorted_folded == r.sorted_folded);
    for (std::size_t i = 0; i < 54; ++i) CHECK(back.candidates[i].score == r.candidates[i].score);

    std::ostringstream sorted;
    write_sorted_csv(sorted, r);
    CHECK(sorted.str().find("rank,j,delta_folded\n1,3,100\n") != std::string::npos);

    std::istringstream bad("j,delta_raw,delta_folded\n1,40,60\n2,40,61\n");
    CHECK_THROWS_WITH_AS(read_report_csv(bad), "line 3: inconsistent correctness values", FormatError);
    std::istringstream short_report("j,delta_raw,delta_folded\n1,40,60\n");
    CHECK_THROWS_AS(read_report_csv(short_report), FormatError);
}
