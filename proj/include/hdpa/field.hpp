#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "hdpa/bitpoly.hpp"

namespace hdpa {

class MultiplierPlan;

/// Element of GF(2^233) modulo f(t) = t^233 + t^74 + 1, always fully reduced.
class FieldElement {
  public:
    static constexpr std::size_t kDegree = 233;  // deg f
    static constexpr std::size_t kMiddle = 74;   // middle term of the trinomial
    static constexpr std::size_t kWords = 4;
    static constexpr std::size_t kHexDigits = (kDegree + 3) / 4;

    constexpr FieldElement() = default;

    static FieldElement zero() { return {}; }
    static FieldElement one() { return monomial(0); }
    static FieldElement monomial(std::size_t degree);
    // Bits at or above kDegree must be clear; throws ArgumentError otherwise.
    static FieldElement from_words(const std::array<std::uint64_t, kWords>& words);
    static FieldElement from_poly(const BitPoly& reduced);

    /// Big-endian hex, least significant digit holds t^0..t^3. Accepts an
    /// optional 0x prefix; throws FormatError on bad digits or values >= 2^233.
    static FieldElement from_hex(std::string_view hex);
    std::string to_hex() const;  // always kHexDigits lowercase digits

    bool bit(std::size_t i) const { return i < kDegree && ((words_[i / 64] >> (i % 64)) & 1U) != 0; }
    bool is_zero() const;
    std::size_t popcount() const;
    const std::array<std::uint64_t, kWords>& words() const { return words_; }
    BitPoly to_poly() const { return BitPoly::from_words(words_, kDegree); }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;

  private:
    std::array<std::uint64_t, kWords> words_{};
};

FieldElement add(const FieldElement& a, const FieldElement& b);

// p mod f(t) for any p of degree <= 464.
FieldElement reduce(const BitPoly& p);

FieldElement sqr(const FieldElement& a);

// Schoolbook carry-free product followed by reduction.
FieldElement mul(const FieldElement& a, const FieldElement& b);

// Product through the 4-segment field multiplier built on the given partial
// multiplier plan.
FieldElement mul(const FieldElement& a, const FieldElement& b, const MultiplierPlan& plan);

// a^(2^233 - 2) by left-to-right square-and-multiply. Throws DomainError for 0.
FieldElement inv(const FieldElement& a);

// Same chain without the zero check (0 maps to 0), as the hardware runs it.
FieldElement pow_fermat_chain(const FieldElement& a);

}  // namespace hdpa
