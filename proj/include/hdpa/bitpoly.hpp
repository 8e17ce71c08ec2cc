#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace hdpa {

/// Polynomial over GF(2) with a declared width (number of coefficient slots).
///
/// Storage is inline and fixed at 512 bits so that products of two 233-bit
/// operands fit without heap traffic. Bit i is the coefficient of t^i. Every
/// bit at position >= width() is zero.
class BitPoly {
  public:
    static constexpr std::size_t kWords = 8;
    static constexpr std::size_t kCapacity = kWords * 64;

    BitPoly() = default;
    explicit BitPoly(std::size_t width);

    static BitPoly from_u64(std::uint64_t value, std::size_t width);
    static BitPoly from_words(std::span<const std::uint64_t> words, std::size_t width);

    std::size_t width() const { return width_; }
    bool bit(std::size_t i) const {
        return i < width_ && ((words_[i / 64] >> (i % 64)) & 1U) != 0;
    }
    void set_bit(std::size_t i, bool value = true);

    // XOR-accumulate; the result width is the larger of the two widths.
    BitPoly& operator^=(const BitPoly& other);
    friend BitPoly operator^(BitPoly lhs, const BitPoly& rhs) { return lhs ^= rhs; }
    BitPoly operator&(const BitPoly& other) const;
    BitPoly& operator|=(const BitPoly& other);

    // Multiply by t^s; width grows by s.
    BitPoly shifted(std::size_t s) const;
    // Coefficients [lo, lo + width) as a new polynomial of the given width.
    BitPoly slice(std::size_t lo, std::size_t width) const;
    // Change the declared width; shrinking drops high coefficients.
    BitPoly resized(std::size_t width) const;

    std::size_t popcount() const;
    // -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const;
    std::uint64_t low_word() const { return words_[0]; }
    std::span<const std::uint64_t, kWords> words() const { return words_; }

    // Equality compares coefficients only, not declared widths.
    friend bool operator==(const BitPoly& a, const BitPoly& b) { return a.words_ == b.words_; }

  private:
    void clear_above_width();

    std::array<std::uint64_t, kWords> words_{};
    std::size_t width_ = 0;
};

// All-ones polynomial of the given width (a "support" mask).
BitPoly full_support(std::size_t width);

}  // namespace hdpa
