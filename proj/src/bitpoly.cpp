#include "hdpa/bitpoly.hpp"

#include <algorithm>
#include <bit>

#include "hdpa/errors.hpp"

namespace hdpa {

namespace {

std::size_t words_for(std::size_t width) { return (width + 63) / 64; }

}  // namespace

BitPoly::BitPoly(std::size_t width) : width_(width) {
    if (width > kCapacity) throw ArgumentError("BitPoly width exceeds 512 bits");
}

BitPoly BitPoly::from_u64(std::uint64_t value, std::size_t width) {
    BitPoly p(width);
    p.words_[0] = value;
    p.clear_above_width();
    return p;
}

BitPoly BitPoly::from_words(std::span<const std::uint64_t> words, std::size_t width) {
    BitPoly p(width);
    std::copy_n(words.begin(), std::min(words.size(), kWords), p.words_.begin());
    p.clear_above_width();
    return p;
}

void BitPoly::set_bit(std::size_t i, bool value) {
    if (i >= width_) throw ArgumentError("BitPoly::set_bit out of range");
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value)
        words_[i / 64] |= mask;
    else
        words_[i / 64] &= ~mask;
}

BitPoly& BitPoly::operator^=(const BitPoly& other) {
    width_ = std::max(width_, other.width_);
    const std::size_t n = words_for(other.width_);
    for (std::size_t i = 0; i < n; ++i) words_[i] ^= other.words_[i];
    return *this;
}

BitPoly BitPoly::operator&(const BitPoly& other) const {
    BitPoly r(std::min(width_, other.width_));
    for (std::size_t i = 0; i < kWords; ++i) r.words_[i] = words_[i] & other.words_[i];
    return r;
}

BitPoly& BitPoly::operator|=(const BitPoly& other) {
    width_ = std::max(width_, other.width_);
    for (std::size_t i = 0; i < kWords; ++i) words_[i] |= other.words_[i];
    return *this;
}

BitPoly BitPoly::shifted(std::size_t s) const {
    BitPoly r(width_ + s);
    const std::size_t ws = s / 64;
    const unsigned bs = s % 64;
    for (std::size_t i = kWords; i-- > ws;) {
        std::uint64_t v = words_[i - ws] << bs;
        if (bs != 0 && i - ws >= 1) v |= words_[i - ws - 1] >> (64 - bs);
        r.words_[i] = v;
    }
    return r;
}

BitPoly BitPoly::slice(std::size_t lo, std::size_t width) const {
    BitPoly r(width);
    const std::size_t ws = lo / 64;
    const unsigned bs = lo % 64;
    for (std::size_t i = 0; i + ws < kWords; ++i) {
        std::uint64_t v = words_[i + ws] >> bs;
        if (bs != 0 && i + ws + 1 < kWords) v |= words_[i + ws + 1] << (64 - bs);
        r.words_[i] = v;
    }
    r.clear_above_width();
    return r;
}

BitPoly BitPoly::resized(std::size_t width) const {
    BitPoly r(width);
    r.words_ = words_;
    r.clear_above_width();
    return r;
}

std::size_t BitPoly::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

int BitPoly::degree() const {
    for (std::size_t i = kWords; i-- > 0;) {
        if (words_[i] != 0) return static_cast<int>(i * 64 + 63 - std::countl_zero(words_[i]));
    }
    return -1;
}

bool BitPoly::is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

void BitPoly::clear_above_width() {
    for (std::size_t i = 0; i < kWords; ++i) {
        const std::size_t lo = i * 64;
        if (lo >= width_)
            words_[i] = 0;
        else if (width_ - lo < 64)
            words_[i] &= (std::uint64_t{1} << (width_ - lo)) - 1;
    }
}

BitPoly full_support(std::size_t width) {
    std::array<std::uint64_t, BitPoly::kWords> ones;
    ones.fill(~std::uint64_t{0});
    return BitPoly::from_words(ones, width);
}

}  // namespace hdpa
