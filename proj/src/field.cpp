#include "hdpa/field.hpp"

#include <array>
#include <bit>
#include <cctype>

#include "hdpa/errors.hpp"
#include "hdpa/polymul.hpp"

namespace hdpa {

namespace {

constexpr std::uint64_t kTopMask = (std::uint64_t{1} << (FieldElement::kDegree - 192)) - 1;

// Spread the 32 bits of x to the even positions of a 64-bit word.
std::uint64_t spread32(std::uint32_t x) {
    std::uint64_t v = x;
    v = (v | (v << 16)) & 0x0000FFFF0000FFFFULL;
    v = (v | (v << 8)) & 0x00FF00FF00FF00FFULL;
    v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0FULL;
    v = (v | (v << 2)) & 0x3333333333333333ULL;
    v = (v | (v << 1)) & 0x5555555555555555ULL;
    return v;
}

__extension__ typedef unsigned __int128 u128;

// Carry-free 64x64 -> 128 product, 4-bit window over a.
u128 clmul64(std::uint64_t a, std::uint64_t b) {
    std::array<u128, 16> table{};
    table[1] = b;
    for (std::size_t i = 2; i < 16; i += 2) {
        table[i] = table[i / 2] << 1;
        table[i + 1] = table[i] ^ b;
    }
    u128 r = 0;
    for (int shift = 60; shift >= 0; shift -= 4) r = (r << 4) ^ table[(a >> shift) & 0xF];
    return r;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l >= 'a' && l <= 'f') return l - 'a' + 10;
    return -1;
}

}  // namespace

FieldElement FieldElement::monomial(std::size_t degree) {
    if (degree >= kDegree) throw ArgumentError("monomial degree out of range");
    FieldElement e;
    e.words_[degree / 64] = std::uint64_t{1} << (degree % 64);
    return e;
}

FieldElement FieldElement::from_words(const std::array<std::uint64_t, kWords>& words) {
    if ((words[3] & ~kTopMask) != 0) throw ArgumentError("field element not reduced");
    FieldElement e;
    e.words_ = words;
    return e;
}

FieldElement FieldElement::from_poly(const BitPoly& reduced) {
    if (reduced.degree() >= static_cast<int>(kDegree)) throw ArgumentError("polynomial not reduced");
    FieldElement e;
    for (std::size_t i = 0; i < kWords; ++i) e.words_[i] = reduced.words()[i];
    return e;
}

FieldElement FieldElement::from_hex(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    if (hex.empty()) throw FormatError("empty hex string");
    FieldElement e;
    std::size_t pos = 0;  // bit position of the current digit
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, pos += 4) {
        const int v = hex_value(*it);
        if (v < 0) throw FormatError("invalid hex digit '" + std::string(1, *it) + "'");
        if (v == 0) continue;
        if (pos + static_cast<std::size_t>(std::bit_width(static_cast<unsigned>(v))) > kDegree)
            throw FormatError("hex value exceeds 233 bits");
        e.words_[pos / 64] |= static_cast<std::uint64_t>(v) << (pos % 64);
    }
    return e;
}

std::string FieldElement::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(kHexDigits, '0');
    for (std::size_t d = 0; d < kHexDigits; ++d) {
        const std::size_t pos = 4 * d;
        out[kHexDigits - 1 - d] = kDigits[(words_[pos / 64] >> (pos % 64)) & 0xF];
    }
    return out;
}

bool FieldElement::is_zero() const { return *this == FieldElement{}; }

std::size_t FieldElement::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

FieldElement add(const FieldElement& a, const FieldElement& b) {
    std::array<std::uint64_t, FieldElement::kWords> w{};
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a.words()[i] ^ b.words()[i];
    return FieldElement::from_words(w);
}

FieldElement reduce(const BitPoly& p) {
    constexpr std::size_t m = FieldElement::kDegree;
    if (p.degree() > static_cast<int>(2 * m - 2)) throw ArgumentError("reduce: degree above 464");
    BitPoly r = p;
    // t^(m+e) = t^(74+e) + t^e; each pass folds the part above t^m back down.
    while (r.degree() >= static_cast<int>(m)) {
        const BitPoly high = r.slice(m, r.width() - m);
        r = r.resized(m);
        r ^= high;
        r ^= high.shifted(FieldElement::kMiddle);
    }
    return FieldElement::from_poly(r);
}

FieldElement sqr(const FieldElement& a) {
    std::array<std::uint64_t, 8> wide{};
    for (std::size_t i = 0; i < FieldElement::kWords; ++i) {
        wide[2 * i] = spread32(static_cast<std::uint32_t>(a.words()[i]));
        wide[2 * i + 1] = spread32(static_cast<std::uint32_t>(a.words()[i] >> 32));
    }
    return reduce(BitPoly::from_words(wide, 2 * FieldElement::kDegree - 1));
}

FieldElement mul(const FieldElement& a, const FieldElement& b) {
    std::array<std::uint64_t, 8> wide{};
    for (std::size_t i = 0; i < FieldElement::kWords; ++i) {
        for (std::size_t j = 0; j < FieldElement::kWords; ++j) {
            const u128 p = clmul64(a.words()[i], b.words()[j]);
            wide[i + j] ^= static_cast<std::uint64_t>(p);
            wide[i + j + 1] ^= static_cast<std::uint64_t>(p >> 64);
        }
    }
    return reduce(BitPoly::from_words(wide, 2 * FieldElement::kDegree - 1));
}

FieldElement mul(const FieldElement& a, const FieldElement& b, const MultiplierPlan& plan) {
    return reduce(field_multiply(a, b, plan).product);
}

FieldElement pow_fermat_chain(const FieldElement& a) {
    // Exponent 2^233 - 2: bits 232..1 set, bit 0 clear.
    FieldElement r = a;
    for (std::size_t bit = FieldElement::kDegree - 1; bit-- > 0;) {
        r = sqr(r);
        if (bit != 0) r = mul(r, a);
    }
    return r;
}

FieldElement inv(const FieldElement& a) {
    if (a.is_zero()) throw DomainError("inverse of zero");
    return pow_fermat_chain(a);
}

}  // namespace hdpa
