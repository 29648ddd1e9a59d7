#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace domset {

// Fixed-width bitset over `Words` 64-bit words. Coverage operations in the
// exact solver are word-parallel; the word count is chosen per graph.
template <unsigned Words>
struct FixedBitset {
    std::array<std::uint64_t, Words> w{};

    static constexpr int capacity() { return static_cast<int>(Words) * 64; }

    void set(int i) { w[static_cast<unsigned>(i) >> 6] |= 1ULL << (i & 63); }
    void reset(int i) { w[static_cast<unsigned>(i) >> 6] &= ~(1ULL << (i & 63)); }
    bool test(int i) const { return (w[static_cast<unsigned>(i) >> 6] >> (i & 63)) & 1ULL; }

    bool none() const {
        for (auto word : w)
            if (word) return false;
        return true;
    }
    bool any() const { return !none(); }

    int count() const {
        int c = 0;
        for (auto word : w) c += std::popcount(word);
        return c;
    }

    FixedBitset& operator|=(const FixedBitset& o) {
        for (unsigned i = 0; i < Words; ++i) w[i] |= o.w[i];
        return *this;
    }
    FixedBitset& operator&=(const FixedBitset& o) {
        for (unsigned i = 0; i < Words; ++i) w[i] &= o.w[i];
        return *this;
    }
    // this &= ~o
    FixedBitset& subtract(const FixedBitset& o) {
        for (unsigned i = 0; i < Words; ++i) w[i] &= ~o.w[i];
        return *this;
    }

    int count_and(const FixedBitset& o) const {
        int c = 0;
        for (unsigned i = 0; i < Words; ++i) c += std::popcount(w[i] & o.w[i]);
        return c;
    }

    bool intersects(const FixedBitset& o) const {
        for (unsigned i = 0; i < Words; ++i)
            if (w[i] & o.w[i]) return true;
        return false;
    }

    // Lowest set bit, or -1 when empty.
    int first() const {
        for (unsigned i = 0; i < Words; ++i)
            if (w[i]) return static_cast<int>(i) * 64 + std::countr_zero(w[i]);
        return -1;
    }

    // Visits set bits in ascending index order.
    template <typename F>
    void for_each(F&& f) const {
        for (unsigned i = 0; i < Words; ++i) {
            std::uint64_t word = w[i];
            while (word) {
                f(static_cast<int>(i) * 64 + std::countr_zero(word));
                word &= word - 1;
            }
        }
    }

    // Mask with the first n bits set.
    static FixedBitset first_n(int n) {
        FixedBitset b;
        for (int i = 0; n > 0 && i < static_cast<int>(Words); ++i, n -= 64)
            b.w[i] = n >= 64 ? ~0ULL : (1ULL << n) - 1;
        return b;
    }

    bool operator==(const FixedBitset&) const = default;
};

}  // namespace domset
