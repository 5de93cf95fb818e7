#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace vslab {

// Packed bit vector. Used both for hypothesis label vectors (bit i set <=>
// point i labeled +1) and for index masks over hypotheses (version-space
// membership, balls). Desk-scale sizes; no SSO tricks, just words.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int nbits, bool fill = false)
        : nbits_(nbits), words_((nbits + 63) / 64, fill ? ~0ull : 0ull) {
        trim();
    }

    int size() const { return nbits_; }

    bool get(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ull; }
    void set(int i, bool v) {
        if (v)
            words_[i >> 6] |= 1ull << (i & 63);
        else
            words_[i >> 6] &= ~(1ull << (i & 63));
    }

    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    // Lowest set bit index, or -1.
    int find_first() const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k]) return static_cast<int>(k * 64 + std::countr_zero(words_[k]));
        return -1;
    }
    // Lowest set bit index > i, or -1.
    int find_next(int i) const {
        ++i;
        if (i >= nbits_) return -1;
        std::size_t k = static_cast<std::size_t>(i) >> 6;
        std::uint64_t w = words_[k] & (~0ull << (i & 63));
        while (true) {
            if (w) return static_cast<int>(k * 64 + std::countr_zero(w));
            if (++k >= words_.size()) return -1;
            w = words_[k];
        }
    }

    BitVec& operator&=(const BitVec& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    BitVec& operator|=(const BitVec& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    BitVec& operator^=(const BitVec& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
        return *this;
    }
    friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }
    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

    BitVec operator~() const {
        BitVec r = *this;
        for (auto& w : r.words_) w = ~w;
        r.trim();
        return r;
    }

    bool is_subset_of(const BitVec& o) const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & ~o.words_[k]) return false;
        return true;
    }
    bool intersects(const BitVec& o) const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k] & o.words_[k]) return true;
        return false;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.nbits_ == b.nbits_ && a.words_ == b.words_;
    }

    // Total order with point/index 0 most significant and 0-bit (−1 label)
    // before 1-bit; the artifact's canonical "lexicographic" order.
    friend bool operator<(const BitVec& a, const BitVec& b) {
        for (int i = 0; i < a.nbits_ && i < b.nbits_; ++i) {
            const bool x = a.get(i), y = b.get(i);
            if (x != y) return !x;
        }
        return a.nbits_ < b.nbits_;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void trim() {
        if (nbits_ & 63) words_.back() &= (~0ull >> (64 - (nbits_ & 63)));
    }

    int nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace vslab
