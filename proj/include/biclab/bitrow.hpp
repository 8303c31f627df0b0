#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace biclab {

/// Fixed-width bit set backed by 64-bit words. Used for adjacency rows and
/// common-neighbourhood sets; all binary operations require equal widths.
class BitRow {
public:
    BitRow() = default;
    explicit BitRow(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    [[nodiscard]] std::size_t size() const noexcept { return bits_; }

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    [[nodiscard]] bool test(std::size_t i) const
    {
        return (words_[i >> 6] >> (i & 63)) & 1U;
    }

    [[nodiscard]] std::size_t count() const noexcept
    {
        std::size_t n = 0;
        for (auto w : words_)
            n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    [[nodiscard]] bool none() const noexcept
    {
        for (auto w : words_)
            if (w != 0)
                return false;
        return true;
    }

    /// |this ∩ other| without materialising the intersection.
    [[nodiscard]] std::size_t intersection_count(const BitRow& other) const
    {
        check_width(other);
        std::size_t n = 0;
        for (std::size_t k = 0; k < words_.size(); ++k)
            n += static_cast<std::size_t>(std::popcount(words_[k] & other.words_[k]));
        return n;
    }

    [[nodiscard]] bool is_subset_of(const BitRow& other) const
    {
        check_width(other);
        for (std::size_t k = 0; k < words_.size(); ++k)
            if ((words_[k] & ~other.words_[k]) != 0)
                return false;
        return true;
    }

    BitRow& operator&=(const BitRow& other)
    {
        check_width(other);
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] &= other.words_[k];
        return *this;
    }

    friend BitRow operator&(BitRow lhs, const BitRow& rhs)
    {
        lhs &= rhs;
        return lhs;
    }

    template <typename F>
    void for_each_set(F&& f) const
    {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            auto w = words_[k];
            while (w != 0) {
                auto bit = static_cast<std::size_t>(std::countr_zero(w));
                f(static_cast<std::uint32_t>((k << 6) + bit));
                w &= w - 1;
            }
        }
    }

    [[nodiscard]] std::vector<std::uint32_t> indices() const
    {
        std::vector<std::uint32_t> out;
        out.reserve(count());
        for_each_set([&](std::uint32_t i) { out.push_back(i); });
        return out;
    }

    [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }

    friend bool operator==(const BitRow&, const BitRow&) = default;

private:
    void check_width(const BitRow& other) const
    {
        if (other.bits_ != bits_)
            throw std::invalid_argument("BitRow width mismatch");
    }

    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace biclab
