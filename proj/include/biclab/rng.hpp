#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace biclab {

/// SplitMix64 (Steele, Lea & Flood 2014). The state is a plain counter that
/// advances by the golden-ratio increment; every output is a fixed mix of the
/// counter, so a stream is fully determined by its 64-bit starting state.
///
///     state += 0x9E3779B97F4A7C15
///     z = state
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// The derived draws below use only integer arithmetic and one IEEE double
/// conversion, so ports in other languages reproduce them bit for bit.
class SplitMix64 {
public:
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept
    {
        state_ += golden_gamma;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1): the top 53 bits scaled by 2^-53.
    constexpr double next_unit() noexcept
    {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, bound) by 128-bit multiply-high; bound > 0.
    constexpr std::uint64_t next_below(std::uint64_t bound) noexcept
    {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    [[nodiscard]] constexpr std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Fisher-Yates from the back, drawing with next_below.
template <typename T>
void shuffle(std::span<T> xs, SplitMix64& rng)
{
    for (std::size_t i = xs.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(xs[i - 1], xs[j]);
    }
}

} // namespace biclab
