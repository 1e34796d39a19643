#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace bootci {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and 64-bit key to 128 bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Counter-based random stream. A stream is identified by (seed, stream id);
/// the n-th output depends only on those two values and n, so streams can be
/// created on any thread in any order and still replay bit-for-bit.
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random>
/// distributions.
class RngStream {
public:
    using result_type = std::uint32_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    /// Independent child stream. Children of the same parent with distinct
    /// indices never share a counter range with each other or the parent
    /// (up to 64-bit hash collisions).
    [[nodiscard]] RngStream substream(std::uint64_t index) const noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        if (next_ == kBufferWords) refill();
        return buffer_[next_++];
    }

    /// Uniform integer in [0, n) without modulo bias (Lemire 2019). n >= 1.
    std::uint32_t uniform_index(std::uint32_t n) noexcept
    {
        std::uint64_t m = static_cast<std::uint64_t>((*this)()) * n;
        auto low = static_cast<std::uint32_t>(m);
        if (low < n) {
            const std::uint32_t threshold = (0u - n) % n;
            while (low < threshold) {
                m = static_cast<std::uint64_t>((*this)()) * n;
                low = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    /// Uniform double on the open interval (0, 1) with 53 random bits.
    double uniform_open() noexcept
    {
        const std::uint64_t hi = (*this)();
        const std::uint64_t lo = (*this)();
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

private:
    // Blocks are generated in batches so the rounds vectorize; output order is
    // block(position) words 0..3, then block(position + 1), and so on.
    static constexpr std::size_t kBatchBlocks = 16;
    static constexpr std::size_t kBufferWords = 4 * kBatchBlocks;

    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t position_ = 0;
    std::array<std::uint32_t, kBufferWords> buffer_{};
    std::size_t next_ = kBufferWords;
};

/// Uniform indices in [0, n) drawn several at a time from 64-bit words. A
/// word r is read as the k mixed-radix digits of floor(r * n^k / 2^64), with
/// Lemire's rejection applied to n^k, so every index is exactly uniform and
/// the indices are independent.
class IndexSampler {
public:
    IndexSampler(RngStream& stream, std::uint32_t n) noexcept;

    std::uint32_t operator()() noexcept
    {
        if (next_ == k_) refill();
        return digits_[next_++];
    }

private:
    static constexpr unsigned kMaxDigits = 32;

    void refill() noexcept;
    std::uint64_t next_word() noexcept;

    RngStream* stream_;
    std::uint64_t n_;
    unsigned k_ = 0;
    std::uint64_t product_ = 1;
    std::array<std::uint32_t, kMaxDigits> digits_{};
    unsigned next_ = 0;
};

/// SplitMix64 finalizer; used to derive stream ids from structured keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines two 64-bit values into a well-mixed id (order-sensitive).
std::uint64_t combine_ids(std::uint64_t a, std::uint64_t b) noexcept;

} // namespace bootci
