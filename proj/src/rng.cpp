#include "bootci/rng.hpp"

#include <algorithm>
#include <limits>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace bootci {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter philox_round(const Philox4x32::Counter& c, const Philox4x32::Key& k) noexcept
{
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept
{
    ctr = philox_round(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
        ctr = philox_round(ctr, key);
    }
    return ctr;
}

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t combine_ids(std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(mix64(a) ^ (b * 0xC2B2AE3D27D4EB4Full + 0x165667B19E3779F9ull));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id)
{
}

RngStream RngStream::substream(std::uint64_t index) const noexcept
{
    return RngStream(seed_, combine_ids(stream_id_, index));
}

void RngStream::refill() noexcept
{
    constexpr std::size_t N = kBatchBlocks;
    const auto k0 = static_cast<std::uint32_t>(seed_);
    const auto k1 = static_cast<std::uint32_t>(seed_ >> 32);
    const auto id0 = static_cast<std::uint32_t>(stream_id_);
    const auto id1 = static_cast<std::uint32_t>(stream_id_ >> 32);
#if defined(__SSE2__)
    // Four blocks per register: lane j of register w holds word w of block j.
    static_assert(N % 4 == 0);
    constexpr std::size_t G = N / 4;
    const __m128i m0 = _mm_set1_epi32(static_cast<int>(kPhiloxM0));
    const __m128i m1 = _mm_set1_epi32(static_cast<int>(kPhiloxM1));
    const __m128i low_mask = _mm_set1_epi64x(0xFFFFFFFFll);
    const __m128i high_mask = _mm_slli_epi64(low_mask, 32);
    __m128i c0[G], c1[G], c2[G], c3[G];
    for (std::size_t g = 0; g < G; ++g) {
        std::uint32_t lo[4], hi[4];
        for (std::size_t j = 0; j < 4; ++j) {
            const std::uint64_t pos = position_ + 4 * g + j;
            lo[j] = static_cast<std::uint32_t>(pos);
            hi[j] = static_cast<std::uint32_t>(pos >> 32);
        }
        c0[g] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(lo));
        c1[g] = _mm_loadu_si128(reinterpret_cast<const __m128i*>(hi));
        c2[g] = _mm_set1_epi32(static_cast<int>(id0));
        c3[g] = _mm_set1_epi32(static_cast<int>(id1));
    }
    const auto mulhilo = [&](__m128i a, __m128i m, __m128i& hi, __m128i& lo) {
        const __m128i even = _mm_mul_epu32(a, m);
        const __m128i odd = _mm_mul_epu32(_mm_srli_epi64(a, 32), m);
        lo = _mm_or_si128(_mm_and_si128(even, low_mask), _mm_slli_epi64(odd, 32));
        hi = _mm_or_si128(_mm_srli_epi64(even, 32), _mm_and_si128(odd, high_mask));
    };
    std::uint32_t r0 = k0, r1 = k1;
    for (int r = 0; r < 10; ++r) {
        const __m128i key0 = _mm_set1_epi32(static_cast<int>(r0));
        const __m128i key1 = _mm_set1_epi32(static_cast<int>(r1));
        for (std::size_t g = 0; g < G; ++g) {
            __m128i hi0, lo0, hi1, lo1;
            mulhilo(c0[g], m0, hi0, lo0);
            mulhilo(c2[g], m1, hi1, lo1);
            c0[g] = _mm_xor_si128(_mm_xor_si128(hi1, c1[g]), key0);
            c1[g] = lo1;
            c2[g] = _mm_xor_si128(_mm_xor_si128(hi0, c3[g]), key1);
            c3[g] = lo0;
        }
        r0 += kPhiloxW0;
        r1 += kPhiloxW1;
    }
    for (std::size_t g = 0; g < G; ++g) {
        // transpose back to block-major order
        const __m128i t0 = _mm_unpacklo_epi32(c0[g], c1[g]);
        const __m128i t1 = _mm_unpackhi_epi32(c0[g], c1[g]);
        const __m128i t2 = _mm_unpacklo_epi32(c2[g], c3[g]);
        const __m128i t3 = _mm_unpackhi_epi32(c2[g], c3[g]);
        auto* out = reinterpret_cast<__m128i*>(buffer_.data() + 16 * g);
        _mm_storeu_si128(out + 0, _mm_unpacklo_epi64(t0, t2));
        _mm_storeu_si128(out + 1, _mm_unpackhi_epi64(t0, t2));
        _mm_storeu_si128(out + 2, _mm_unpacklo_epi64(t1, t3));
        _mm_storeu_si128(out + 3, _mm_unpackhi_epi64(t1, t3));
    }
#else
    for (std::size_t i = 0; i < N; ++i) {
        const std::uint64_t pos = position_ + i;
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(pos >> 32), id0, id1}, {k0, k1});
        std::copy(out.begin(), out.end(), buffer_.begin() + 4 * i);
    }
#endif
    position_ += N;
    next_ = 0;
}

IndexSampler::IndexSampler(RngStream& stream, std::uint32_t n) noexcept : stream_(&stream), n_(n == 0 ? 1 : n)
{
    while (k_ < kMaxDigits && product_ <= std::numeric_limits<std::uint64_t>::max() / n_) {
        product_ *= n_;
        ++k_;
    }
    next_ = k_;
}

std::uint64_t IndexSampler::next_word() noexcept
{
    const std::uint64_t hi = (*stream_)();
    return (hi << 32) | (*stream_)();
}

void IndexSampler::refill() noexcept
{
    __extension__ typedef unsigned __int128 u128;
    const auto decode = [this](std::uint64_t r) {
        for (unsigned i = 0; i < k_; ++i) {
            const u128 m = static_cast<u128>(r) * n_;
            digits_[i] = static_cast<std::uint32_t>(m >> 64);
            r = static_cast<std::uint64_t>(m);
        }
        return r; // low 64 bits of r * n^k
    };
    std::uint64_t low = decode(next_word());
    if (low < product_) {
        const std::uint64_t threshold = (0 - product_) % product_;
        while (low < threshold) low = decode(next_word());
    }
    next_ = 0;
}

} // namespace bootci
