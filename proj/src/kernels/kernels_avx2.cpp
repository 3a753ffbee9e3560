// Compiled with -mavx2; only reached after a runtime CPUID check.
#include "kernels_impl.hpp"

#if defined(PLATESCREEN_HAVE_AVX2_TU)

#include <immintrin.h>

#include <algorithm>

namespace platescreen::kernels::avx2 {

namespace {

inline __m256i absdiff_epu8(__m256i a, __m256i b) {
    return _mm256_or_si256(_mm256_subs_epu8(a, b), _mm256_subs_epu8(b, a));
}

inline std::uint64_t hsum_epi64(__m256i v) {
    const __m128i s = _mm_add_epi64(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
    return static_cast<std::uint64_t>(_mm_cvtsi128_si64(s)) +
           static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}

inline std::uint8_t hmax_epu8(__m256i v) {
    __m128i m = _mm_max_epu8(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
    m = _mm_max_epu8(m, _mm_srli_si128(m, 8));
    m = _mm_max_epu8(m, _mm_srli_si128(m, 4));
    m = _mm_max_epu8(m, _mm_srli_si128(m, 2));
    m = _mm_max_epu8(m, _mm_srli_si128(m, 1));
    return static_cast<std::uint8_t>(_mm_cvtsi128_si32(m) & 0xff);
}

// Sum of squares of 32 bytes as eight 32-bit partial sums.
inline __m256i sq_epu8(__m256i v) {
    const __m256i zero = _mm256_setzero_si256();
    const __m256i lo = _mm256_unpacklo_epi8(v, zero);
    const __m256i hi = _mm256_unpackhi_epi8(v, zero);
    return _mm256_add_epi32(_mm256_madd_epi16(lo, lo), _mm256_madd_epi16(hi, hi));
}

inline __m256i widen_add_epu32(__m256i acc64, __m256i v32) {
    const __m256i zero = _mm256_setzero_si256();
    acc64 = _mm256_add_epi64(acc64, _mm256_unpacklo_epi32(v32, zero));
    return _mm256_add_epi64(acc64, _mm256_unpackhi_epi32(v32, zero));
}

// Each sq_epu8 lane gains at most 4 * 255^2 per step; 4096 steps stay below 2^32.
constexpr std::size_t kFlushBlocks = 4096;

}  // namespace

void absdiff(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), absdiff_epu8(va, vb));
    }
    scalar::absdiff(a + i, b + i, out + i, n - i);
}

DiffMoments diff_moments(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    __m256i sum = zero, sq64 = zero, mx = zero;
    std::size_t i = 0;
    while (i + 32 <= n) {
        __m256i sq32 = zero;
        for (std::size_t blk = 0; blk < kFlushBlocks && i + 32 <= n; ++blk, i += 32) {
            const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
            const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
            const __m256i d = absdiff_epu8(va, vb);
            sum = _mm256_add_epi64(sum, _mm256_sad_epu8(d, zero));
            sq32 = _mm256_add_epi32(sq32, sq_epu8(d));
            mx = _mm256_max_epu8(mx, d);
        }
        sq64 = widen_add_epu32(sq64, sq32);
    }
    DiffMoments m = scalar::diff_moments(a + i, b + i, n - i);
    m.sum += hsum_epi64(sum);
    m.sum_sq += hsum_epi64(sq64);
    m.max = std::max(m.max, hmax_epu8(mx));
    return m;
}

std::uint64_t sad(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(va, vb));
    }
    return hsum_epi64(acc) + scalar::sad(a + i, b + i, n - i);
}

Moments moments(const std::uint8_t* a, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    __m256i sum = zero, sq64 = zero;
    std::size_t i = 0;
    while (i + 32 <= n) {
        __m256i sq32 = zero;
        for (std::size_t blk = 0; blk < kFlushBlocks && i + 32 <= n; ++blk, i += 32) {
            const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
            sum = _mm256_add_epi64(sum, _mm256_sad_epu8(v, zero));
            sq32 = _mm256_add_epi32(sq32, sq_epu8(v));
        }
        sq64 = widen_add_epu32(sq64, sq32);
    }
    Moments m = scalar::moments(a + i, n - i);
    m.sum += hsum_epi64(sum);
    m.sum_sq += hsum_epi64(sq64);
    return m;
}

void add_noise(const std::uint8_t* base, const std::int16_t* noise, std::uint8_t* out,
               std::size_t n) {
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i b0 = _mm256_cvtepu8_epi16(
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(base + i)));
        const __m256i b1 = _mm256_cvtepu8_epi16(
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(base + i + 16)));
        const __m256i n0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(noise + i));
        const __m256i n1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(noise + i + 16));
        const __m256i s0 = _mm256_adds_epi16(b0, n0);
        const __m256i s1 = _mm256_adds_epi16(b1, n1);
        // packus works per 128-bit lane; restore linear order afterwards
        const __m256i packed = _mm256_permute4x64_epi64(_mm256_packus_epi16(s0, s1), 0xD8);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), packed);
    }
    scalar::add_noise(base + i, noise + i, out + i, n - i);
}

void mean3(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
           std::uint8_t* out, std::size_t n) {
    // (s + 1) / 3 == ((s + 1) * 21846) >> 16 for s + 1 <= 766
    const __m256i one = _mm256_set1_epi16(1);
    const __m256i magic = _mm256_set1_epi16(21846);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const __m256i va =
            _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i)));
        const __m256i vb =
            _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i)));
        const __m256i vc =
            _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(c + i)));
        const __m256i s = _mm256_add_epi16(_mm256_add_epi16(va, vb), _mm256_add_epi16(vc, one));
        const __m256i q = _mm256_mulhi_epu16(s, magic);
        const __m128i packed =
            _mm_packus_epi16(_mm256_castsi256_si128(q), _mm256_extracti128_si256(q, 1));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), packed);
    }
    scalar::mean3(a + i, b + i, c + i, out + i, n - i);
}

}  // namespace platescreen::kernels::avx2

#endif
