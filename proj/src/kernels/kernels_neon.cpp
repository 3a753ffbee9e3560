#include "kernels_impl.hpp"

#if defined(PLATESCREEN_HAVE_NEON_TU)

#include <arm_neon.h>

#include <algorithm>

namespace platescreen::kernels::neon {

void absdiff(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) vst1q_u8(out + i, vabdq_u8(vld1q_u8(a + i), vld1q_u8(b + i)));
    scalar::absdiff(a + i, b + i, out + i, n - i);
}

DiffMoments diff_moments(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    uint64x2_t sum = vdupq_n_u64(0), sq = vdupq_n_u64(0);
    uint8x16_t mx = vdupq_n_u8(0);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t d = vabdq_u8(vld1q_u8(a + i), vld1q_u8(b + i));
        sum = vpadalq_u32(sum, vpaddlq_u16(vpaddlq_u8(d)));
        const uint16x8_t lo = vmull_u8(vget_low_u8(d), vget_low_u8(d));
        const uint16x8_t hi = vmull_u8(vget_high_u8(d), vget_high_u8(d));
        sq = vpadalq_u32(sq, vaddq_u32(vpaddlq_u16(lo), vpaddlq_u16(hi)));
        mx = vmaxq_u8(mx, d);
    }
    DiffMoments m = scalar::diff_moments(a + i, b + i, n - i);
    m.sum += vaddvq_u64(sum);
    m.sum_sq += vaddvq_u64(sq);
    m.max = std::max(m.max, vmaxvq_u8(mx));
    return m;
}

std::uint64_t sad(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t d = vabdq_u8(vld1q_u8(a + i), vld1q_u8(b + i));
        acc = vpadalq_u32(acc, vpaddlq_u16(vpaddlq_u8(d)));
    }
    return vaddvq_u64(acc) + scalar::sad(a + i, b + i, n - i);
}

Moments moments(const std::uint8_t* a, std::size_t n) {
    uint64x2_t sum = vdupq_n_u64(0), sq = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t v = vld1q_u8(a + i);
        sum = vpadalq_u32(sum, vpaddlq_u16(vpaddlq_u8(v)));
        const uint16x8_t lo = vmull_u8(vget_low_u8(v), vget_low_u8(v));
        const uint16x8_t hi = vmull_u8(vget_high_u8(v), vget_high_u8(v));
        sq = vpadalq_u32(sq, vaddq_u32(vpaddlq_u16(lo), vpaddlq_u16(hi)));
    }
    Moments m = scalar::moments(a + i, n - i);
    m.sum += vaddvq_u64(sum);
    m.sum_sq += vaddvq_u64(sq);
    return m;
}

void add_noise(const std::uint8_t* base, const std::int16_t* noise, std::uint8_t* out,
               std::size_t n) {
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t b = vld1q_u8(base + i);
        const int16x8_t b0 = vreinterpretq_s16_u16(vmovl_u8(vget_low_u8(b)));
        const int16x8_t b1 = vreinterpretq_s16_u16(vmovl_u8(vget_high_u8(b)));
        const int16x8_t s0 = vqaddq_s16(b0, vld1q_s16(noise + i));
        const int16x8_t s1 = vqaddq_s16(b1, vld1q_s16(noise + i + 8));
        vst1q_u8(out + i, vcombine_u8(vqmovun_s16(s0), vqmovun_s16(s1)));
    }
    scalar::add_noise(base + i, noise + i, out + i, n - i);
}

void mean3(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
           std::uint8_t* out, std::size_t n) {
    const uint16x8_t one = vdupq_n_u16(1);
    const uint16x4_t magic = vdup_n_u16(21846);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint16x8_t s = vaddl_u8(vld1_u8(a + i), vld1_u8(b + i));
        s = vaddq_u16(vaddw_u8(s, vld1_u8(c + i)), one);
        const uint32x4_t p0 = vmull_u16(vget_low_u16(s), magic);
        const uint32x4_t p1 = vmull_u16(vget_high_u16(s), magic);
        const uint16x8_t q = vcombine_u16(vshrn_n_u32(p0, 16), vshrn_n_u32(p1, 16));
        vst1_u8(out + i, vmovn_u16(q));
    }
    scalar::mean3(a + i, b + i, c + i, out + i, n - i);
}

}  // namespace platescreen::kernels::neon

#endif
