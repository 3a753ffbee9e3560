#pragma once

#include "platescreen/kernels.hpp"

namespace platescreen::kernels {

#define PLATESCREEN_DECLARE_KERNELS                                                          \
    void absdiff(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out,             \
                 std::size_t n);                                                              \
    DiffMoments diff_moments(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);   \
    std::uint64_t sad(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);          \
    Moments moments(const std::uint8_t* a, std::size_t n);                                   \
    void add_noise(const std::uint8_t* base, const std::int16_t* noise, std::uint8_t* out,   \
                   std::size_t n);                                                            \
    void mean3(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,          \
               std::uint8_t* out, std::size_t n);

namespace scalar {
PLATESCREEN_DECLARE_KERNELS
}

#if defined(__x86_64__) || defined(_M_X64)
#define PLATESCREEN_HAVE_AVX2_TU 1
namespace avx2 {
PLATESCREEN_DECLARE_KERNELS
}
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define PLATESCREEN_HAVE_NEON_TU 1
namespace neon {
PLATESCREEN_DECLARE_KERNELS
}
#endif

#undef PLATESCREEN_DECLARE_KERNELS

}  // namespace platescreen::kernels
