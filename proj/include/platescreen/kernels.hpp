#pragma once

// Pixel inner loops shared by segmentation, tracking and feature extraction.
//
// Every kernel has a scalar reference implementation; AVX2 (x86-64) and NEON
// (AArch64) variants are selected once at runtime. Set PLATESCREEN_SIMD=scalar
// in the environment to force the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace platescreen::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct DiffMoments {
    std::uint64_t sum = 0;     // sum |a - b|
    std::uint64_t sum_sq = 0;  // sum |a - b|^2
    std::uint8_t max = 0;      // max |a - b|

    friend bool operator==(const DiffMoments&, const DiffMoments&) = default;
};

struct Moments {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;

    friend bool operator==(const Moments&, const Moments&) = default;
};

struct KernelTable {
    Isa isa;
    void (*absdiff)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out,
                    std::size_t n);
    DiffMoments (*diff_moments)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
    std::uint64_t (*sad)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
    Moments (*moments)(const std::uint8_t* a, std::size_t n);
    // out = clamp(base + noise, 0, 255)
    void (*add_noise)(const std::uint8_t* base, const std::int16_t* noise, std::uint8_t* out,
                      std::size_t n);
    // out = round((a + b + c) / 3)
    void (*mean3)(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
                  std::uint8_t* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

const KernelTable& active() noexcept;
// Switch the active table; returns false if the ISA is unavailable.
bool set_active(Isa isa) noexcept;

inline void absdiff(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                    std::span<std::uint8_t> out) {
    active().absdiff(a.data(), b.data(), out.data(), out.size());
}

inline DiffMoments diff_moments(std::span<const std::uint8_t> a,
                                std::span<const std::uint8_t> b) {
    return active().diff_moments(a.data(), b.data(), a.size());
}

inline std::uint64_t sad(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    return active().sad(a.data(), b.data(), a.size());
}

inline Moments moments(std::span<const std::uint8_t> a) {
    return active().moments(a.data(), a.size());
}

}  // namespace platescreen::kernels
