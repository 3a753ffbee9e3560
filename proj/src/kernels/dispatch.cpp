#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace platescreen::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar,       scalar::absdiff,   scalar::diff_moments,
                              scalar::sad,       scalar::moments,   scalar::add_noise,
                              scalar::mean3};

#if defined(PLATESCREEN_HAVE_AVX2_TU)
constexpr KernelTable kAvx2{Isa::avx2,    avx2::absdiff,   avx2::diff_moments, avx2::sad,
                            avx2::moments, avx2::add_noise, avx2::mean3};
#endif

#if defined(PLATESCREEN_HAVE_NEON_TU)
constexpr KernelTable kNeon{Isa::neon,    neon::absdiff,   neon::diff_moments, neon::sad,
                            neon::moments, neon::add_noise, neon::mean3};
#endif

const KernelTable* best_available() noexcept {
    if (const char* env = std::getenv("PLATESCREEN_SIMD")) {
        if (std::string_view(env) == "scalar") return &kScalar;
    }
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &kScalar;
}

std::atomic<const KernelTable*>& slot() noexcept {
    static std::atomic<const KernelTable*> s{best_available()};
    return s;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
        case Isa::scalar: break;
    }
    return "scalar";
}

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(PLATESCREEN_HAVE_AVX2_TU)
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(PLATESCREEN_HAVE_NEON_TU)
    return &kNeon;  // mandatory on AArch64
#else
    return nullptr;
#endif
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

bool set_active(Isa isa) noexcept {
    const KernelTable* t = nullptr;
    switch (isa) {
        case Isa::scalar: t = &kScalar; break;
        case Isa::avx2: t = avx2_table(); break;
        case Isa::neon: t = neon_table(); break;
    }
    if (!t) return false;
    slot().store(t, std::memory_order_relaxed);
    return true;
}

}  // namespace platescreen::kernels
