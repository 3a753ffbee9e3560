#include "kernels_impl.hpp"

#include <algorithm>

namespace platescreen::kernels::scalar {

void absdiff(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::uint8_t>(a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
}

DiffMoments diff_moments(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    DiffMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
        m.sum += d;
        m.sum_sq += d * d;
        if (d > m.max) m.max = static_cast<std::uint8_t>(d);
    }
    return m;
}

std::uint64_t sad(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    return s;
}

Moments moments(const std::uint8_t* a, std::size_t n) {
    Moments m;
    for (std::size_t i = 0; i < n; ++i) {
        m.sum += a[i];
        m.sum_sq += static_cast<unsigned>(a[i]) * a[i];
    }
    return m;
}

void add_noise(const std::uint8_t* base, const std::int16_t* noise, std::uint8_t* out,
               std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const int v = static_cast<int>(base[i]) + noise[i];
        out[i] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
}

void mean3(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
           std::uint8_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned s = static_cast<unsigned>(a[i]) + b[i] + c[i];
        out[i] = static_cast<std::uint8_t>((s + 1) / 3);
    }
}

}  // namespace platescreen::kernels::scalar
