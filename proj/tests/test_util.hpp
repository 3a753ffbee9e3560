#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "platescreen/image.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("platescreen_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

inline platescreen::GrayImage random_image(int w, int h, std::mt19937& rng, int lo = 0,
                                           int hi = 255) {
    std::uniform_int_distribution<int> d(lo, hi);
    platescreen::GrayImage img(w, h);
    for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

}  // namespace testutil
