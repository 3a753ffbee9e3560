#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "platescreen/image.hpp"

namespace platescreen::png {

// Decoded planes: one for grayscale, three (r, g, b) for color input. Alpha is
// discarded, palettes are expanded and 16-bit samples are reduced to their
// high byte.
std::vector<GrayImage> read(const std::filesystem::path& path);
std::vector<GrayImage> decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode(const GrayImage& img);
std::vector<std::uint8_t> encode(const RgbImage& img);

// 16-bit grayscale writer, used to exercise the high-byte reduction.
std::vector<std::uint8_t> encode16(const Grid<std::uint16_t>& img);

void write(const std::filesystem::path& path, const GrayImage& img);
void write(const std::filesystem::path& path, const RgbImage& img);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

}  // namespace platescreen::png
