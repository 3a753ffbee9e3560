#include "platescreen/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace platescreen::png {

namespace {

struct MemReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void read_from_mem(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + n > r->bytes.size()) png_error(png, "truncated PNG stream");
    std::memcpy(out, r->bytes.data() + r->pos, n);
    r->pos += n;
}

void write_to_vec(png_structp png, png_bytep data, png_size_t n) {
    auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    v->insert(v->end(), data, data + n);
}

void flush_noop(png_structp) {}

[[noreturn]] void on_error(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

std::vector<GrayImage> decode_impl(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw IoError("not a PNG stream");
    std::string err;
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    MemReader reader{bytes, 0};
    std::vector<GrayImage> planes;
    std::vector<png_byte> buf;
    std::vector<png_bytep> rows;  // declared before setjmp so longjmp skips no destructors
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG decode failed: " + err);
    }
    png_set_read_fn(png, &reader, read_from_mem);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_strip_16(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int ch = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buf.resize(rowbytes * h);
    rows.resize(h);
    for (int y = 0; y < h; ++y) rows[y] = buf.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (ch != 1 && ch != 3) throw IoError("unsupported PNG channel count " + std::to_string(ch));
    planes.assign(ch, GrayImage(w, h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c) planes[c](x, y) = rows[y][x * ch + c];
    return planes;
}

std::vector<std::uint8_t> encode_impl(int w, int h, int color_type, int depth,
                                      const std::vector<const std::uint8_t*>& rows) {
    std::vector<std::uint8_t> out;
    std::string err;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + err);
    }
    png_set_write_fn(png, &out, write_to_vec, flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto* r : rows) png_write_row(png, const_cast<png_bytep>(r));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace

std::vector<GrayImage> decode(std::span<const std::uint8_t> bytes) { return decode_impl(bytes); }

std::vector<GrayImage> read(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    try {
        return decode_impl(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode(const GrayImage& img) {
    std::vector<const std::uint8_t*> rows(img.height());
    for (int y = 0; y < img.height(); ++y) rows[y] = img.row(y);
    return encode_impl(img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 8, rows);
}

std::vector<std::uint8_t> encode(const RgbImage& img) {
    static_assert(sizeof(Rgb) == 3);
    std::vector<const std::uint8_t*> rows(img.height());
    for (int y = 0; y < img.height(); ++y)
        rows[y] = reinterpret_cast<const std::uint8_t*>(img.row(y));
    return encode_impl(img.width(), img.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

std::vector<std::uint8_t> encode16(const Grid<std::uint16_t>& img) {
    // PNG stores 16-bit samples big-endian
    std::vector<std::uint8_t> be(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        be[2 * i] = static_cast<std::uint8_t>(img.pixels()[i] >> 8);
        be[2 * i + 1] = static_cast<std::uint8_t>(img.pixels()[i] & 0xff);
    }
    std::vector<const std::uint8_t*> rows(img.height());
    for (int y = 0; y < img.height(); ++y) rows[y] = be.data() + 2 * std::size_t(y) * img.width();
    return encode_impl(img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("short write to " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write(const std::filesystem::path& path, const GrayImage& img) {
    write_bytes(path, encode(img));
}

void write(const std::filesystem::path& path, const RgbImage& img) {
    write_bytes(path, encode(img));
}

}  // namespace platescreen::png
