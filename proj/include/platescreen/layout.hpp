#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "platescreen/image_stream.hpp"

namespace platescreen {

/// Filename template with {well}, {frame}, {plane} and {channel} placeholders.
/// Numeric fields accept a zero-padding width, e.g. "{well}_t{frame:04}.png".
class LayoutTemplate {
public:
    enum Field { well = 0, frame = 1, plane = 2, channel = 3 };

    struct Indices {
        std::string well;
        int frame = 0;
        int plane = 0;
        int channel = 0;
    };

    explicit LayoutTemplate(std::string pattern);

    const std::string& pattern() const noexcept { return pattern_; }
    bool has(Field f) const noexcept { return present_[f]; }

    std::string format(const Indices& idx) const;
    std::optional<Indices> match(const std::string& filename) const;

private:
    struct Piece {
        std::string literal;
        int field = -1;  // -1 for literal text
        int width = 0;
    };

    std::string pattern_;
    std::vector<Piece> pieces_;
    bool present_[4] = {false, false, false, false};
    std::regex regex_;
    std::vector<int> group_fields_;
};

inline const char* kDefaultLayout = "{well}_f{frame:04}_z{plane}_c{channel}.png";

// Load all files of one well from dir. Frame numbers need not start at 0 but
// must be contiguous. Without a {channel} field, RGB files yield 3 channels.
ImageStream load_stream(const std::filesystem::path& dir, const std::string& well,
                        const LayoutTemplate& layout, double frame_rate_hz = 1.0);

// Write a stream so that load_stream with the same arguments reproduces it.
void save_stream(const std::filesystem::path& dir, const std::string& well,
                 const LayoutTemplate& layout, const ImageStream& stream);

// Distinct well ids present in dir, sorted.
std::vector<std::string> list_wells(const std::filesystem::path& dir,
                                    const LayoutTemplate& layout);

}  // namespace platescreen
