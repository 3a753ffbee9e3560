#include "platescreen/layout.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include "platescreen/png_io.hpp"

namespace platescreen {

namespace {

constexpr const char* kFieldNames[] = {"well", "frame", "plane", "channel"};

int field_index(const std::string& name) {
    for (int i = 0; i < 4; ++i)
        if (name == kFieldNames[i]) return i;
    return -1;
}

// Contiguity check shared by frame/plane/channel. Returns the sorted values.
std::vector<int> contiguous(const std::set<int>& values, const char* what) {
    std::vector<int> v(values.begin(), values.end());
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] != v[i - 1] + 1)
            throw GapError(std::string("missing ") + what + " " + std::to_string(v[i - 1] + 1),
                           v[i - 1] + 1);
    }
    return v;
}

}  // namespace

LayoutTemplate::LayoutTemplate(std::string pattern) : pattern_(std::move(pattern)) {
    std::size_t i = 0;
    std::string lit;
    while (i < pattern_.size()) {
        if (pattern_[i] != '{') {
            lit += pattern_[i++];
            continue;
        }
        const auto close = pattern_.find('}', i);
        if (close == std::string::npos)
            throw SchemaError("unterminated placeholder in layout '" + pattern_ + "'");
        std::string body = pattern_.substr(i + 1, close - i - 1);
        int width = 0;
        if (const auto colon = body.find(':'); colon != std::string::npos) {
            const std::string w = body.substr(colon + 1);
            if (w.empty() || !std::all_of(w.begin(), w.end(), ::isdigit))
                throw SchemaError("bad padding spec '" + w + "' in layout");
            width = std::stoi(w);
            body.resize(colon);
        }
        const int f = field_index(body);
        if (f < 0) throw SchemaError("unknown placeholder {" + body + "} in layout");
        if (present_[f]) throw SchemaError("placeholder {" + body + "} used twice");
        if (!lit.empty()) pieces_.push_back({lit, -1, 0});
        lit.clear();
        pieces_.push_back({"", f, width});
        present_[f] = true;
        i = close + 1;
    }
    if (!lit.empty()) pieces_.push_back({lit, -1, 0});

    static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
    std::string re;
    for (const auto& p : pieces_) {
        if (p.field < 0) {
            re += std::regex_replace(p.literal, special, R"(\$&)");
        } else {
            re += p.field == well ? "(.+?)" : "([0-9]+)";
            group_fields_.push_back(p.field);
        }
    }
    regex_ = std::regex(re);
}

std::string LayoutTemplate::format(const Indices& idx) const {
    std::string out;
    for (const auto& p : pieces_) {
        if (p.field < 0) {
            out += p.literal;
        } else if (p.field == well) {
            out += idx.well;
        } else {
            const int v = p.field == frame ? idx.frame : p.field == plane ? idx.plane : idx.channel;
            std::string s = std::to_string(v);
            if (static_cast<int>(s.size()) < p.width) s.insert(0, p.width - s.size(), '0');
            out += s;
        }
    }
    return out;
}

std::optional<LayoutTemplate::Indices> LayoutTemplate::match(const std::string& filename) const {
    std::smatch m;
    if (!std::regex_match(filename, m, regex_)) return std::nullopt;
    const auto& order = group_fields_;
    Indices idx;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::string g = m[k + 1].str();
        switch (order[k]) {
            case well: idx.well = g; break;
            case frame: idx.frame = std::stoi(g); break;
            case plane: idx.plane = std::stoi(g); break;
            case channel: idx.channel = std::stoi(g); break;
        }
    }
    return idx;
}

ImageStream load_stream(const std::filesystem::path& dir, const std::string& well,
                        const LayoutTemplate& layout, double frame_rate_hz) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

    std::map<std::tuple<int, int, int>, fs::path> files;
    std::set<int> frames, planes, channels;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto idx = layout.match(entry.path().filename().string());
        if (!idx) continue;
        if (layout.has(LayoutTemplate::well) && idx->well != well) continue;
        files[{idx->frame, idx->plane, idx->channel}] = entry.path();
        frames.insert(idx->frame);
        planes.insert(idx->plane);
        channels.insert(idx->channel);
    }
    if (files.empty()) throw IoError("no frames for well '" + well + "' in " + dir.string());

    const auto fv = contiguous(frames, "frame");
    const auto pv = contiguous(planes, "plane");
    const auto cv = contiguous(channels, "channel");

    std::vector<GrayImage> images;
    int n_channels = static_cast<int>(cv.size());
    int file_channels = -1;
    for (int f : fv)
        for (int p : pv)
            for (int c : cv) {
                auto it = files.find({f, p, c});
                if (it == files.end())
                    throw GapError("missing frame " + std::to_string(f) + " plane " +
                                       std::to_string(p) + " channel " + std::to_string(c),
                                   f);
                auto planes_in = png::read(it->second);
                const int got = static_cast<int>(planes_in.size());
                if (layout.has(LayoutTemplate::channel) && got != 1)
                    throw DimensionError(it->second.string() +
                                         ": per-channel files must be grayscale");
                if (file_channels >= 0 && got != file_channels)
                    throw DimensionError(it->second.string() + ": mixed gray and color files");
                file_channels = got;
                for (auto& g : planes_in) images.push_back(std::move(g));
            }
    if (!layout.has(LayoutTemplate::channel)) n_channels = file_channels;
    ImageStream stream(std::move(images), static_cast<int>(fv.size()),
                       static_cast<int>(pv.size()), n_channels, frame_rate_hz);
    return stream;
}

void save_stream(const std::filesystem::path& dir, const std::string& well,
                 const LayoutTemplate& layout, const ImageStream& stream) {
    std::filesystem::create_directories(dir);
    const bool per_channel = layout.has(LayoutTemplate::channel);
    if (!per_channel && stream.n_channels() != 1 && stream.n_channels() != 3)
        throw DimensionError("layout without {channel} needs 1 or 3 channels");
    if (!layout.has(LayoutTemplate::frame) && stream.n_frames() > 1)
        throw DimensionError("layout has no {frame} field for a multi-frame stream");
    if (!layout.has(LayoutTemplate::plane) && stream.n_planes() > 1)
        throw DimensionError("layout has no {plane} field for a multi-plane stream");
    for (int f = 0; f < stream.n_frames(); ++f)
        for (int p = 0; p < stream.n_planes(); ++p) {
            LayoutTemplate::Indices idx{well, f, p, 0};
            if (per_channel || stream.n_channels() == 1) {
                for (int c = 0; c < stream.n_channels(); ++c) {
                    idx.channel = c;
                    png::write(dir / layout.format(idx), stream.at(f, p, c));
                }
            } else {
                RgbImage rgb(stream.width(), stream.height());
                const auto& r = stream.at(f, p, 0);
                const auto& g = stream.at(f, p, 1);
                const auto& b = stream.at(f, p, 2);
                for (std::size_t i = 0; i < rgb.size(); ++i)
                    rgb.pixels()[i] = {r.pixels()[i], g.pixels()[i], b.pixels()[i]};
                png::write(dir / layout.format(idx), rgb);
            }
        }
}

std::vector<std::string> list_wells(const std::filesystem::path& dir,
                                    const LayoutTemplate& layout) {
    std::set<std::string> wells;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (auto idx = layout.match(entry.path().filename().string())) wells.insert(idx->well);
    }
    return {wells.begin(), wells.end()};
}

}  // namespace platescreen
