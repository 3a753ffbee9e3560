#pragma once

#include <vector>

#include "platescreen/image.hpp"

namespace platescreen {

/// Per-well image tensor: frames x focus planes x channels, all of one size.
/// Immutable after construction; cheap to share by const reference.
class ImageStream {
public:
    ImageStream() = default;

    // Images ordered (frame, plane, channel) with channel varying fastest.
    ImageStream(std::vector<GrayImage> images, int n_frames, int n_planes, int n_channels,
                double frame_rate_hz = 1.0);

    static ImageStream from_frames(std::vector<GrayImage> frames, double frame_rate_hz = 1.0) {
        const int n = static_cast<int>(frames.size());
        return ImageStream(std::move(frames), n, 1, 1, frame_rate_hz);
    }

    int n_frames() const noexcept { return n_frames_; }
    int n_planes() const noexcept { return n_planes_; }
    int n_channels() const noexcept { return n_channels_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double frame_rate_hz() const noexcept { return frame_rate_hz_; }

    const GrayImage& at(int frame, int plane = 0, int channel = 0) const;
    const std::vector<GrayImage>& images() const noexcept { return images_; }

    // Original frame numbers of the retained frames (identity unless the
    // stream came out of a selection) and the frames dropped on the way.
    const std::vector<int>& source_frames() const noexcept { return source_frames_; }
    const std::vector<int>& dropped_frames() const noexcept { return dropped_frames_; }

    ImageStream with_provenance(std::vector<int> source_frames,
                                std::vector<int> dropped_frames) const;

    friend bool operator==(const ImageStream& a, const ImageStream& b) {
        return a.n_frames_ == b.n_frames_ && a.n_planes_ == b.n_planes_ &&
               a.n_channels_ == b.n_channels_ && a.images_ == b.images_;
    }

private:
    std::vector<GrayImage> images_;
    int n_frames_ = 0;
    int n_planes_ = 0;
    int n_channels_ = 0;
    int width_ = 0;
    int height_ = 0;
    double frame_rate_hz_ = 1.0;
    std::vector<int> source_frames_;
    std::vector<int> dropped_frames_;
};

}  // namespace platescreen
