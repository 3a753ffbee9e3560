#include "platescreen/image_stream.hpp"

#include <numeric>
#include <string>

namespace platescreen {

ImageStream::ImageStream(std::vector<GrayImage> images, int n_frames, int n_planes,
                         int n_channels, double frame_rate_hz)
    : images_(std::move(images)),
      n_frames_(n_frames),
      n_planes_(n_planes),
      n_channels_(n_channels),
      frame_rate_hz_(frame_rate_hz) {
    if (n_frames < 1 || n_planes < 1 || n_channels < 1)
        throw DimensionError("image stream needs at least one frame, plane and channel");
    if (images_.size() != static_cast<std::size_t>(n_frames) * n_planes * n_channels)
        throw DimensionError("image count " + std::to_string(images_.size()) +
                             " does not match frames x planes x channels");
    width_ = images_.front().width();
    height_ = images_.front().height();
    for (const auto& img : images_) {
        if (img.width() != width_ || img.height() != height_)
            throw DimensionError("inconsistent frame dimensions: " + std::to_string(width_) +
                                 "x" + std::to_string(height_) + " vs " +
                                 std::to_string(img.width()) + "x" +
                                 std::to_string(img.height()));
    }
    source_frames_.resize(n_frames_);
    std::iota(source_frames_.begin(), source_frames_.end(), 0);
}

const GrayImage& ImageStream::at(int frame, int plane, int channel) const {
    if (frame < 0 || frame >= n_frames_ || plane < 0 || plane >= n_planes_ || channel < 0 ||
        channel >= n_channels_)
        throw DimensionError("stream index out of range");
    return images_[(static_cast<std::size_t>(frame) * n_planes_ + plane) * n_channels_ +
                   channel];
}

ImageStream ImageStream::with_provenance(std::vector<int> source_frames,
                                         std::vector<int> dropped_frames) const {
    if (source_frames.size() != static_cast<std::size_t>(n_frames_))
        throw DimensionError("provenance length does not match frame count");
    ImageStream out = *this;
    out.source_frames_ = std::move(source_frames);
    out.dropped_frames_ = std::move(dropped_frames);
    return out;
}

}  // namespace platescreen
