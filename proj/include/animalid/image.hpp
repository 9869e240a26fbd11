// Copyright 2026 The animalid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ANIMALID_IMAGE_HPP
#define ANIMALID_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace animalid {

/// Continuous image coordinates: origin at the top-left corner of the
/// raster, x to the right, y downward. Pixel (row i, col j) covers
/// [j, j+1) x [i, i+1) and has its center at (j + 0.5, i + 0.5).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const noexcept { return w * h; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Row-major 8-bit raster with 1 (gray) or 3 (RGB, interleaved) channels.
class ImageBuffer {
public:
    ImageBuffer() = default;
    /// Zero-filled image. Throws InvalidArgument on bad dimensions.
    ImageBuffer(int width, int height, int channels);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t at(int x, int y, int c = 0) const noexcept {
        return pixels_[index(x, y, c)];
    }
    std::uint8_t& at(int x, int y, int c = 0) noexcept { return pixels_[index(x, y, c)]; }

    const std::uint8_t* ptr(int x, int y) const noexcept { return pixels_.data() + index(x, y, 0); }
    std::uint8_t* ptr(int x, int y) noexcept { return pixels_.data() + index(x, y, 0); }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    void fill(std::uint8_t value) noexcept;

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// round(0.299 R + 0.587 G + 0.114 B); identity on gray input.
ImageBuffer to_grayscale(const ImageBuffer& img);

/// Rotates the image content about `center`. A positive angle turns the
/// content counter-clockwise as displayed (y down), i.e. the point
/// center + (r, 0) moves to center + (0, -r) for angle pi/2.
/// Bilinear sampling, black outside the source, same output size.
ImageBuffer rotate_about(const ImageBuffer& img, Point2 center, double angle);

/// Extracts `box` (origin and size rounded to whole pixels). Parts of the
/// box outside the image are zero-filled, so the output is always
/// round(w) x round(h). Throws InvalidArgument if either rounds to 0.
ImageBuffer crop(const ImageBuffer& img, const BoundingBox& box);

/// The integer pixel rectangle `crop` actually extracts for `box`.
struct PixelRect {
    long x = 0;
    long y = 0;
    long w = 0;
    long h = 0;
};
PixelRect crop_rect(const BoundingBox& box);

/// Bilinear resize with edge clamping. Aspect ratio is not preserved.
ImageBuffer resize(const ImageBuffer& img, int out_w, int out_h);

/// Equivalent to crop(rotate_about(img, center, angle), rect) without
/// materializing the full rotated image. Bit-identical to the two-step form.
ImageBuffer rotate_crop(const ImageBuffer& img, Point2 center, double angle, const PixelRect& rect);

/// Rounds a real intensity to the nearest representable 8-bit value.
std::uint8_t saturate_u8(double v) noexcept;

/// Half-up rounding used for every pixel-geometry decision.
long round_half_up(double v) noexcept;

}  // namespace animalid

#endif  // ANIMALID_IMAGE_HPP
