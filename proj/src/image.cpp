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

#include "animalid/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "animalid/error.hpp"

namespace animalid {

namespace {

void check_dims(int width, int height, int channels) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::InvalidArgument,
                    "image channels must be 1 or 3, got " + std::to_string(channels));
    }
}

// Inverse-rotation sampler shared by rotate_about and rotate_crop so the two
// paths produce identical bits.
class RotationSampler {
public:
    RotationSampler(const ImageBuffer& src, Point2 center, double angle)
        : src_(src), center_(center), cos_(std::cos(angle)), sin_(std::sin(angle)) {}

    // Writes all channels of rotated-image pixel (col, row) to `out`.
    void sample(long col, long row, std::uint8_t* out) const {
        const double px = static_cast<double>(col) + 0.5 - center_.x;
        const double py = static_cast<double>(row) + 0.5 - center_.y;
        const double u = center_.x + cos_ * px - sin_ * py - 0.5;
        const double v = center_.y + sin_ * px + cos_ * py - 0.5;

        const double fu = std::floor(u);
        const double fv = std::floor(v);
        const long x0 = static_cast<long>(fu);
        const long y0 = static_cast<long>(fv);
        const double ax = u - fu;
        const double ay = v - fv;
        const int channels = src_.channels();
        for (int c = 0; c < channels; ++c) {
            const double p00 = fetch(x0, y0, c);
            const double p10 = fetch(x0 + 1, y0, c);
            const double p01 = fetch(x0, y0 + 1, c);
            const double p11 = fetch(x0 + 1, y0 + 1, c);
            const double top = (1.0 - ax) * p00 + ax * p10;
            const double bottom = (1.0 - ax) * p01 + ax * p11;
            out[c] = saturate_u8((1.0 - ay) * top + ay * bottom);
        }
    }

private:
    double fetch(long x, long y, int c) const {
        if (x < 0 || y < 0 || x >= src_.width() || y >= src_.height()) return 0.0;
        return src_.at(static_cast<int>(x), static_cast<int>(y), c);
    }

    const ImageBuffer& src_;
    Point2 center_;
    double cos_;
    double sin_;
};

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height, channels);
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                       static_cast<std::size_t>(channels),
                   0);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
    check_dims(width, height, channels);
    const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                          static_cast<std::size_t>(channels);
    if (pixels_.size() != expected) {
        throw Error(ErrorCode::InvalidArgument,
                    "pixel count " + std::to_string(pixels_.size()) + " does not match " +
                        std::to_string(expected));
    }
}

void ImageBuffer::fill(std::uint8_t value) noexcept {
    std::fill(pixels_.begin(), pixels_.end(), value);
}

std::uint8_t saturate_u8(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

long round_half_up(double v) noexcept { return static_cast<long>(std::floor(v + 0.5)); }

ImageBuffer to_grayscale(const ImageBuffer& img) {
    if (img.channels() == 1) return img;
    ImageBuffer out(img.width(), img.height(), 1);
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double r = src[3 * i];
        const double g = src[3 * i + 1];
        const double b = src[3 * i + 2];
        dst[i] = saturate_u8(0.299 * r + 0.587 * g + 0.114 * b);
    }
    return out;
}

ImageBuffer rotate_about(const ImageBuffer& img, Point2 center, double angle) {
    if (!std::isfinite(angle) || !std::isfinite(center.x) || !std::isfinite(center.y)) {
        throw Error(ErrorCode::InvalidArgument, "rotate_about: non-finite angle or center");
    }
    if (angle == 0.0) return img;
    ImageBuffer out(img.width(), img.height(), img.channels());
    const RotationSampler sampler(img, center, angle);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            sampler.sample(x, y, out.ptr(x, y));
        }
    }
    return out;
}

PixelRect crop_rect(const BoundingBox& box) {
    return PixelRect{round_half_up(box.x), round_half_up(box.y), round_half_up(box.w),
                     round_half_up(box.h)};
}

ImageBuffer crop(const ImageBuffer& img, const BoundingBox& box) {
    if (!(box.w > 0.0) || !(box.h > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "crop: box width and height must be > 0");
    }
    const PixelRect r = crop_rect(box);
    if (r.w < 1 || r.h < 1) {
        throw Error(ErrorCode::InvalidArgument, "crop: box rounds to an empty image");
    }
    ImageBuffer out(static_cast<int>(r.w), static_cast<int>(r.h), img.channels());
    const int channels = img.channels();
    const long x_begin = std::max(0L, r.x);
    const long x_end = std::min<long>(img.width(), r.x + r.w);
    const long y_begin = std::max(0L, r.y);
    const long y_end = std::min<long>(img.height(), r.y + r.h);
    if (x_begin >= x_end) return out;
    const auto row_bytes = static_cast<std::size_t>(x_end - x_begin) * channels;
    for (long y = y_begin; y < y_end; ++y) {
        const std::uint8_t* src = img.ptr(static_cast<int>(x_begin), static_cast<int>(y));
        std::uint8_t* dst = out.ptr(static_cast<int>(x_begin - r.x), static_cast<int>(y - r.y));
        std::copy_n(src, row_bytes, dst);
    }
    return out;
}

ImageBuffer rotate_crop(const ImageBuffer& img, Point2 center, double angle, const PixelRect& rect) {
    if (rect.w < 1 || rect.h < 1) {
        throw Error(ErrorCode::InvalidArgument, "rotate_crop: empty rectangle");
    }
    if (angle == 0.0) {
        return crop(img, BoundingBox{static_cast<double>(rect.x), static_cast<double>(rect.y),
                                     static_cast<double>(rect.w), static_cast<double>(rect.h)});
    }
    ImageBuffer out(static_cast<int>(rect.w), static_cast<int>(rect.h), img.channels());
    const RotationSampler sampler(img, center, angle);
    const long x_begin = std::max(0L, rect.x);
    const long x_end = std::min<long>(img.width(), rect.x + rect.w);
    const long y_begin = std::max(0L, rect.y);
    const long y_end = std::min<long>(img.height(), rect.y + rect.h);
    for (long y = y_begin; y < y_end; ++y) {
        for (long x = x_begin; x < x_end; ++x) {
            sampler.sample(x, y, out.ptr(static_cast<int>(x - rect.x), static_cast<int>(y - rect.y)));
        }
    }
    return out;
}

ImageBuffer resize(const ImageBuffer& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) {
        throw Error(ErrorCode::InvalidArgument, "resize: output dimensions must be >= 1");
    }
    if (out_w == img.width() && out_h == img.height()) return img;

    struct Tap {
        int i0;
        int i1;
        double a;
    };
    auto taps = [](int in, int out) {
        std::vector<Tap> t(static_cast<std::size_t>(out));
        const double scale = static_cast<double>(in) / static_cast<double>(out);
        for (int k = 0; k < out; ++k) {
            double s = (k + 0.5) * scale - 0.5;
            s = std::clamp(s, 0.0, static_cast<double>(in - 1));
            const int i0 = static_cast<int>(std::floor(s));
            const int i1 = std::min(i0 + 1, in - 1);
            t[static_cast<std::size_t>(k)] = Tap{i0, i1, s - i0};
        }
        return t;
    };
    const auto xt = taps(img.width(), out_w);
    const auto yt = taps(img.height(), out_h);

    ImageBuffer out(out_w, out_h, img.channels());
    const int channels = img.channels();
    for (int y = 0; y < out_h; ++y) {
        const Tap& ty = yt[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_w; ++x) {
            const Tap& tx = xt[static_cast<std::size_t>(x)];
            for (int c = 0; c < channels; ++c) {
                const double top = (1.0 - tx.a) * img.at(tx.i0, ty.i0, c) + tx.a * img.at(tx.i1, ty.i0, c);
                const double bottom =
                    (1.0 - tx.a) * img.at(tx.i0, ty.i1, c) + tx.a * img.at(tx.i1, ty.i1, c);
                out.at(x, y, c) = saturate_u8((1.0 - ty.a) * top + ty.a * bottom);
            }
        }
    }
    return out;
}

}  // namespace animalid
