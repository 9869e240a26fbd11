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

#include "animalid/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "animalid/error.hpp"

namespace animalid {

namespace {

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double sq_distance(Point2 a, Point2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

void FaceLandmarks::validate() const {
    if (!finite(left_eye) || !finite(right_eye) || !finite(nose)) {
        throw Error(ErrorCode::Data, "landmarks must be finite");
    }
    if (left_eye == right_eye) {
        throw Error(ErrorCode::Data, "left and right eye coincide");
    }
    if (!(left_eye.x < right_eye.x)) {
        throw Error(ErrorCode::Data, "left_eye.x must be smaller than right_eye.x");
    }
}

ImageBuffer MaskTriple::to_rgb() const {
    const int w = left_eye.width();
    const int h = left_eye.height();
    if (right_eye.width() != w || nose.width() != w || right_eye.height() != h ||
        nose.height() != h) {
        throw Error(ErrorCode::InvalidArgument, "mask dimensions differ");
    }
    ImageBuffer out(w, h, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(x, y, 0) = left_eye.at(x, y);
            out.at(x, y, 1) = right_eye.at(x, y);
            out.at(x, y, 2) = nose.at(x, y);
        }
    }
    return out;
}

MaskTriple MaskTriple::from_rgb(const ImageBuffer& rgb) {
    if (rgb.channels() != 3) {
        throw Error(ErrorCode::Data, "mask file must have 3 channels");
    }
    for (auto v : rgb.pixels()) {
        if (v != 0 && v != 255) throw Error(ErrorCode::Data, "mask values must be 0 or 255");
    }
    MaskTriple m{ImageBuffer(rgb.width(), rgb.height(), 1), ImageBuffer(rgb.width(), rgb.height(), 1),
                 ImageBuffer(rgb.width(), rgb.height(), 1)};
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            m.left_eye.at(x, y) = rgb.at(x, y, 0);
            m.right_eye.at(x, y) = rgb.at(x, y, 1);
            m.nose.at(x, y) = rgb.at(x, y, 2);
        }
    }
    return m;
}

ImageBuffer render_disk(Point2 center, double radius, int width, int height) {
    if (!(radius >= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "mask radius must be >= 1");
    }
    ImageBuffer mask(width, height, 1);
    const double r2 = radius * radius;
    const int y0 = std::max(0, static_cast<int>(std::floor(center.y - radius - 1.0)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(center.y + radius + 1.0)));
    const int x0 = std::max(0, static_cast<int>(std::floor(center.x - radius - 1.0)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(center.x + radius + 1.0)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x + 0.5 - center.x;
            const double dy = y + 0.5 - center.y;
            if (dx * dx + dy * dy <= r2) mask.at(x, y) = 255;
        }
    }
    return mask;
}

MaskTriple render_masks(const FaceLandmarks& lm, const MaskParams& params) {
    const auto inside = [&](Point2 p) {
        return finite(p) && p.x >= 0.0 && p.y >= 0.0 && p.x < params.canvas_width &&
               p.y < params.canvas_height;
    };
    const std::pair<const char*, Point2> points[] = {
        {"left_eye", lm.left_eye}, {"right_eye", lm.right_eye}, {"nose", lm.nose}};
    for (const auto& [name, p] : points) {
        if (!inside(p)) {
            throw Error(ErrorCode::InvalidArgument,
                        std::string(name) + " landmark lies outside the mask canvas");
        }
    }
    return MaskTriple{
        render_disk(lm.left_eye, params.eye_radius, params.canvas_width, params.canvas_height),
        render_disk(lm.right_eye, params.eye_radius, params.canvas_width, params.canvas_height),
        render_disk(lm.nose, params.nose_radius, params.canvas_width, params.canvas_height)};
}

Point2 centroid_of_mask(const ImageBuffer& mask) {
    if (mask.channels() != 1) {
        throw Error(ErrorCode::InvalidArgument, "centroid_of_mask expects a 1-channel mask");
    }
    // Integer sums keep the result independent of visitation order.
    long long sx = 0;
    long long sy = 0;
    long long n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) > 127) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) throw Error(ErrorCode::LandmarkNotFound, "landmark not found: empty mask");
    return Point2{static_cast<double>(sx) / static_cast<double>(n) + 0.5,
                  static_cast<double>(sy) / static_cast<double>(n) + 0.5};
}

ExtractedLandmarks extract_landmarks(const MaskTriple& masks) {
    const int w = masks.left_eye.width();
    const int h = masks.left_eye.height();
    if (masks.right_eye.width() != w || masks.nose.width() != w || masks.right_eye.height() != h ||
        masks.nose.height() != h) {
        throw Error(ErrorCode::InvalidArgument, "mask dimensions differ");
    }
    auto centroid = [](const ImageBuffer& m, const char* name) {
        try {
            return centroid_of_mask(m);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::LandmarkNotFound) throw;
            throw Error(ErrorCode::LandmarkNotFound,
                        std::string("landmark not found: empty ") + name + " channel");
        }
    };
    ExtractedLandmarks out;
    out.landmarks.left_eye = centroid(masks.left_eye, "left_eye");
    out.landmarks.right_eye = centroid(masks.right_eye, "right_eye");
    out.landmarks.nose = centroid(masks.nose, "nose");
    if (out.landmarks.left_eye.x > out.landmarks.right_eye.x) {
        std::swap(out.landmarks.left_eye, out.landmarks.right_eye);
        out.eyes_swapped = true;
    }
    if (!(out.landmarks.left_eye.x < out.landmarks.right_eye.x)) {
        throw Error(ErrorCode::LandmarkNotFound,
                    "landmark not found: eye channels do not give two horizontally separated eyes");
    }
    return out;
}

LandmarkErrorReport localization_error(std::span<const FaceLandmarks> predicted,
                                       std::span<const FaceLandmarks> truth) {
    if (predicted.size() != truth.size()) {
        throw Error(ErrorCode::InvalidArgument, "localization_error: sequence lengths differ");
    }
    if (predicted.empty()) {
        throw Error(ErrorCode::EmptyInput, "localization_error: no faces to evaluate");
    }
    LandmarkErrorReport r;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const auto& p = predicted[i];
        const auto& t = truth[i];
        r.left_eye += distance(p.left_eye, t.left_eye);
        r.right_eye += distance(p.right_eye, t.right_eye);
        r.nose += distance(p.nose, t.nose);
        r.left_eye_sq += sq_distance(p.left_eye, t.left_eye);
        r.right_eye_sq += sq_distance(p.right_eye, t.right_eye);
        r.nose_sq += sq_distance(p.nose, t.nose);
    }
    const auto n = static_cast<double>(predicted.size());
    r.count = predicted.size();
    r.left_eye /= n;
    r.right_eye /= n;
    r.nose /= n;
    r.left_eye_sq /= n;
    r.right_eye_sq /= n;
    r.nose_sq /= n;
    r.average = (r.left_eye + r.right_eye + r.nose) / 3.0;
    r.average_sq = (r.left_eye_sq + r.right_eye_sq + r.nose_sq) / 3.0;
    return r;
}

std::string LandmarkErrorReport::render_table() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%-16s | %-15s | %-16s | %-11s | %-13s\n"
                  "%-16s | %15.2f | %16.2f | %11.2f | %13.2f\n",
                  "Landmarks", "Left eye center", "Right eye center", "Nose center",
                  "Average error", "Error (pixels)", left_eye, right_eye, nose, average);
    return buf;
}

}  // namespace animalid
