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

#include "animalid/align.hpp"

#include <cmath>
#include <string>

#include "animalid/error.hpp"

namespace animalid {

void AlignParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "align ratios a, b, c must be > 0");
    }
    if (output_side < 16) {
        throw Error(ErrorCode::InvalidArgument, "align output_side must be >= 16");
    }
}

AlignedFace align_face(const ImageBuffer& img, const FaceLandmarks& lm, const AlignParams& params) {
    params.validate();
    const Point2 l = lm.left_eye;
    const Point2 r = lm.right_eye;
    if (!std::isfinite(l.x) || !std::isfinite(l.y) || !std::isfinite(r.x) || !std::isfinite(r.y)) {
        throw Error(ErrorCode::DegenerateLandmarks, "degenerate landmarks: non-finite eye center");
    }
    const double dx = r.x - l.x;
    const double dy = r.y - l.y;
    const double d = std::hypot(dx, dy);
    if (!(d > 1.0)) {
        throw Error(ErrorCode::DegenerateLandmarks,
                    "degenerate landmarks: inter-eye distance " + std::to_string(d) + " px");
    }

    // rotate_about turns content counter-clockwise on screen for a positive
    // angle, which levels an eye line tilted by atan2(dy, dx).
    const double theta = std::atan2(dy, dx);
    const Point2 mid{(l.x + r.x) / 2.0, (l.y + r.y) / 2.0};

    // In the rotated frame the eyes sit at mid.y, half a distance either side.
    const double x_left = mid.x - d / 2.0;
    const double x_right = mid.x + d / 2.0;
    const BoundingBox box{x_left - params.c * d, mid.y - params.a * d,
                          (x_right + params.c * d) - (x_left - params.c * d), (params.a + params.b) * d};
    const PixelRect rect = crop_rect(box);
    if (rect.w < 1 || rect.h < 1) {
        throw Error(ErrorCode::DegenerateLandmarks, "degenerate landmarks: empty crop");
    }

    AlignedFace out;
    out.angle = theta;
    out.eye_distance = d;
    out.crop = rect;
    out.source_landmarks = lm;
    out.image = resize(rotate_crop(img, mid, theta, rect), params.output_side, params.output_side);

    const double sx = static_cast<double>(params.output_side) / static_cast<double>(rect.w);
    const double sy = static_cast<double>(params.output_side) / static_cast<double>(rect.h);
    const double cs = theta == 0.0 ? 1.0 : std::cos(theta);
    const double sn = theta == 0.0 ? 0.0 : std::sin(theta);
    const double rx = static_cast<double>(rect.x);
    const double ry = static_cast<double>(rect.y);
    out.transform.m = {sx * cs,  sx * sn, sx * (mid.x - cs * mid.x - sn * mid.y - rx),
                       -sy * sn, sy * cs, sy * (mid.y + sn * mid.x - cs * mid.y - ry)};
    return out;
}

FaceLandmarks map_landmarks_to_source(const FaceLandmarks& lm_crop, const BoundingBox& crop_box,
                                      double sx, double sy) {
    if (!(sx > 0.0) || !(sy > 0.0) || !std::isfinite(sx) || !std::isfinite(sy)) {
        throw Error(ErrorCode::InvalidArgument, "map_landmarks_to_source: scale must be > 0");
    }
    auto back = [&](Point2 p) { return Point2{p.x / sx + crop_box.x, p.y / sy + crop_box.y}; };
    return FaceLandmarks{back(lm_crop.left_eye), back(lm_crop.right_eye), back(lm_crop.nose)};
}

}  // namespace animalid
