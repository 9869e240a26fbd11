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

#ifndef ANIMALID_ALIGN_HPP
#define ANIMALID_ALIGN_HPP

#include <array>

#include "animalid/image.hpp"
#include "animalid/landmarks.hpp"

namespace animalid {

/// Crop margins as multiples of the inter-eye distance d: a*d above the
/// eye line, b*d below it, c*d beyond each eye center.
struct AlignParams {
    double a = 1.3;
    double b = 1.7;
    double c = 1.2;
    int output_side = 224;

    void validate() const;
};

/// Row-major 2x3 affine map: [x', y'] = M * [x, y, 1].
struct Affine2 {
    std::array<double, 6> m{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

    Point2 apply(Point2 p) const noexcept {
        return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
    }
};

struct AlignedFace {
    ImageBuffer image;            // output_side x output_side
    Affine2 transform;            // source coordinates -> aligned coordinates
    FaceLandmarks source_landmarks;
    double angle = 0.0;           // rotation applied via rotate_about, radians
    double eye_distance = 0.0;    // d, source pixels
    PixelRect crop;               // crop rectangle in the rotated frame, pre-resize
};

/// Levels the eye line by rotating about the eye midpoint, crops by the
/// a/b/c rule (black padding outside the image), then resizes to a square.
/// Throws DegenerateLandmarks when the eyes are not more than 1 px apart.
AlignedFace align_face(const ImageBuffer& img, const FaceLandmarks& lm, const AlignParams& params = {});

/// Maps landmarks predicted on a resized face crop back to the original
/// image: p_src = (p.x / sx + box.x, p.y / sy + box.y).
FaceLandmarks map_landmarks_to_source(const FaceLandmarks& lm_crop, const BoundingBox& crop_box,
                                      double sx, double sy);

}  // namespace animalid

#endif  // ANIMALID_ALIGN_HPP
