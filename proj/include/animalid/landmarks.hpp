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

#ifndef ANIMALID_LANDMARKS_HPP
#define ANIMALID_LANDMARKS_HPP

#include <span>
#include <string>

#include "animalid/image.hpp"

namespace animalid {

/// Eye and nose centers of one face. "Left" is the eye with the smaller x.
struct FaceLandmarks {
    Point2 left_eye;
    Point2 right_eye;
    Point2 nose;

    /// Throws Data if coordinates are non-finite, the eyes coincide, or
    /// left_eye.x >= right_eye.x.
    void validate() const;

    friend bool operator==(const FaceLandmarks&, const FaceLandmarks&) = default;
};

/// Three co-registered single-channel masks, each pixel 0 or 255.
/// Channel order everywhere (including files) is left eye, right eye, nose.
struct MaskTriple {
    ImageBuffer left_eye;
    ImageBuffer right_eye;
    ImageBuffer nose;

    /// Interleaves into a 3-channel image for persistence.
    ImageBuffer to_rgb() const;
    /// Splits a 3-channel raster back into masks. Throws Data unless every
    /// value is exactly 0 or 255.
    static MaskTriple from_rgb(const ImageBuffer& rgb);
};

struct MaskParams {
    double eye_radius = 7.0;
    double nose_radius = 13.0;
    int canvas_width = 224;
    int canvas_height = 224;
};

/// 255 at every pixel whose center lies within `radius` of a landmark.
/// Throws InvalidArgument if a landmark is outside the canvas.
MaskTriple render_masks(const FaceLandmarks& lm, const MaskParams& params = {});

/// Single disk mask; the building block of render_masks.
ImageBuffer render_disk(Point2 center, double radius, int width, int height);

/// Unweighted mean of the centers of pixels > 127.
/// Throws LandmarkNotFound on an empty mask.
Point2 centroid_of_mask(const ImageBuffer& mask);

struct ExtractedLandmarks {
    FaceLandmarks landmarks;
    bool eyes_swapped = false;
};

/// Centroid per channel; swaps the eyes if the left channel lies to the
/// right. Errors name the empty channel ("left_eye", "right_eye", "nose").
ExtractedLandmarks extract_landmarks(const MaskTriple& masks);

struct LandmarkErrorReport {
    double left_eye = 0.0;   // mean Euclidean distance, pixels
    double right_eye = 0.0;
    double nose = 0.0;
    double average = 0.0;    // mean of the three above
    // Mean squared distance per landmark, for cross-checking.
    double left_eye_sq = 0.0;
    double right_eye_sq = 0.0;
    double nose_sq = 0.0;
    double average_sq = 0.0;
    std::size_t count = 0;

    /// Fixed-width table: Left eye center | Right eye center | Nose center | Average error.
    std::string render_table() const;
};

LandmarkErrorReport localization_error(std::span<const FaceLandmarks> predicted,
                                       std::span<const FaceLandmarks> truth);

}  // namespace animalid

#endif  // ANIMALID_LANDMARKS_HPP
