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

#ifndef ANIMALID_SYNTHETIC_HPP
#define ANIMALID_SYNTHETIC_HPP

// Synthetic annotated faces for demos and tests: a textured background with
// dark disks at the eye and nose centers.

#include <cstdint>
#include <string>

#include "animalid/image.hpp"
#include "animalid/landmarks.hpp"
#include "animalid/manifest.hpp"

namespace animalid {

/// RGB image with a seeded low-frequency texture and dark disks (radius
/// proportional to eye distance) at each landmark.
ImageBuffer render_synthetic_face(int width, int height, const FaceLandmarks& lm, std::uint64_t seed);

struct SyntheticDatasetSpec {
    std::size_t identities = 51;
    std::size_t records = 2877;
    int image_width = 320;
    int image_height = 320;
    double min_eye_distance = 50.0;
    double max_eye_distance = 70.0;
    double max_tilt_degrees = 20.0;
    std::uint64_t seed = 7;
    std::string path_prefix = "synthetic";
};

/// Records spread round-robin over identities (counts differ by at most
/// one), each with bbox and landmarks; sources cycle photo/video/phone.
DatasetManifest make_synthetic_manifest(const SyntheticDatasetSpec& spec);

/// The image a synthetic record describes, regenerated from its path.
ImageBuffer synthesize_record_image(const ManifestRecord& record, const SyntheticDatasetSpec& spec);

}  // namespace animalid

#endif  // ANIMALID_SYNTHETIC_HPP
