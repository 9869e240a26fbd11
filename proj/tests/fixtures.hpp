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


// Constructed datasets shared by the unit and acceptance tests.

#ifndef ANIMALID_TESTS_FIXTURES_HPP
#define ANIMALID_TESTS_FIXTURES_HPP

#include <map>
#include <string>
#include <vector>

#include "animalid/manifest.hpp"
#include "oracles.hpp"

namespace fixture {

using animalid::DatasetManifest;
using animalid::ImageBuffer;

/// Five identities, each with three near-duplicates of one smooth texture
/// (small independent noise) followed by two unrelated noise images.
/// Images are 64x64 gray, so with compare_size 64 SSIM sees them as-is.
struct DedupFixture {
    static constexpr int kSide = 64;
    DatasetManifest manifest;
    std::map<std::string, ImageBuffer> images;

    const ImageBuffer& load(const animalid::ManifestRecord& r) const { return images.at(r.path); }
};

inline DedupFixture make_dedup_fixture() {
    DedupFixture f;
    for (int id = 0; id < 5; ++id) {
        const ImageBuffer base = oracle::smooth_image(DedupFixture::kSide, DedupFixture::kSide, 900 + id);
        for (int k = 0; k < 5; ++k) {
            ImageBuffer img;
            if (k < 3) {
                img = base;
                animalid::Rng rng(1000 + 10 * id + k);
                for (auto& p : img.pixels()) {
                    p = static_cast<std::uint8_t>(std::clamp<int>(p + static_cast<int>(rng.below(5)) - 2, 0, 255));
                }
            } else {
                img = oracle::random_image(DedupFixture::kSide, DedupFixture::kSide, 1, 2000 + 10 * id + k);
            }
            animalid::ManifestRecord r;
            r.identity = "ind" + std::to_string(id);
            r.path = r.identity + "/img" + std::to_string(k) + ".png";
            r.source = animalid::ImageSource::VideoFrame;
            r.video_id = r.identity + "-clip";
            r.frame_index = k * 10;
            f.images[r.path] = img;
            f.manifest.records.push_back(r);
        }
    }
    return f;
}

}  // namespace fixture

#endif  // ANIMALID_TESTS_FIXTURES_HPP
