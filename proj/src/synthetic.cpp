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

#include "animalid/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "animalid/error.hpp"
#include "animalid/random.hpp"

namespace animalid {

ImageBuffer render_synthetic_face(int width, int height, const FaceLandmarks& lm, std::uint64_t seed) {
    ImageBuffer img(width, height, 3);
    Rng rng(seed);
    // Sum of a few random plane waves per channel.
    struct Wave {
        double fx, fy, phase, amp;
    };
    Wave waves[3][3];
    for (auto& channel : waves) {
        for (auto& w : channel) {
            w = Wave{rng.unit() * 0.08, rng.unit() * 0.08, rng.unit() * 2.0 * std::numbers::pi, 20.0 + 30.0 * rng.unit()};
        }
    }
    const double d = std::hypot(lm.right_eye.x - lm.left_eye.x, lm.right_eye.y - lm.left_eye.y);
    const double eye_r = std::max(2.0, 0.12 * d);
    const double nose_r = std::max(3.0, 0.18 * d);
    auto inside = [](double x, double y, Point2 c, double r) {
        const double dx = x - c.x;
        const double dy = y - c.y;
        return dx * dx + dy * dy <= r * r;
    };
    // sin(fx*px + fy*py + phase) = sin(u)cos(v) + cos(u)sin(v) with u on the
    // column and v on the row, so each wave needs one table per axis.
    struct Axis {
        std::vector<double> s, c;
    };
    Axis cols[3][3], rows[3][3];
    for (int ch = 0; ch < 3; ++ch) {
        for (int k = 0; k < 3; ++k) {
            const Wave& w = waves[ch][k];
            auto& cx = cols[ch][k];
            auto& ry = rows[ch][k];
            for (int x = 0; x < width; ++x) {
                cx.s.push_back(std::sin(w.fx * (x + 0.5) + w.phase));
                cx.c.push_back(std::cos(w.fx * (x + 0.5) + w.phase));
            }
            for (int y = 0; y < height; ++y) {
                ry.s.push_back(std::sin(w.fy * (y + 0.5)));
                ry.c.push_back(std::cos(w.fy * (y + 0.5)));
            }
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            const bool dark = inside(px, py, lm.left_eye, eye_r) || inside(px, py, lm.right_eye, eye_r) ||
                              inside(px, py, lm.nose, nose_r);
            for (int c = 0; c < 3; ++c) {
                if (dark) {
                    img.at(x, y, c) = 10;
                    continue;
                }
                double v = 150.0;
                for (int k = 0; k < 3; ++k) {
                    const auto& cx = cols[c][k];
                    const auto& ry = rows[c][k];
                    v += waves[c][k].amp * (cx.s[x] * ry.c[y] + cx.c[x] * ry.s[y]) / 3.0;
                }
                img.at(x, y, c) = saturate_u8(v);
            }
        }
    }
    return img;
}

namespace {

struct Face {
    FaceLandmarks landmarks;
    BoundingBox bbox;
};

Face synthetic_face(const SyntheticDatasetSpec& spec, std::uint64_t key) {
    Rng rng(key);
    const double d = spec.min_eye_distance + (spec.max_eye_distance - spec.min_eye_distance) * rng.unit();
    const double tilt = (2.0 * rng.unit() - 1.0) * spec.max_tilt_degrees * std::numbers::pi / 180.0;
    const double cx = spec.image_width / 2.0 + (2.0 * rng.unit() - 1.0) * 0.1 * spec.image_width;
    const double cy = spec.image_height / 2.0 + (2.0 * rng.unit() - 1.0) * 0.1 * spec.image_height - 0.3 * d;
    const double ux = std::cos(tilt);
    const double uy = std::sin(tilt);
    Face f;
    f.landmarks.left_eye = {cx - ux * d / 2.0, cy - uy * d / 2.0};
    f.landmarks.right_eye = {cx + ux * d / 2.0, cy + uy * d / 2.0};
    // Nose sits 0.8 d below the eye midpoint, perpendicular to the eye line.
    f.landmarks.nose = {cx - uy * 0.8 * d, cy + ux * 0.8 * d};
    const double side = 2.6 * d;
    const double bx = cx - side / 2.0;
    const double by = cy + 0.4 * d - side / 2.0;
    f.bbox = BoundingBox{bx, by, side, side};
    return f;
}

}  // namespace

DatasetManifest make_synthetic_manifest(const SyntheticDatasetSpec& spec) {
    if (spec.identities == 0) throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs identities");
    DatasetManifest m;
    std::vector<std::size_t> per_identity(spec.identities, 0);
    for (std::size_t i = 0; i < spec.records; ++i) {
        const std::size_t id = i % spec.identities;
        const std::size_t k = per_identity[id]++;
        char id_name[32];
        std::snprintf(id_name, sizeof(id_name), "id%03zu", id);
        char path[256];
        std::snprintf(path, sizeof(path), "%s/%s/%04zu.png", spec.path_prefix.c_str(), id_name, k);

        ManifestRecord r;
        r.path = path;
        r.identity = id_name;
        const Face f = synthetic_face(spec, splitmix64(spec.seed ^ fnv1a(r.path)));
        r.bbox = f.bbox;
        r.landmarks = f.landmarks;
        switch (k % 3) {
            case 0: r.source = ImageSource::Photo; break;
            case 1:
                r.source = ImageSource::VideoFrame;
                r.video_id = std::string(id_name) + "-v0";
                r.frame_index = static_cast<std::int64_t>(k) * 10;
                break;
            default: r.source = ImageSource::Phone; break;
        }
        m.records.push_back(std::move(r));
    }
    return m;
}

ImageBuffer synthesize_record_image(const ManifestRecord& record, const SyntheticDatasetSpec& spec) {
    if (!record.landmarks) throw Error(ErrorCode::Data, "synthetic record without landmarks");
    return render_synthetic_face(spec.image_width, spec.image_height, *record.landmarks,
                                 splitmix64(spec.seed ^ fnv1a(record.path) ^ 0xA5A5A5A5ULL));
}

}  // namespace animalid
