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

#ifndef ANIMALID_SSIM_HPP
#define ANIMALID_SSIM_HPP

#include <vector>

#include "animalid/image.hpp"

namespace animalid {

enum class WindowKind { Gaussian, Uniform };

struct SsimParams {
    int window_side = 11;
    WindowKind window_kind = WindowKind::Gaussian;
    double sigma = 1.5;  // Gaussian only
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
    int compare_size = 256;

    double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }

    /// Throws InvalidArgument when an invariant does not hold.
    void validate() const;
};

/// Normalized 1-D window taps (the 2-D window is their outer product).
std::vector<double> window_taps(const SsimParams& params);

/// An image reduced to the per-image quantities SSIM needs: the gray,
/// resized plane (centered on its global mean) and its windowed moments.
/// Preparing once lets a greedy filter compare one image against many.
class SsimPrepared {
public:
    SsimPrepared(const ImageBuffer& img, const SsimParams& params);

    int side() const noexcept { return side_; }
    int map_side() const noexcept { return map_side_; }

private:
    friend double ssim(const SsimPrepared& a, const SsimPrepared& b, const SsimParams& params);

    int side_ = 0;
    int map_side_ = 0;
    std::vector<double> centered_;  // plane minus its global mean
    std::vector<double> mean_;      // windowed mean of the raw plane
    std::vector<double> cmean_;     // windowed mean of the centered plane
    std::vector<double> var_;       // windowed variance
};

/// Mean SSIM over all full windows ("valid" region) of the two images after
/// grayscale conversion and resizing both to compare_size^2.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});
double ssim(const SsimPrepared& a, const SsimPrepared& b, const SsimParams& params);

}  // namespace animalid

#endif  // ANIMALID_SSIM_HPP
