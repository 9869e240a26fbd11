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

#include "animalid/ssim.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "animalid/error.hpp"

namespace animalid {

namespace {

// Separable "valid" correlation of a side x side plane with taps x taps.
std::vector<double> filter_valid(const std::vector<double>& plane, int side,
                                 const std::vector<double>& taps) {
    const int w = static_cast<int>(taps.size());
    const int out = side - w + 1;
    std::vector<double> rows(static_cast<std::size_t>(side) * out);
    for (int y = 0; y < side; ++y) {
        const double* src = plane.data() + static_cast<std::size_t>(y) * side;
        double* dst = rows.data() + static_cast<std::size_t>(y) * out;
        for (int x = 0; x < out; ++x) {
            double acc = 0.0;
            for (int k = 0; k < w; ++k) acc += taps[k] * src[x + k];
            dst[x] = acc;
        }
    }
    std::vector<double> result(static_cast<std::size_t>(out) * out, 0.0);
    for (int k = 0; k < w; ++k) {
        const double t = taps[k];
        for (int y = 0; y < out; ++y) {
            const double* src = rows.data() + static_cast<std::size_t>(y + k) * out;
            double* dst = result.data() + static_cast<std::size_t>(y) * out;
            for (int x = 0; x < out; ++x) dst[x] += t * src[x];
        }
    }
    return result;
}

}  // namespace

void SsimParams::validate() const {
    if (window_side < 3 || window_side % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "ssim window_side must be odd and >= 3, got " + std::to_string(window_side));
    }
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ssim k1, k2 and dynamic_range must be > 0");
    }
    if (window_kind == WindowKind::Gaussian && !(sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ssim gaussian sigma must be > 0");
    }
    if (compare_size < window_side) {
        throw Error(ErrorCode::InvalidArgument, "ssim compare_size must be >= window_side");
    }
}

std::vector<double> window_taps(const SsimParams& params) {
    params.validate();
    std::vector<double> taps(static_cast<std::size_t>(params.window_side), 1.0);
    if (params.window_kind == WindowKind::Gaussian) {
        const int half = params.window_side / 2;
        for (int i = 0; i < params.window_side; ++i) {
            const double d = i - half;
            taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * params.sigma * params.sigma));
        }
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& t : taps) t /= sum;
    return taps;
}

SsimPrepared::SsimPrepared(const ImageBuffer& img, const SsimParams& params) {
    const auto taps = window_taps(params);
    side_ = params.compare_size;
    map_side_ = side_ - params.window_side + 1;

    const ImageBuffer gray = resize(to_grayscale(img), side_, side_);
    const auto px = gray.pixels();
    std::vector<double> plane(px.begin(), px.end());
    // Moments are taken about the global mean so flat regions give exactly
    // zero variance instead of a cancellation residue.
    const double global_mean =
        std::accumulate(plane.begin(), plane.end(), 0.0) / static_cast<double>(plane.size());
    centered_.resize(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) centered_[i] = plane[i] - global_mean;

    mean_ = filter_valid(plane, side_, taps);
    cmean_ = filter_valid(centered_, side_, taps);
    std::vector<double> sq(centered_.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = centered_[i] * centered_[i];
    var_ = filter_valid(sq, side_, taps);
    for (std::size_t i = 0; i < var_.size(); ++i) var_[i] -= cmean_[i] * cmean_[i];
}

double ssim(const SsimPrepared& a, const SsimPrepared& b, const SsimParams& params) {
    if (a.side_ != b.side_ || a.map_side_ != b.map_side_) {
        throw Error(ErrorCode::InvalidArgument, "ssim: prepared images use different params");
    }
    const auto taps = window_taps(params);
    std::vector<double> prod(a.centered_.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a.centered_[i] * b.centered_[i];
    const auto cross = filter_valid(prod, a.side_, taps);

    const double c1 = params.c1();
    const double c2 = params.c2();
    double total = 0.0;
    for (std::size_t i = 0; i < cross.size(); ++i) {
        const double mu_a = a.mean_[i];
        const double mu_b = b.mean_[i];
        const double cov = cross[i] - a.cmean_[i] * b.cmean_[i];
        const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
        const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (a.var_[i] + b.var_[i] + c2);
        total += num / den;
    }
    return total / static_cast<double>(cross.size());
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params) {
    return ssim(SsimPrepared(a, params), SsimPrepared(b, params), params);
}

}  // namespace animalid
