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


#include <gtest/gtest.h>

#include "animalid/error.hpp"
#include "animalid/ssim.hpp"
#include "oracles.hpp"

namespace animalid {
namespace {

TEST(Ssim, SelfSimilarityIsOne) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto img = oracle::random_image(40 + static_cast<int>(s) * 13, 50, s % 2 ? 3 : 1, s);
        EXPECT_NEAR(ssim(img, img), 1.0, 1e-9);
    }
    const auto flat = oracle::constant_image(30, 30, 1, 77);
    EXPECT_NEAR(ssim(flat, flat), 1.0, 1e-9);
}

TEST(Ssim, ExactlySymmetric) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto a = oracle::random_image(64, 48, 3, 100 + s);
        const auto b = oracle::random_image(33, 71, 1, 200 + s);
        EXPECT_EQ(ssim(a, b), ssim(b, a));
    }
}

TEST(Ssim, ConstantImagesMatchClosedForm) {
    const SsimParams p;
    const double c1 = std::pow(0.01 * 255.0, 2);
    for (auto [u, v] : {std::pair{0, 255}, std::pair{10, 20}, std::pair{128, 128}}) {
        // Zero variance leaves only the luminance term.
        const double want = (2.0 * u * v + c1) / (double(u) * u + double(v) * v + c1);
        EXPECT_NEAR(ssim(oracle::constant_image(20, 20, 1, u), oracle::constant_image(9, 9, 1, v), p), want, 1e-9);
    }
    EXPECT_LT(ssim(oracle::constant_image(8, 8, 1, 0), oracle::constant_image(8, 8, 1, 255)), 0.01);
}

TEST(Ssim, AgreesWithNaiveReference) {
    SsimParams p;
    p.compare_size = 64;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = oracle::random_image(64, 64, 1, 300 + s);
        auto b = a;
        // Mix structure so scores spread over (0, 1).
        Rng rng(400 + s);
        const double keep = rng.unit();
        for (auto& px : b.pixels()) {
            if (rng.unit() > keep) px = static_cast<std::uint8_t>(rng.below(256));
        }
        EXPECT_NEAR(ssim(a, b, p), oracle::naive_ssim(a, b, p), 1e-6) << s;
    }
}

TEST(Ssim, UniformWindowAgreesWithNaiveReference) {
    SsimParams p;
    p.compare_size = 32;
    p.window_side = 7;
    p.window_kind = WindowKind::Uniform;
    const auto a = oracle::smooth_image(32, 32, 1);
    const auto b = oracle::smooth_image(32, 32, 2);
    EXPECT_NEAR(ssim(a, b, p), oracle::naive_ssim(a, b, p), 1e-6);
}

TEST(Ssim, PreparedMatchesDirect) {
    const SsimParams p;
    const auto a = oracle::random_image(70, 50, 3, 1);
    const auto b = oracle::smooth_image(90, 90, 2);
    EXPECT_EQ(ssim(SsimPrepared(a, p), SsimPrepared(b, p), p), ssim(a, b, p));
}

TEST(Ssim, DefaultPathUsesResizedGrayPlanes) {
    const SsimParams p;
    const auto a = oracle::random_image(80, 60, 3, 7);
    const auto b = oracle::random_image(50, 90, 3, 8);
    const auto ra = resize(to_grayscale(a), 256, 256);
    const auto rb = resize(to_grayscale(b), 256, 256);
    EXPECT_NEAR(ssim(a, b, p), oracle::naive_ssim(ra, rb, p), 1e-6);
}

TEST(Ssim, WindowTapsAreNormalized) {
    const auto taps = window_taps(SsimParams{});
    ASSERT_EQ(taps.size(), 11u);
    double s = 0;
    for (double t : taps) s += t;
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(taps[0], taps[10]);
}

TEST(Ssim, InvalidParamsRejected) {
    SsimParams p;
    p.window_side = 4;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.compare_size = 8;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.k1 = 0.0;
    EXPECT_THROW(p.validate(), Error);
}

}  // namespace
}  // namespace animalid
