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

#include <algorithm>
#include <set>

#include "animalid/dedup.hpp"
#include "animalid/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace animalid {
namespace {

SsimParams fixture_ssim() {
    SsimParams p;
    p.compare_size = fixture::DedupFixture::kSide;
    return p;
}

std::vector<std::vector<double>> naive_matrix(const std::vector<ImageBuffer>& imgs, const SsimParams& p) {
    std::vector<std::vector<double>> m(imgs.size(), std::vector<double>(imgs.size(), 1.0));
    for (std::size_t i = 0; i < imgs.size(); ++i) {
        for (std::size_t j = i + 1; j < imgs.size(); ++j) m[i][j] = m[j][i] = oracle::naive_ssim(imgs[i], imgs[j], p);
    }
    return m;
}

TEST(DedupGreedy, SingletonIsKept) {
    const auto o = dedup_greedy(1, 0, 0.5, [](std::size_t, std::size_t) { return 1.0; });
    EXPECT_EQ(o.retained, std::vector<std::size_t>{0});
    EXPECT_TRUE(o.discarded.empty());
    EXPECT_EQ(o.ssim_calls, 0u);
}

TEST(DedupGreedy, ThresholdAboveOneKeepsEverything) {
    const auto o = dedup_greedy(6, 2, 1.01, [](std::size_t, std::size_t) { return 1.0; });
    EXPECT_EQ(o.retained.size(), 6u);
    EXPECT_EQ(o.retained.front(), 2u);
}

TEST(DedupGreedy, EmptyInputRejected) {
    try {
        dedup_greedy(0, 0, 0.5, [](std::size_t, std::size_t) { return 0.0; });
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
    EXPECT_THROW(dedup_individual({}, DedupParams{}), Error);
}

TEST(DedupGreedy, MatchesOracleOnRandomMatrices) {
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m[i][j] = m[j][i] = rng.unit();
        const std::size_t start = rng.below(n);
        const double th = rng.unit();
        const auto o = dedup_greedy(n, start, th, [&](std::size_t a, std::size_t b) { return m[a][b]; });
        const auto want = oracle::greedy_filter(m, start, th);
        EXPECT_EQ(o.retained, want.retained);
        EXPECT_EQ(o.discarded, want.discarded);
        // Every discarded image is similar to some retained image; retained
        // images are pairwise dissimilar.
        for (std::size_t d : o.discarded) {
            EXPECT_TRUE(std::any_of(o.retained.begin(), o.retained.end(), [&](std::size_t r) { return m[d][r] >= th; }));
        }
        for (std::size_t a : o.retained)
            for (std::size_t b : o.retained)
                if (a != b) {
                    EXPECT_LT(m[a][b], th);
                }
    }
}

TEST(DedupIndividual, DuplicatesAndNoise) {
    const auto a = oracle::smooth_image(64, 64, 1);
    const auto c = oracle::random_image(64, 64, 1, 2);
    const std::vector<ImageBuffer> imgs{a, a, c};
    const SsimParams p = fixture_ssim();
    const auto m = naive_matrix(imgs, p);
    EXPECT_NEAR(m[0][1], 1.0, 1e-12);
    EXPECT_LT(m[0][2], 0.9);
    const auto o = dedup_greedy(3, 0, 0.9, [&](std::size_t i, std::size_t j) { return ssim(imgs[i], imgs[j], p); });
    EXPECT_EQ(o.retained, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(o.discarded, std::vector<std::size_t>{1});
    // Whatever the start, one of the duplicates and the noise image survive.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        DedupParams dp;
        dp.threshold = 0.9;
        dp.seed = seed;
        dp.ssim = p;
        const auto r = dedup_individual(imgs, dp);
        std::set<std::size_t> kept(r.retained.begin(), r.retained.end());
        EXPECT_EQ(kept.size(), 2u);
        EXPECT_TRUE(kept.contains(2));
    }
}

TEST(DedupIndividual, CountsSsimCalls) {
    const auto fx = fixture::make_dedup_fixture();
    std::vector<ImageBuffer> imgs;
    for (int k = 0; k < 5; ++k) imgs.push_back(fx.images.at("ind0/img" + std::to_string(k) + ".png"));
    DedupParams dp;
    dp.ssim = fixture_ssim();
    std::atomic<std::size_t> counter{0};
    const auto o = dedup_individual(imgs, dp, &counter);
    EXPECT_EQ(counter.load(), o.ssim_calls);
    EXPECT_LE(o.ssim_calls, 10u);
    EXPECT_GE(o.ssim_calls, 4u);
}

TEST(DedupDataset, FixtureRetainsOraclePrediction) {
    const auto fx = fixture::make_dedup_fixture();
    DedupParams p;
    p.threshold = 0.5;
    p.seed = 77;
    p.ssim = fixture_ssim();
    const auto report = dedup_dataset(fx.manifest, p, [&](const ManifestRecord& r) { return fx.load(r); },
                                      {ImageSource::VideoFrame});
    ASSERT_EQ(report.individuals.size(), 5u);
    for (const auto& ind : report.individuals) {
        std::vector<ImageBuffer> imgs;
        std::vector<std::string> paths;
        for (const auto& r : fx.manifest.records) {
            if (r.identity == ind.identity) {
                imgs.push_back(fx.load(r));
                paths.push_back(r.path);
            }
        }
        const std::size_t start = Rng(identity_seed(p.seed, ind.identity)).below(imgs.size());
        const auto want = oracle::greedy_filter(naive_matrix(imgs, p.ssim), start, p.threshold);
        ASSERT_EQ(ind.retained.size(), 3u) << ind.identity;
        for (std::size_t k = 0; k < want.retained.size(); ++k) EXPECT_EQ(ind.retained[k], paths[want.retained[k]]);
        for (std::size_t k = 0; k < want.discarded.size(); ++k) EXPECT_EQ(ind.discarded[k], paths[want.discarded[k]]);
    }
    EXPECT_EQ(report.total_retained, 15u);
    EXPECT_EQ(report.total_discarded, 10u);
}

TEST(DedupDataset, SingletonsAreAllRetained) {
    DatasetManifest m;
    for (const char* id : {"a", "b"}) {
        ManifestRecord r;
        r.path = std::string(id) + ".png";
        r.identity = id;
        r.source = ImageSource::Photo;
        m.records.push_back(r);
    }
    const auto report = dedup_dataset(m, {}, [](const ManifestRecord&) { return oracle::random_image(20, 20, 1, 1); },
                                      {ImageSource::Photo});
    EXPECT_EQ(report.total_retained, 2u);
    EXPECT_EQ(report.total_discarded, 0u);
}

TEST(DedupDataset, ExactDuplicatesCollapse) {
    DatasetManifest m;
    for (int id = 0; id < 3; ++id) {
        for (int k = 0; k < 4; ++k) {
            ManifestRecord r;
            r.identity = "id" + std::to_string(id);
            r.path = r.identity + "_" + std::to_string(k);
            r.source = ImageSource::Phone;
            m.records.push_back(r);
        }
    }
    DedupParams p;
    p.threshold = 0.99;
    const auto report = dedup_dataset(
        m, p, [](const ManifestRecord& r) { return oracle::random_image(30, 30, 3, fnv1a(r.identity)); },
        {ImageSource::Phone});
    for (const auto& ind : report.individuals) EXPECT_EQ(ind.retained.size(), 1u);
}

TEST(DedupDataset, SourceFilterPassesOthersThrough) {
    auto fx = fixture::make_dedup_fixture();
    fx.manifest.records[0].source = ImageSource::Photo;
    fx.manifest.records[0].video_id.reset();
    fx.manifest.records[0].frame_index.reset();
    DedupParams p;
    p.ssim = fixture_ssim();
    const auto report = dedup_dataset(fx.manifest, p, [&](const ManifestRecord& r) { return fx.load(r); },
                                      {ImageSource::VideoFrame});
    EXPECT_EQ(report.passed_through, std::vector<std::string>{fx.manifest.records[0].path});
    const auto cleaned = apply_dedup(fx.manifest, report);
    EXPECT_EQ(cleaned.records.size(), report.total_retained + 1);
    EXPECT_EQ(cleaned.records.front().path, fx.manifest.records[0].path);
}

TEST(DedupDataset, ReportIsDeterministicAcrossJobs) {
    const auto fx = fixture::make_dedup_fixture();
    DedupParams p;
    p.seed = 5;
    p.ssim = fixture_ssim();
    auto run = [&](int jobs) {
        return dedup_dataset(fx.manifest, p, [&](const ManifestRecord& r) { return fx.load(r); },
                             {ImageSource::VideoFrame}, jobs)
            .to_jsonl();
    };
    const std::string one = run(1);
    EXPECT_EQ(one, run(1));
    EXPECT_EQ(one, run(4));
    EXPECT_NE(one.find("\"threshold\":0.6"), std::string::npos);
}

TEST(DedupDataset, ErrorsNameTheIdentity) {
    const auto fx = fixture::make_dedup_fixture();
    try {
        dedup_dataset(fx.manifest, {}, [](const ManifestRecord& r) -> ImageBuffer {
            if (r.identity == "ind3") throw Error(ErrorCode::Io, "cannot read");
            return ImageBuffer(16, 16, 1);
        }, {ImageSource::VideoFrame}, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Io);
        EXPECT_NE(std::string(e.what()).find("ind3"), std::string::npos);
    }
}

}  // namespace
}  // namespace animalid
