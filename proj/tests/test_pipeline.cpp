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

#include <json.hpp>

#include "animalid/error.hpp"
#include "animalid/eval.hpp"
#include "animalid/parallel.hpp"
#include "animalid/pipeline.hpp"
#include "animalid/synthetic.hpp"

namespace animalid {
namespace {

Detection det(double w, double h, double conf, double x = 0) { return {{x, 0, w, h}, conf}; }

TEST(SelectPrimaryFace, Rules) {
    EXPECT_EQ(select_primary_face(std::vector{det(5, 5, 0.1)}), det(5, 5, 0.1));
    EXPECT_EQ(select_primary_face(std::vector{det(10, 10, 0.9), det(20, 20, 0.1), det(5, 10, 1.0)}),
              det(20, 20, 0.1));
    // Equal area: higher confidence, then earlier input.
    EXPECT_EQ(select_primary_face(std::vector{det(10, 10, 0.7), det(20, 5, 0.9)}), det(20, 5, 0.9));
    EXPECT_EQ(select_primary_face(std::vector{det(20, 5, 0.9), det(10, 10, 0.7)}), det(20, 5, 0.9));
    EXPECT_EQ(select_primary_face(std::vector{det(10, 10, 0.5, 1), det(10, 10, 0.5, 2)}), det(10, 10, 0.5, 1));
    EXPECT_EQ(select_primary_face(std::vector{det(10, 10, 0.5, 2), det(10, 10, 0.5, 1)}), det(10, 10, 0.5, 2));
    try {
        select_primary_face({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoFace);
    }
}

TEST(SelectPrimaryFace, PermutationStableWithoutTies) {
    std::vector<Detection> d{det(3, 3, 0.2), det(9, 1, 0.4), det(7, 7, 0.1), det(2, 8, 0.9)};
    const auto want = select_primary_face(d);
    std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.confidence < b.confidence; });
    do {
        EXPECT_EQ(select_primary_face(d), want);
    } while (std::next_permutation(d.begin(), d.end(), [](const auto& a, const auto& b) {
        return a.confidence < b.confidence;
    }));
}

TEST(ClampDetections, ClipsAndDrops) {
    const auto out = clamp_detections({{{-5, -5, 20, 20}, 0.5}, {{200, 200, 5, 5}, 0.5}, {{1, 1, 2, 2}, NAN}}, 100, 100);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].box, (BoundingBox{0, 0, 15, 15}));
}

struct MockWorld {
    DatasetManifest manifest;
    SyntheticDatasetSpec spec;
    ProviderSet providers;

    explicit MockWorld(std::size_t identities = 5, std::size_t records = 30) {
        spec.identities = identities;
        spec.records = records;
        manifest = make_synthetic_manifest(spec);
        providers = make_mock_providers(manifest);
    }
    ImageBuffer image(std::size_t i) const { return synthesize_record_image(manifest.records[i], spec); }
};

TEST(MockDetector, ReturnsAnnotatedBoxes) {
    MockWorld w;
    const auto& r = w.manifest.records[3];
    const auto d = w.providers.detector->detect_faces(w.image(3), {r.path, {}});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].box, *r.bbox);
    EXPECT_TRUE(w.providers.detector->detect_faces(w.image(3), {"unknown.png", {}}).empty());
}

TEST(MockDetector, MultipleFaces) {
    MockWorld w;
    auto index = std::make_shared<AnnotationIndex>(w.manifest);
    MockDetector two(index, {{"group.png", {det(10, 10, 0.9), det(30, 30, 0.8)}}});
    EXPECT_EQ(two.detect_faces(ImageBuffer(64, 64, 1), {"group.png", {}}).size(), 2u);
}

TEST(MockSegmenter, RecoversAnnotatedLandmarks) {
    MockWorld w;
    const Pipeline p(w.providers);
    for (std::size_t i = 0; i < w.manifest.records.size(); ++i) {
        const auto a = p.analyze(w.image(i), w.manifest.records[i].path, false);
        const auto& truth = *w.manifest.records[i].landmarks;
        EXPECT_EQ(a.face.box, *w.manifest.records[i].bbox);
        for (auto [got, want] : {std::pair{a.source_landmarks.left_eye, truth.left_eye},
                                 std::pair{a.source_landmarks.right_eye, truth.right_eye},
                                 std::pair{a.source_landmarks.nose, truth.nose}}) {
            EXPECT_LE(std::hypot(got.x - want.x, got.y - want.y), 0.5);
        }
    }
}

TEST(MockSegmenter, MasksAreBinaryAndMissingLandmarksFail) {
    MockWorld w;
    CropGeometry g{*w.manifest.records[0].bbox, 1.0, 1.0};
    g.sx = 224.0 / g.box.w;
    g.sy = 224.0 / g.box.h;
    const auto m = w.providers.segmenter->segment_face(ImageBuffer(224, 224, 3), {w.manifest.records[0].path, g});
    for (const auto* ch : {&m.left_eye, &m.right_eye, &m.nose}) {
        for (auto v : ch->pixels()) EXPECT_TRUE(v == 0 || v == 255);
    }
    try {
        w.providers.segmenter->segment_face(ImageBuffer(224, 224, 3), {"nothing.png", g});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Provider);
    }
}

TEST(MockEmbedder, ClusteredByIdentity) {
    MockWorld w(8, 40);
    const ImageBuffer face(224, 224, 3);
    std::vector<Embedding> e;
    for (const auto& r : w.manifest.records) e.push_back(checked_embed(*w.providers.embedder, face, {r.path, {}}));
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < e.size(); ++j) {
            const double s = cosine_similarity(e[i], e[j]);
            if (w.manifest.records[i].identity == w.manifest.records[j].identity) {
                EXPECT_EQ(e[i], e[j]);
            } else {
                EXPECT_LT(s, 0.3);
            }
        }
    }
    EXPECT_EQ(checked_embed(*w.providers.embedder, face, {w.manifest.records[0].path, {}}), e[0]);
}

TEST(MockEmbedder, ImageNoiseSeparatesImagesButKeepsClusters) {
    MockWorld w(4, 12);
    MockEmbedder::Options o;
    o.image_noise = 0.05;
    const auto p = make_mock_providers(w.manifest, o);
    const ImageBuffer face(224, 224, 3);
    const auto a = checked_embed(*p.embedder, face, {w.manifest.records[0].path, {}});
    const auto b = checked_embed(*p.embedder, face, {w.manifest.records[4].path, {}});
    EXPECT_NE(a, b);
    EXPECT_GT(cosine_similarity(a, b), 0.8);
    const auto other = checked_embed(*p.embedder, face, {w.manifest.records[1].path, {}});
    EXPECT_LT(cosine_similarity(a, other), 0.3);
}

class BrokenEmbedder : public FaceEmbedder {
public:
    explicit BrokenEmbedder(std::vector<float> out) : out_(std::move(out)) {}
    const ProviderMetadata& metadata() const override { return meta_; }
    std::vector<float> embed_face(const ImageBuffer&, const ProviderContext&) const override { return out_; }

private:
    std::vector<float> out_;
    ProviderMetadata meta_{"broken", 224, 3, true};
};

TEST(CheckedEmbed, RejectsBadProviderOutput) {
    for (const auto& out : {std::vector<float>{0, 0, 0}, std::vector<float>{1, 2}, std::vector<float>{1, NAN, 0}}) {
        try {
            checked_embed(BrokenEmbedder(out), ImageBuffer(224, 224, 3), {});
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::Provider);
        }
    }
    EXPECT_EQ(checked_embed(BrokenEmbedder({0, 3, 4}), ImageBuffer(224, 224, 3), {}).norm(), 5.0);
}

TEST(ProviderMetadata, Validation) {
    EXPECT_THROW((ProviderMetadata{"x", 8, 0, true}.validate(false)), Error);
    EXPECT_THROW((ProviderMetadata{"x", 224, 0, true}.validate(true)), Error);
    EXPECT_NO_THROW((ProviderMetadata{"x", 224, 0, true}.validate(false)));
}

TEST(ResolveProviders, MockAndExternal) {
    MockWorld w;
    EXPECT_NE(resolve_providers("mock", w.manifest).embedder, nullptr);
    try {
        resolve_providers("external:nothing-registered", w.manifest);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Provider);
    }
    EXPECT_THROW(resolve_providers("bogus", w.manifest), Error);
    std::string seen;
    register_external_provider("fake", [&](const std::string& spec) {
        seen = spec;
        return make_mock_providers(w.manifest);
    });
    EXPECT_NE(resolve_providers("external:fake:model.onnx", w.manifest).detector, nullptr);
    EXPECT_EQ(seen, "fake:model.onnx");
}

TEST(Pipeline, IdentifiesEnrolledIdentity) {
    MockWorld w;
    const Pipeline p(w.providers);
    Gallery g;
    for (std::size_t i = 0; i < 10; ++i) {
        g.enroll(w.manifest.records[i].identity, p.embed(w.image(i), w.manifest.records[i].path),
                 w.manifest.records[i].path);
    }
    for (std::size_t i = 10; i < w.manifest.records.size(); ++i) {
        const auto r = p.run(w.image(i), w.manifest.records[i].path, g, 0.5);
        EXPECT_EQ(r.identified, w.manifest.records[i].identity);
    }
    const auto unknown = p.run(w.image(12), w.manifest.records[12].path, g, 1.5);
    EXPECT_FALSE(unknown.identified.has_value());
    EXPECT_EQ(unknown.ranking.size(), 5u);
}

TEST(Pipeline, NoFaceFailsAtDetect) {
    MockWorld w;
    const Pipeline p(w.providers);
    Gallery g;
    g.enroll("a", Embedding(std::vector<float>(128, 1.0f)));
    try {
        p.run(w.image(0), "not-in-manifest.png", g, std::nullopt);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "detect");
        EXPECT_EQ(e.code(), ErrorCode::NoFace);
        EXPECT_EQ(exit_code_for(e.code()), 4);
    }
}

TEST(Pipeline, TraceListsStagesInOrder) {
    MockWorld w;
    const Pipeline p(w.providers);
    Gallery g;
    g.enroll(w.manifest.records[0].identity, p.embed(w.image(0), w.manifest.records[0].path));
    std::vector<TraceEvent> trace;
    p.run(w.image(5), w.manifest.records[5].path, g, std::nullopt, Pooling::Max, &trace);
    std::vector<std::string> stages;
    for (const auto& t : trace) {
        stages.push_back(t.stage);
        EXPECT_TRUE(nlohmann::json::parse(t.detail).is_object());
    }
    EXPECT_EQ(stages, (std::vector<std::string>{"detect", "select", "crop", "segment", "landmarks", "map", "align",
                                                "embed", "identify"}));
}

TEST(Pipeline, SingleThreadedProvidersAreSerialized) {
    class Counting : public FaceEmbedder {
    public:
        explicit Counting(std::shared_ptr<const FaceEmbedder> inner) : inner_(std::move(inner)) {
            meta_ = inner_->metadata();
            meta_.thread_safe = false;
        }
        const ProviderMetadata& metadata() const override { return meta_; }
        std::vector<float> embed_face(const ImageBuffer& img, const ProviderContext& ctx) const override {
            if (active_.fetch_add(1) != 0) overlapped_ = true;
            auto v = inner_->embed_face(img, ctx);
            active_.fetch_sub(1);
            return v;
        }
        mutable std::atomic<int> active_{0};
        mutable std::atomic<bool> overlapped_{false};

    private:
        std::shared_ptr<const FaceEmbedder> inner_;
        ProviderMetadata meta_;
    };
    MockWorld w;
    auto counting = std::make_shared<Counting>(w.providers.embedder);
    ProviderSet set = w.providers;
    set.embedder = counting;
    const Pipeline p(set);
    std::vector<ImageBuffer> imgs;
    for (std::size_t i = 0; i < w.manifest.records.size(); ++i) imgs.push_back(w.image(i));
    parallel_for(imgs.size(), 8, [&](std::size_t i) { p.embed(imgs[i], w.manifest.records[i].path); });
    EXPECT_FALSE(counting->overlapped_.load());
}

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(ErrorCode::Data), 2);
    EXPECT_EQ(exit_code_for(ErrorCode::GalleryTruncated), 2);
    EXPECT_EQ(exit_code_for(ErrorCode::Provider), 3);
    EXPECT_EQ(exit_code_for(ErrorCode::NoFace), 4);
    EXPECT_EQ(exit_code_for(ErrorCode::LandmarkNotFound), 4);
    EXPECT_EQ(exit_code_for(ErrorCode::DegenerateLandmarks), 4);
}

}  // namespace
}  // namespace animalid
