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

#include "animalid/pipeline.hpp"

#include <json.hpp>

namespace animalid {

using nlohmann::json;

namespace {

template <typename Fn>
auto run_stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    } catch (const std::exception& e) {
        throw StageError(name, Error(ErrorCode::Provider, e.what()));
    }
}

// Calls fn under `lock` when the provider is single-threaded.
template <typename Fn>
auto guarded(std::mutex* lock, Fn&& fn) {
    if (lock == nullptr) return fn();
    std::lock_guard guard(*lock);
    return fn();
}

json point(Point2 p) { return json::array({p.x, p.y}); }
json box(const BoundingBox& b) { return json::array({b.x, b.y, b.w, b.h}); }
json landmarks(const FaceLandmarks& lm) {
    return {{"left_eye", point(lm.left_eye)}, {"right_eye", point(lm.right_eye)}, {"nose", point(lm.nose)}};
}

void emit(std::vector<TraceEvent>* trace, const char* stage, const json& detail) {
    if (trace) trace->push_back({stage, detail.dump()});
}

std::unique_ptr<std::mutex> lock_for(const ProviderMetadata& meta) {
    return meta.thread_safe ? nullptr : std::make_unique<std::mutex>();
}

}  // namespace

Pipeline::Pipeline(ProviderSet providers, AlignParams align) : providers_(std::move(providers)), align_(align) {
    if (!providers_.detector || !providers_.segmenter || !providers_.embedder) {
        throw Error(ErrorCode::Provider, "pipeline needs a detector, a segmenter and an embedder");
    }
    align_.validate();
    providers_.detector->metadata().validate(false);
    providers_.segmenter->metadata().validate(false);
    providers_.embedder->metadata().validate(true);
    detector_lock_ = lock_for(providers_.detector->metadata());
    segmenter_lock_ = lock_for(providers_.segmenter->metadata());
    embedder_lock_ = lock_for(providers_.embedder->metadata());
}

FaceAnalysis Pipeline::analyze(const ImageBuffer& img, const std::string& ref, bool embed,
                               std::vector<TraceEvent>* trace) const {
    FaceAnalysis a;
    ProviderContext ctx{ref, std::nullopt};

    const auto detections = run_stage("detect", [&] {
        auto raw = guarded(detector_lock_.get(), [&] { return providers_.detector->detect_faces(img, ctx); });
        return clamp_detections(std::move(raw), img.width(), img.height());
    });
    {
        json d = json::array();
        for (const auto& det : detections) d.push_back({{"box", box(det.box)}, {"confidence", det.confidence}});
        emit(trace, "detect", {{"detections", d}});
    }
    a.face = run_stage("detect", [&] { return select_primary_face(detections); });
    emit(trace, "select", {{"box", box(a.face.box)}, {"confidence", a.face.confidence}});

    const int side = providers_.segmenter->metadata().input_side;
    const ImageBuffer face_crop = run_stage("crop", [&] {
        const PixelRect r = crop_rect(a.face.box);
        a.crop.box = BoundingBox{static_cast<double>(r.x), static_cast<double>(r.y), static_cast<double>(r.w),
                                 static_cast<double>(r.h)};
        a.crop.sx = static_cast<double>(side) / static_cast<double>(r.w);
        a.crop.sy = static_cast<double>(side) / static_cast<double>(r.h);
        return resize(crop(img, a.face.box), side, side);
    });
    emit(trace, "crop", {{"box", box(a.crop.box)}, {"sx", a.crop.sx}, {"sy", a.crop.sy}, {"side", side}});

    ctx.crop = a.crop;
    const MaskTriple masks = run_stage("segment", [&] {
        return guarded(segmenter_lock_.get(), [&] { return providers_.segmenter->segment_face(face_crop, ctx); });
    });
    emit(trace, "segment", {{"width", masks.left_eye.width()}, {"height", masks.left_eye.height()}});

    a.crop_landmarks = run_stage("landmarks", [&] { return extract_landmarks(masks); });
    emit(trace, "landmarks",
         {{"landmarks", landmarks(a.crop_landmarks.landmarks)}, {"eyes_swapped", a.crop_landmarks.eyes_swapped}});

    a.source_landmarks = run_stage("map", [&] {
        return map_landmarks_to_source(a.crop_landmarks.landmarks, a.crop.box, a.crop.sx, a.crop.sy);
    });
    emit(trace, "map", {{"landmarks", landmarks(a.source_landmarks)}});

    a.aligned = run_stage("align", [&] { return align_face(img, a.source_landmarks, align_); });
    emit(trace, "align", {{"transform", a.aligned.transform.m},
                          {"angle", a.aligned.angle},
                          {"eye_distance", a.aligned.eye_distance},
                          {"crop", {a.aligned.crop.x, a.aligned.crop.y, a.aligned.crop.w, a.aligned.crop.h}}});

    if (embed) {
        a.embedding = run_stage("embed", [&] {
            const int in_side = providers_.embedder->metadata().input_side;
            const ImageBuffer input = in_side == a.aligned.image.width()
                                          ? a.aligned.image
                                          : resize(a.aligned.image, in_side, in_side);
            return guarded(embedder_lock_.get(), [&] { return checked_embed(*providers_.embedder, input, ctx); });
        });
        emit(trace, "embed", {{"dim", a.embedding->dim()}, {"norm", a.embedding->norm()}});
    }
    return a;
}

Embedding Pipeline::embed(const ImageBuffer& img, const std::string& ref, std::vector<TraceEvent>* trace) const {
    return *analyze(img, ref, true, trace).embedding;
}

MatchResult Pipeline::run(const ImageBuffer& img, const std::string& ref, const Gallery& gallery,
                          std::optional<double> threshold, Pooling pooling, std::vector<TraceEvent>* trace) const {
    const Embedding probe = embed(img, ref, trace);
    MatchResult result = run_stage("identify", [&] { return gallery.identify(probe, threshold, pooling); });
    if (trace) {
        json ranking = json::array();
        for (const auto& r : result.ranking) ranking.push_back({{"identity", r.identity}, {"score", r.score}});
        emit(trace, "identify",
             {{"decision", result.identified ? json(*result.identified) : json("unknown")},
              {"threshold", threshold ? json(*threshold) : json(nullptr)},
              {"ranking", ranking}});
    }
    return result;
}

MatchResult run_pipeline(const ImageBuffer& img, const std::string& ref, const ProviderSet& providers,
                         const AlignParams& align, const Gallery& gallery, std::optional<double> threshold,
                         std::vector<TraceEvent>* trace) {
    return Pipeline(providers, align).run(img, ref, gallery, threshold, Pooling::Max, trace);
}

}  // namespace animalid
