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

#include "animalid/providers.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "animalid/error.hpp"
#include "animalid/random.hpp"

namespace animalid {

namespace {

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::string, ExternalProviderFactory>& registry() {
    static std::map<std::string, ExternalProviderFactory> r;
    return r;
}

// Deterministic value in [-1, 1) from two integer keys.
double keyed_unit(std::uint64_t key, std::uint64_t coordinate) {
    const std::uint64_t h = splitmix64(key ^ splitmix64(coordinate + 0x5851F42D4C957F2DULL));
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

void ProviderMetadata::validate(bool is_embedder) const {
    if (input_side < 16) throw Error(ErrorCode::Provider, name + ": input_side must be >= 16");
    if (is_embedder && embedding_dim < 1) throw Error(ErrorCode::Provider, name + ": embedding_dim must be >= 1");
}

Detection select_primary_face(std::span<const Detection> detections) {
    if (detections.empty()) throw Error(ErrorCode::NoFace, "no face detected");
    std::size_t best = 0;
    for (std::size_t i = 1; i < detections.size(); ++i) {
        const double a = detections[i].box.area();
        const double b = detections[best].box.area();
        if (a > b || (a == b && detections[i].confidence > detections[best].confidence)) best = i;
    }
    return detections[best];
}

std::vector<Detection> clamp_detections(std::vector<Detection> detections, int width, int height) {
    std::vector<Detection> out;
    out.reserve(detections.size());
    for (auto d : detections) {
        if (!std::isfinite(d.confidence) || !std::isfinite(d.box.x) || !std::isfinite(d.box.y) ||
            !std::isfinite(d.box.w) || !std::isfinite(d.box.h)) {
            continue;
        }
        const double x0 = std::clamp(d.box.x, 0.0, static_cast<double>(width));
        const double y0 = std::clamp(d.box.y, 0.0, static_cast<double>(height));
        const double x1 = std::clamp(d.box.x + d.box.w, 0.0, static_cast<double>(width));
        const double y1 = std::clamp(d.box.y + d.box.h, 0.0, static_cast<double>(height));
        if (!(x1 > x0) || !(y1 > y0)) continue;
        // Boxes already inside the image pass through bit-for-bit.
        if (x0 != d.box.x || y0 != d.box.y || x1 != d.box.x + d.box.w || y1 != d.box.y + d.box.h) {
            d.box = BoundingBox{x0, y0, x1 - x0, y1 - y0};
        }
        d.confidence = std::clamp(d.confidence, 0.0, 1.0);
        out.push_back(d);
    }
    return out;
}

Embedding checked_embed(const FaceEmbedder& embedder, const ImageBuffer& aligned, const ProviderContext& ctx) {
    std::vector<float> raw = embedder.embed_face(aligned, ctx);
    const auto& meta = embedder.metadata();
    if (raw.size() != meta.embedding_dim) {
        throw Error(ErrorCode::Provider, meta.name + " returned " + std::to_string(raw.size()) +
                                             " values, metadata declares " + std::to_string(meta.embedding_dim));
    }
    try {
        return Embedding(std::move(raw));
    } catch (const Error& e) {
        throw Error(ErrorCode::Provider, meta.name + " returned an invalid embedding: " + e.what());
    }
}

AnnotationIndex::AnnotationIndex(const DatasetManifest& manifest) {
    for (const auto& r : manifest.records) by_path_.emplace(r.path, r);
}

const ManifestRecord* AnnotationIndex::find(const std::string& ref) const {
    auto it = by_path_.find(ref);
    return it == by_path_.end() ? nullptr : &it->second;
}

MockDetector::MockDetector(std::shared_ptr<const AnnotationIndex> annotations,
                           std::map<std::string, std::vector<Detection>> extra)
    : annotations_(std::move(annotations)), extra_(std::move(extra)) {}

std::vector<Detection> MockDetector::detect_faces(const ImageBuffer& img, const ProviderContext& ctx) const {
    (void)img;
    std::vector<Detection> out;
    if (const auto* rec = annotations_->find(ctx.ref); rec && rec->bbox) out.push_back({*rec->bbox, 1.0});
    if (auto it = extra_.find(ctx.ref); it != extra_.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

MockSegmenter::MockSegmenter(std::shared_ptr<const AnnotationIndex> annotations, int input_side,
                             MaskParams mask_params)
    : annotations_(std::move(annotations)), mask_params_(mask_params),
      meta_{"mock-segmenter", input_side, 0, true} {
    meta_.validate(false);
    mask_params_.canvas_width = input_side;
    mask_params_.canvas_height = input_side;
}

MaskTriple MockSegmenter::segment_face(const ImageBuffer& face_crop, const ProviderContext& ctx) const {
    const auto* rec = annotations_->find(ctx.ref);
    if (rec == nullptr || !rec->landmarks) {
        throw Error(ErrorCode::Provider, "mock segmenter: no landmark annotation for '" + ctx.ref + "'");
    }
    if (!ctx.crop) throw Error(ErrorCode::Provider, "mock segmenter: missing crop geometry");
    if (face_crop.width() != meta_.input_side || face_crop.height() != meta_.input_side) {
        throw Error(ErrorCode::Provider, "mock segmenter: crop is not input_side^2");
    }
    const CropGeometry& g = *ctx.crop;
    auto to_crop = [&](Point2 p) { return Point2{(p.x - g.box.x) * g.sx, (p.y - g.box.y) * g.sy}; };
    const FaceLandmarks lm{to_crop(rec->landmarks->left_eye), to_crop(rec->landmarks->right_eye),
                           to_crop(rec->landmarks->nose)};
    try {
        return render_masks(lm, mask_params_);
    } catch (const Error& e) {
        throw Error(ErrorCode::Provider, std::string("mock segmenter: ") + e.what());
    }
}

MockEmbedder::MockEmbedder(std::shared_ptr<const AnnotationIndex> annotations, std::vector<std::string> identities,
                           Options options)
    : annotations_(std::move(annotations)), options_(options) {
    for (const auto& id : identities) identity_slot_.try_emplace(id, identity_slot_.size());
    options_.dim = std::max(options_.dim, identity_slot_.size());
    meta_ = ProviderMetadata{"mock-embedder", options_.input_side, options_.dim, true};
    meta_.validate(true);
}

std::vector<float> MockEmbedder::vector_for(const std::string& identity, const std::string& ref) const {
    auto it = identity_slot_.find(identity);
    if (it == identity_slot_.end()) {
        throw Error(ErrorCode::Provider, "mock embedder: unknown identity '" + identity + "'");
    }
    const std::uint64_t id_key = fnv1a(identity);
    const std::uint64_t ref_key = fnv1a(ref);
    std::vector<float> v(options_.dim);
    for (std::size_t c = 0; c < v.size(); ++c) {
        double x = c == it->second ? 1.0 : 0.0;
        x += options_.identity_noise * keyed_unit(id_key, c);
        if (options_.image_noise > 0.0) x += options_.image_noise * keyed_unit(ref_key, c);
        v[c] = static_cast<float>(x);
    }
    return v;
}

std::vector<float> MockEmbedder::embed_face(const ImageBuffer& aligned, const ProviderContext& ctx) const {
    (void)aligned;
    const auto* rec = annotations_->find(ctx.ref);
    if (rec == nullptr) throw Error(ErrorCode::Provider, "mock embedder: no annotation for '" + ctx.ref + "'");
    return vector_for(rec->identity, ctx.ref);
}

ProviderSet make_mock_providers(const DatasetManifest& manifest, MockEmbedder::Options options) {
    auto index = std::make_shared<const AnnotationIndex>(manifest);
    ProviderSet set;
    set.detector = std::make_shared<MockDetector>(index);
    set.segmenter = std::make_shared<MockSegmenter>(index, 224);
    set.embedder = std::make_shared<MockEmbedder>(index, manifest.identities(), options);
    return set;
}

void register_external_provider(const std::string& name, ExternalProviderFactory factory) {
    std::lock_guard lock(registry_mutex());
    registry()[name] = std::move(factory);
}

ProviderSet resolve_providers(const std::string& selection, const DatasetManifest& manifest,
                              MockEmbedder::Options options) {
    if (selection == "mock") return make_mock_providers(manifest, options);
    const std::string prefix = "external:";
    if (selection.rfind(prefix, 0) == 0) {
        const std::string spec = selection.substr(prefix.size());
        const std::string name = spec.substr(0, spec.find(':'));
        ExternalProviderFactory factory;
        {
            std::lock_guard lock(registry_mutex());
            auto it = registry().find(name);
            if (it != registry().end()) factory = it->second;
        }
        if (!factory) {
            throw Error(ErrorCode::Provider, "no external inference runtime registered under '" + name + "'");
        }
        ProviderSet set = factory(spec);
        if (!set.detector || !set.segmenter || !set.embedder) {
            throw Error(ErrorCode::Provider, "external runtime '" + name + "' did not supply all three providers");
        }
        return set;
    }
    throw Error(ErrorCode::Provider, "unknown provider selection '" + selection + "'");
}

}  // namespace animalid
