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

#ifndef ANIMALID_PROVIDERS_HPP
#define ANIMALID_PROVIDERS_HPP

// Seams between the pipeline and learned models. A provider takes tensors
// (images) in and returns the pipeline's domain types; the mocks below
// answer from manifest annotations so the full pipeline can run without
// model weights.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "animalid/gallery.hpp"
#include "animalid/image.hpp"
#include "animalid/landmarks.hpp"
#include "animalid/manifest.hpp"

namespace animalid {

struct Detection {
    BoundingBox box;
    double confidence = 1.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct ProviderMetadata {
    std::string name;
    int input_side = 224;
    std::size_t embedding_dim = 0;  // embedders only
    bool thread_safe = true;

    void validate(bool is_embedder) const;
};

/// Where a face crop came from. Mock providers use it to look up
/// annotations; real models may ignore it.
struct CropGeometry {
    BoundingBox box;  // integer-aligned crop rectangle in source coordinates
    double sx = 1.0;  // crop pixels -> provider pixels
    double sy = 1.0;
};

struct ProviderContext {
    std::string ref;                   // manifest path of the source image
    std::optional<CropGeometry> crop;  // set for segmenter calls
};

class FaceDetector {
public:
    virtual ~FaceDetector() = default;
    virtual const ProviderMetadata& metadata() const = 0;
    /// Zero or more faces, in no particular order. Failures throw Provider.
    virtual std::vector<Detection> detect_faces(const ImageBuffer& img, const ProviderContext& ctx) const = 0;
};

class FaceSegmenter {
public:
    virtual ~FaceSegmenter() = default;
    virtual const ProviderMetadata& metadata() const = 0;
    /// Masks at the crop's dimensions (input_side^2).
    virtual MaskTriple segment_face(const ImageBuffer& face_crop, const ProviderContext& ctx) const = 0;
};

class FaceEmbedder {
public:
    virtual ~FaceEmbedder() = default;
    virtual const ProviderMetadata& metadata() const = 0;
    /// Raw feature vector of metadata().embedding_dim values.
    virtual std::vector<float> embed_face(const ImageBuffer& aligned, const ProviderContext& ctx) const = 0;
};

/// Largest box area wins; ties go to higher confidence, then earlier input.
/// Throws NoFace on an empty sequence.
Detection select_primary_face(std::span<const Detection> detections);

/// Clamps boxes to the image and drops those left empty or with a
/// non-finite confidence.
std::vector<Detection> clamp_detections(std::vector<Detection> detections, int width, int height);

/// Calls the embedder and enforces the Embedding invariants at the seam:
/// wrong size, non-finite or all-zero output becomes a Provider error.
Embedding checked_embed(const FaceEmbedder& embedder, const ImageBuffer& aligned, const ProviderContext& ctx);

/// Annotation lookup shared by the mocks: path -> record.
class AnnotationIndex {
public:
    explicit AnnotationIndex(const DatasetManifest& manifest);
    const ManifestRecord* find(const std::string& ref) const;

private:
    std::map<std::string, ManifestRecord> by_path_;
};

/// Returns the manifest bbox of `ctx.ref` (confidence 1), or none.
class MockDetector final : public FaceDetector {
public:
    explicit MockDetector(std::shared_ptr<const AnnotationIndex> annotations,
                          std::map<std::string, std::vector<Detection>> extra = {});
    const ProviderMetadata& metadata() const override { return meta_; }
    std::vector<Detection> detect_faces(const ImageBuffer& img, const ProviderContext& ctx) const override;

private:
    std::shared_ptr<const AnnotationIndex> annotations_;
    std::map<std::string, std::vector<Detection>> extra_;
    ProviderMetadata meta_{"mock-detector", 224, 0, true};
};

/// Renders ground-truth disks from manifest landmarks mapped into the crop.
class MockSegmenter final : public FaceSegmenter {
public:
    explicit MockSegmenter(std::shared_ptr<const AnnotationIndex> annotations, int input_side = 224,
                           MaskParams mask_params = {});
    const ProviderMetadata& metadata() const override { return meta_; }
    MaskTriple segment_face(const ImageBuffer& face_crop, const ProviderContext& ctx) const override;

private:
    std::shared_ptr<const AnnotationIndex> annotations_;
    MaskParams mask_params_;
    ProviderMetadata meta_;
};

/// Identity-keyed embedding: a one-hot basis direction per identity plus
/// small noise keyed by the identity label, and optionally extra noise
/// keyed by the image ref. Integer hashing only, so outputs are identical
/// across platforms.
class MockEmbedder final : public FaceEmbedder {
public:
    struct Options {
        std::size_t dim = 128;
        double identity_noise = 0.02;  // per-coordinate amplitude
        double image_noise = 0.0;      // per-coordinate amplitude keyed by ref
        int input_side = 224;
    };

    MockEmbedder(std::shared_ptr<const AnnotationIndex> annotations, std::vector<std::string> identities,
                 Options options);
    const ProviderMetadata& metadata() const override { return meta_; }
    std::vector<float> embed_face(const ImageBuffer& aligned, const ProviderContext& ctx) const override;

    /// The vector for (identity, ref) without going through an image.
    std::vector<float> vector_for(const std::string& identity, const std::string& ref) const;

private:
    std::shared_ptr<const AnnotationIndex> annotations_;
    std::map<std::string, std::size_t> identity_slot_;
    Options options_;
    ProviderMetadata meta_;
};

struct ProviderSet {
    std::shared_ptr<const FaceDetector> detector;
    std::shared_ptr<const FaceSegmenter> segmenter;
    std::shared_ptr<const FaceEmbedder> embedder;
};

/// Mock trio over one manifest.
ProviderSet make_mock_providers(const DatasetManifest& manifest, MockEmbedder::Options options = {});

/// Adapter point for external inference runtimes, selected on the command
/// line as "external:<spec>". Factories are registered by name (the part of
/// <spec> before the first ':').
using ExternalProviderFactory = std::function<ProviderSet(const std::string& spec)>;
void register_external_provider(const std::string& name, ExternalProviderFactory factory);

/// Resolves "mock" or "external:<name>[:<args>]". Throws Provider for an
/// unknown selection.
ProviderSet resolve_providers(const std::string& selection, const DatasetManifest& manifest,
                              MockEmbedder::Options options = {});

}  // namespace animalid

#endif  // ANIMALID_PROVIDERS_HPP
