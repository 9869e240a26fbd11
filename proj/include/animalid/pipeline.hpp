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

#ifndef ANIMALID_PIPELINE_HPP
#define ANIMALID_PIPELINE_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "animalid/align.hpp"
#include "animalid/error.hpp"
#include "animalid/gallery.hpp"
#include "animalid/providers.hpp"

namespace animalid {

/// An Error annotated with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.code(), "stage " + stage + ": " + cause.what()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct TraceEvent {
    std::string stage;
    std::string detail;  // compact JSON object
};

struct FaceAnalysis {
    Detection face;
    CropGeometry crop;
    ExtractedLandmarks crop_landmarks;  // in the provider crop frame
    FaceLandmarks source_landmarks;     // in original-image coordinates
    AlignedFace aligned;
    std::optional<Embedding> embedding;
};

/// detect -> select_primary_face -> crop+resize -> segment ->
/// extract_landmarks -> map_landmarks_to_source -> align_face -> embed ->
/// identify. Providers that declare themselves single-threaded are
/// called under a lock; everything else runs concurrently.
class Pipeline {
public:
    Pipeline(ProviderSet providers, AlignParams align = {});

    /// Stages up to and including alignment (and embedding if `embed`).
    FaceAnalysis analyze(const ImageBuffer& img, const std::string& ref, bool embed,
                         std::vector<TraceEvent>* trace = nullptr) const;

    /// Stages up to the embedding.
    Embedding embed(const ImageBuffer& img, const std::string& ref, std::vector<TraceEvent>* trace = nullptr) const;

    /// Full flow against `gallery`.
    MatchResult run(const ImageBuffer& img, const std::string& ref, const Gallery& gallery,
                    std::optional<double> threshold, Pooling pooling = Pooling::Max,
                    std::vector<TraceEvent>* trace = nullptr) const;

    const ProviderSet& providers() const noexcept { return providers_; }
    const AlignParams& align_params() const noexcept { return align_; }

private:
    ProviderSet providers_;
    AlignParams align_;
    std::unique_ptr<std::mutex> detector_lock_;
    std::unique_ptr<std::mutex> segmenter_lock_;
    std::unique_ptr<std::mutex> embedder_lock_;
};

MatchResult run_pipeline(const ImageBuffer& img, const std::string& ref, const ProviderSet& providers,
                         const AlignParams& align, const Gallery& gallery, std::optional<double> threshold,
                         std::vector<TraceEvent>* trace = nullptr);

}  // namespace animalid

#endif  // ANIMALID_PIPELINE_HPP
