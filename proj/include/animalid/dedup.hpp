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

#ifndef ANIMALID_DEDUP_HPP
#define ANIMALID_DEDUP_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "animalid/image.hpp"
#include "animalid/manifest.hpp"
#include "animalid/ssim.hpp"

namespace animalid {

struct DedupParams {
    double threshold = 0.6;
    std::uint64_t seed = 0;
    SsimParams ssim;
};

/// Indices into the input sequence of one individual.
struct DedupOutcome {
    std::size_t start = 0;
    std::vector<std::size_t> retained;   // in visitation order, start first
    std::vector<std::size_t> discarded;  // in visitation order
    std::size_t ssim_calls = 0;
};

/// Greedy filter over an abstract similarity: visit start, start+1, ...
/// cyclically; keep a candidate iff its maximum similarity to everything
/// kept so far is below `threshold`.
DedupOutcome dedup_greedy(std::size_t count, std::size_t start, double threshold,
                          const std::function<double(std::size_t, std::size_t)>& similarity);

/// Start index drawn from `seed`: uniform over [0, count).
std::size_t dedup_start_index(std::size_t count, std::uint64_t seed);

/// SSIM-based greedy filter for one individual's images.
/// Throws EmptyInput for an empty sequence.
DedupOutcome dedup_individual(std::span<const ImageBuffer> images, const DedupParams& params,
                              std::atomic<std::size_t>* ssim_counter = nullptr);

struct IndividualDedup {
    std::string identity;
    std::string start;
    std::vector<std::string> retained;
    std::vector<std::string> discarded;
    std::size_t ssim_calls = 0;
};

struct DedupReport {
    double threshold = 0.0;
    std::uint64_t seed = 0;
    std::set<ImageSource> sources;
    SsimParams ssim;
    std::vector<IndividualDedup> individuals;  // manifest identity order
    std::vector<std::string> passed_through;   // records outside the source filter
    std::size_t total_retained = 0;
    std::size_t total_discarded = 0;
    std::size_t total_ssim_calls = 0;

    /// JSON lines: a params record, one record per individual, a totals record.
    std::string to_jsonl() const;
};

using ImageLoader = std::function<ImageBuffer(const ManifestRecord&)>;

/// Runs the filter per identity over records whose source is in `sources`.
/// Identities are independent; each uses a seed derived from params.seed
/// and its label, so results do not depend on `jobs`.
DedupReport dedup_dataset(const DatasetManifest& manifest, const DedupParams& params,
                          const ImageLoader& load, const std::set<ImageSource>& sources, int jobs = 1,
                          std::atomic<std::size_t>* ssim_counter = nullptr);

/// Seed used for one identity's start image.
std::uint64_t identity_seed(std::uint64_t seed, const std::string& identity);

/// Manifest restricted to retained and passed-through records, order kept.
DatasetManifest apply_dedup(const DatasetManifest& manifest, const DedupReport& report);

}  // namespace animalid

#endif  // ANIMALID_DEDUP_HPP
