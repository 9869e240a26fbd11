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

#ifndef ANIMALID_EVAL_HPP
#define ANIMALID_EVAL_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "animalid/gallery.hpp"
#include "animalid/manifest.hpp"

namespace animalid {

/// A manifest image with its label; `index` is the manifest record index.
struct LabeledImage {
    std::size_t index = 0;
    std::string ref;
    std::string identity;

    friend bool operator==(const LabeledImage&, const LabeledImage&) = default;
};

struct SplitSpec {
    std::size_t train_identities = 34;
    std::size_t test_identities = 17;
    double probe_fraction = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EvalSplit {
    SplitSpec spec;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::vector<LabeledImage> train;    // all images of train identities
    std::vector<LabeledImage> gallery;  // train images + non-probe test images
    std::vector<LabeledImage> probe;

    /// Throws Data if the gallery/probe invariants do not hold.
    void validate() const;

    std::string to_json() const;
    static EvalSplit from_json(const std::string& text);
};

/// Seeded identity partition, then a seeded per-identity probe/gallery
/// halving of each test identity. Probe share is round-half-up of
/// probe_fraction * n, kept within [1, n-1].
EvalSplit make_split(const DatasetManifest& manifest, const SplitSpec& spec);

/// Same identity partition, probe/gallery halving re-drawn with `seed`.
EvalSplit redraw_probes(const EvalSplit& split, std::uint64_t seed);

/// Probe count for an identity with n images.
std::size_t probe_count(std::size_t n, double probe_fraction);

struct CmcCurve {
    std::vector<double> rates;  // rates[k-1] is the rank-k identification rate

    double at(std::size_t rank) const;
};

/// rates[k] = fraction of probes whose true identity is ranked <= k.
/// Probes whose identity is missing from their ranking never count.
CmcCurve compute_cmc(std::span<const std::vector<std::string>> rankings, std::span<const std::string> truth,
                     std::size_t max_rank);
CmcCurve compute_cmc(std::span<const MatchResult> results, std::span<const std::string> truth,
                     std::size_t max_rank);

struct PairSample {
    std::uint64_t seed = 0;
    // Indices into the image set given to sample_pairs, first < second.
    std::vector<std::pair<std::size_t, std::size_t>> genuine;
    std::vector<std::pair<std::size_t, std::size_t>> imposter;
};

/// Uniform sampling without replacement over unordered same-identity and
/// different-identity pairs. Throws InsufficientData, naming the available
/// maximum, when more pairs are requested than exist.
PairSample sample_pairs(std::span<const LabeledImage> images, std::size_t n_genuine, std::size_t n_imposter,
                        std::uint64_t seed);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // threshold descending, (0,0) first, (1,1) last
    double auc = 0.0;
};

/// Sweeps +inf, every distinct score (descending), -inf; a pair is accepted
/// when score >= threshold. AUC by the trapezoidal rule.
RocCurve compute_roc(std::span<const double> genuine_scores, std::span<const double> imposter_scores);
/// Scores ordered as sample.genuine followed by sample.imposter.
RocCurve compute_roc(const PairSample& sample, std::span<const double> scores);

using Embedder = std::function<Embedding(const LabeledImage&)>;

struct RankRates {
    double rank1 = 0.0;
    double rank5 = 0.0;
    double rank10 = 0.0;
};

struct RankTable {
    std::vector<RankRates> folds;  // fractions in [0, 1]
    RankRates mean;
    RankRates stddev;              // sample (n - 1) standard deviation

    /// "Rank-1 (%) | Rank-5 (%) | Rank-10 (%)" header and one mean+-std row.
    std::string render(const std::string& label) const;
};

/// Identification over `folds` re-draws of the probe halving (fold f uses
/// seed spec.seed + f). Embeddings are computed once per image.
RankTable rank_k_table(const EvalSplit& split, const Embedder& embed, std::size_t folds,
                       Pooling pooling = Pooling::Max, int jobs = 1);

/// Gallery from labeled images and their embeddings, in the given order.
Gallery build_gallery(std::span<const LabeledImage> images, std::span<const Embedding> embeddings);

/// Labeled view of every manifest record.
std::vector<LabeledImage> labeled_images(const DatasetManifest& manifest);

}  // namespace animalid

#endif  // ANIMALID_EVAL_HPP
