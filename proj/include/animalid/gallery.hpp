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

#ifndef ANIMALID_GALLERY_HPP
#define ANIMALID_GALLERY_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace animalid {

/// Finite feature vector with nonzero norm. Construction validates.
class Embedding {
public:
    Embedding() = default;
    /// Throws InvalidArgument on empty, non-finite or zero-norm input.
    explicit Embedding(std::vector<float> values);

    std::span<const float> values() const noexcept { return values_; }
    std::size_t dim() const noexcept { return values_.size(); }
    double norm() const noexcept { return norm_; }

    friend bool operator==(const Embedding& a, const Embedding& b) { return a.values_ == b.values_; }

private:
    std::vector<float> values_;
    double norm_ = 0.0;
};

/// <u, v> / (|u| |v|), clamped to [-1, 1].
double cosine_similarity(const Embedding& u, const Embedding& v);

struct GalleryEntry {
    std::string identity;
    Embedding embedding;
    std::string source_ref;
    std::uint64_t enroll_seq = 0;

    friend bool operator==(const GalleryEntry&, const GalleryEntry&) = default;
};

struct RankedIdentity {
    std::string identity;
    double score = 0.0;
};

struct MatchResult {
    std::vector<RankedIdentity> ranking;     // best first, identities unique
    std::optional<std::string> identified;   // nullopt means "unknown"
    std::optional<double> threshold_used;
};

enum class Pooling { Max, Mean };

/// Enrolled reference embeddings. Many concurrent readers or one writer.
class Gallery {
public:
    Gallery() = default;
    Gallery(const Gallery& other);
    Gallery& operator=(const Gallery& other);
    Gallery(Gallery&& other) noexcept;
    Gallery& operator=(Gallery&& other) noexcept;

    /// Appends an entry and returns its enroll_seq. The first enrollment
    /// fixes the gallery dimension.
    std::uint64_t enroll(std::string identity, Embedding embedding, std::string source_ref = {});

    /// Per-identity pooled cosine score, ranked descending; ties go to the
    /// identity whose best entry was enrolled first.
    MatchResult identify(const Embedding& probe, std::optional<double> threshold = std::nullopt,
                         Pooling pooling = Pooling::Max) const;

    std::size_t size() const;
    std::size_t identity_count() const;
    std::size_t dim() const;
    std::vector<GalleryEntry> entries() const;

    void save(std::ostream& out) const;
    static Gallery load(std::istream& in);
    void save_file(const std::string& path) const;
    static Gallery load_file(const std::string& path);

    friend bool operator==(const Gallery& a, const Gallery& b);

    static constexpr std::uint32_t kFormatVersion = 1;

private:
    mutable std::shared_mutex mutex_;
    std::vector<GalleryEntry> entries_;
    std::size_t dim_ = 0;
    std::uint64_t next_seq_ = 0;
};

}  // namespace animalid

#endif  // ANIMALID_GALLERY_HPP
