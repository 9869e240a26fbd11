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

#include "animalid/gallery.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "animalid/error.hpp"
#include "animalid/io.hpp"

namespace animalid {

namespace {

constexpr char kMagic[4] = {'R', 'P', 'G', 'L'};
// Upper bound on a plausible embedding width; larger header values are
// treated as a corrupt dimension field rather than an allocation request.
constexpr std::uint32_t kMaxDim = 1u << 20;

template <typename T>
void put_le(std::string& buf, T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf.push_back(static_cast<char>(u & 0xFF));
        u = static_cast<U>(u >> 8);
    }
}

void put_string(std::string& buf, const std::string& s) {
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.size()));
    buf.append(s);
}

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    template <typename T>
    T get(const char* what) {
        need(sizeof(T), what);
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(data_[pos_ + i]))
                 << (8 * i);
        }
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }

    std::string get_string(const char* what) {
        const auto len = get<std::uint32_t>(what);
        need(len, what);
        std::string s = data_.substr(pos_, len);
        pos_ += len;
        return s;
    }

    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw Error(ErrorCode::GalleryTruncated,
                        std::string("gallery file truncated while reading ") + what);
        }
    }

    std::string data_;
    std::size_t pos_ = 0;
};

}  // namespace

Embedding::Embedding(std::vector<float> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorCode::InvalidArgument, "embedding is empty");
    double sq = 0.0;
    for (float v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "embedding has a non-finite value");
        sq += static_cast<double>(v) * static_cast<double>(v);
    }
    norm_ = std::sqrt(sq);
    if (!(norm_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "embedding has zero norm");
}

double cosine_similarity(const Embedding& u, const Embedding& v) {
    if (u.dim() != v.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "cosine_similarity: dimensions " +
                                                      std::to_string(u.dim()) + " and " +
                                                      std::to_string(v.dim()) + " differ");
    }
    if (!(u.norm() > 0.0) || !(v.norm() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "cosine_similarity: zero-norm vector");
    }
    const auto a = u.values();
    const auto b = v.values();
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
    return std::clamp(dot / (u.norm() * v.norm()), -1.0, 1.0);
}

Gallery::Gallery(const Gallery& other) {
    std::shared_lock lock(other.mutex_);
    entries_ = other.entries_;
    dim_ = other.dim_;
    next_seq_ = other.next_seq_;
}

Gallery& Gallery::operator=(const Gallery& other) {
    if (this == &other) return *this;
    Gallery copy(other);
    *this = std::move(copy);
    return *this;
}

Gallery::Gallery(Gallery&& other) noexcept
    : entries_(std::move(other.entries_)), dim_(other.dim_), next_seq_(other.next_seq_) {}

Gallery& Gallery::operator=(Gallery&& other) noexcept {
    if (this == &other) return *this;
    std::unique_lock lock(mutex_);
    entries_ = std::move(other.entries_);
    dim_ = other.dim_;
    next_seq_ = other.next_seq_;
    return *this;
}

std::uint64_t Gallery::enroll(std::string identity, Embedding embedding, std::string source_ref) {
    if (embedding.dim() == 0 || !(embedding.norm() > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "enroll: invalid embedding");
    }
    if (identity.empty()) throw Error(ErrorCode::InvalidArgument, "enroll: identity label is empty");
    std::unique_lock lock(mutex_);
    if (dim_ != 0 && embedding.dim() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "enroll: embedding dim " +
                                                      std::to_string(embedding.dim()) +
                                                      " does not match gallery dim " + std::to_string(dim_));
    }
    dim_ = embedding.dim();
    const std::uint64_t seq = next_seq_++;
    entries_.push_back(GalleryEntry{std::move(identity), std::move(embedding), std::move(source_ref), seq});
    return seq;
}

MatchResult Gallery::identify(const Embedding& probe, std::optional<double> threshold,
                              Pooling pooling) const {
    std::shared_lock lock(mutex_);
    if (entries_.empty()) throw Error(ErrorCode::GalleryEmpty, "identify: gallery is empty");
    if (probe.dim() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "identify: probe dim " + std::to_string(probe.dim()) +
                                                      " does not match gallery dim " + std::to_string(dim_));
    }

    struct Pooled {
        std::string_view identity;
        double score;
        std::uint64_t tie_seq;
        std::size_t n;
    };
    std::vector<Pooled> pooled;
    std::unordered_map<std::string_view, std::size_t> index;
    for (const auto& e : entries_) {
        const double s = cosine_similarity(probe, e.embedding);
        auto [it, inserted] = index.try_emplace(e.identity, pooled.size());
        if (inserted) {
            pooled.push_back(Pooled{e.identity, s, e.enroll_seq, 1});
            continue;
        }
        Pooled& p = pooled[it->second];
        if (pooling == Pooling::Max) {
            if (s > p.score || (s == p.score && e.enroll_seq < p.tie_seq)) {
                p.score = s;
                p.tie_seq = e.enroll_seq;
            }
        } else {
            p.score += s;
            p.tie_seq = std::min(p.tie_seq, e.enroll_seq);
            ++p.n;
        }
    }
    if (pooling == Pooling::Mean) {
        for (auto& p : pooled) p.score /= static_cast<double>(p.n);
    }
    std::sort(pooled.begin(), pooled.end(), [](const Pooled& a, const Pooled& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.tie_seq < b.tie_seq;
    });

    MatchResult result;
    result.threshold_used = threshold;
    result.ranking.reserve(pooled.size());
    for (const auto& p : pooled) result.ranking.push_back({std::string(p.identity), p.score});
    const auto& top = result.ranking.front();
    if (!threshold || top.score >= *threshold) result.identified = top.identity;
    return result;
}

std::size_t Gallery::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::size_t Gallery::identity_count() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string_view> ids;
    ids.reserve(entries_.size());
    for (const auto& e : entries_) ids.push_back(e.identity);
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

std::size_t Gallery::dim() const {
    std::shared_lock lock(mutex_);
    return dim_;
}

std::vector<GalleryEntry> Gallery::entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

bool operator==(const Gallery& a, const Gallery& b) {
    if (&a == &b) return true;
    std::shared_lock la(a.mutex_, std::defer_lock);
    std::shared_lock lb(b.mutex_, std::defer_lock);
    std::lock(la, lb);
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
}

void Gallery::save(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(buf, kFormatVersion);
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(dim_));
    put_le<std::uint64_t>(buf, entries_.size());
    for (const auto& e : entries_) {
        if (e.embedding.dim() != dim_) {
            throw Error(ErrorCode::GalleryDimension, "save: inconsistent embedding dimensions");
        }
        put_string(buf, e.identity);
        put_string(buf, e.source_ref);
        put_le<std::uint64_t>(buf, e.enroll_seq);
        for (float v : e.embedding.values()) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(v));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorCode::Io, "failed to write gallery");
}

Gallery Gallery::load(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    Reader r(ss.str());

    if (r.remaining() < sizeof(kMagic)) {
        throw Error(ErrorCode::GalleryTruncated, "gallery file truncated before magic bytes");
    }
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.get<std::uint8_t>("magic"));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorCode::GalleryCorrupt, "not a gallery file (bad magic)");
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kFormatVersion) {
        throw Error(ErrorCode::GalleryVersion, "unsupported gallery format version " + std::to_string(version));
    }
    const auto dim = r.get<std::uint32_t>("dim");
    const auto count = r.get<std::uint64_t>("count");
    if ((count > 0 && dim == 0) || dim > kMaxDim) {
        throw Error(ErrorCode::GalleryDimension, "gallery header has invalid dim " + std::to_string(dim) +
                                                     " for " + std::to_string(count) + " entries");
    }

    // Built privately and returned only when complete: no partial gallery.
    Gallery g;
    g.dim_ = dim;
    for (std::uint64_t i = 0; i < count; ++i) {
        GalleryEntry e;
        e.identity = r.get_string("identity");
        e.source_ref = r.get_string("source_ref");
        e.enroll_seq = r.get<std::uint64_t>("enroll_seq");
        std::vector<float> values(dim);
        for (auto& v : values) v = std::bit_cast<float>(r.get<std::uint32_t>("embedding"));
        try {
            e.embedding = Embedding(std::move(values));
        } catch (const Error& err) {
            throw Error(ErrorCode::GalleryCorrupt, "entry " + std::to_string(i) + ": " + err.what());
        }
        if (!g.entries_.empty() && e.enroll_seq <= g.entries_.back().enroll_seq) {
            throw Error(ErrorCode::GalleryCorrupt, "entry " + std::to_string(i) + ": enroll_seq not increasing");
        }
        g.entries_.push_back(std::move(e));
    }
    if (r.remaining() != 0) {
        throw Error(ErrorCode::GalleryCorrupt,
                    "gallery file has " + std::to_string(r.remaining()) + " trailing bytes");
    }
    g.next_seq_ = g.entries_.empty() ? 0 : g.entries_.back().enroll_seq + 1;
    return g;
}

void Gallery::save_file(const std::string& path) const {
    std::ostringstream out(std::ios::binary);
    save(out);
    write_file_atomic(path, out.str());
}

Gallery Gallery::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open gallery file " + path);
    return load(in);
}

}  // namespace animalid
