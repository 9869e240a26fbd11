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

#include "animalid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "animalid/error.hpp"
#include "animalid/image.hpp"
#include "animalid/parallel.hpp"
#include "animalid/random.hpp"

namespace animalid {

using nlohmann::json;

namespace {

// Per test identity, its images in manifest order.
std::map<std::string, std::vector<LabeledImage>> group_test_images(const EvalSplit& split) {
    std::map<std::string, std::vector<LabeledImage>> groups;
    const std::unordered_set<std::string> test(split.test_ids.begin(), split.test_ids.end());
    for (const auto* set : {&split.gallery, &split.probe}) {
        for (const auto& img : *set) {
            if (test.contains(img.identity)) groups[img.identity].push_back(img);
        }
    }
    for (auto& [_, v] : groups) {
        std::sort(v.begin(), v.end(), [](const LabeledImage& a, const LabeledImage& b) { return a.index < b.index; });
    }
    return groups;
}

// Fills gallery (after the train images) and probe by halving each test
// identity with draws from `rng`, in test_ids order.
void halve(EvalSplit& split, const std::map<std::string, std::vector<LabeledImage>>& groups, Rng& rng) {
    split.gallery = split.train;
    split.probe.clear();
    for (const auto& id : split.test_ids) {
        auto it = groups.find(id);
        std::vector<LabeledImage> images = it == groups.end() ? std::vector<LabeledImage>{} : it->second;
        if (images.size() < 2) {
            throw Error(ErrorCode::InsufficientData,
                        "test identity '" + id + "' needs at least 2 images, has " + std::to_string(images.size()));
        }
        rng.shuffle(images);
        const std::size_t k = probe_count(images.size(), split.spec.probe_fraction);
        split.probe.insert(split.probe.end(), images.begin(), images.begin() + static_cast<long>(k));
        split.gallery.insert(split.gallery.end(), images.begin() + static_cast<long>(k), images.end());
    }
}

json images_json(const std::vector<LabeledImage>& v) {
    json a = json::array();
    for (const auto& i : v) a.push_back(json::array({i.index, i.ref, i.identity}));
    return a;
}

std::vector<LabeledImage> images_from_json(const json& a) {
    std::vector<LabeledImage> v;
    for (const auto& e : a) {
        v.push_back(LabeledImage{e.at(0).get<std::size_t>(), e.at(1).get<std::string>(), e.at(2).get<std::string>()});
    }
    return v;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void SplitSpec::validate() const {
    if (train_identities < 1 || test_identities < 1) {
        throw Error(ErrorCode::InvalidArgument, "split needs at least one train and one test identity");
    }
    if (!(probe_fraction > 0.0 && probe_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "probe_fraction must be in (0, 1)");
    }
}

std::size_t probe_count(std::size_t n, double probe_fraction) {
    const long k = round_half_up(probe_fraction * static_cast<double>(n));
    return static_cast<std::size_t>(std::clamp<long>(k, 1, static_cast<long>(n) - 1));
}

std::vector<LabeledImage> labeled_images(const DatasetManifest& manifest) {
    std::vector<LabeledImage> out;
    out.reserve(manifest.records.size());
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        out.push_back(LabeledImage{i, manifest.records[i].path, manifest.records[i].identity});
    }
    return out;
}

EvalSplit make_split(const DatasetManifest& manifest, const SplitSpec& spec) {
    spec.validate();
    auto ids = manifest.identities();
    if (ids.size() < spec.train_identities + spec.test_identities) {
        throw Error(ErrorCode::InsufficientData,
                    "split needs " + std::to_string(spec.train_identities + spec.test_identities) +
                        " identities, manifest has " + std::to_string(ids.size()));
    }
    Rng rng(spec.seed);
    rng.shuffle(ids);

    EvalSplit split;
    split.spec = spec;
    split.train_ids.assign(ids.begin(), ids.begin() + static_cast<long>(spec.train_identities));
    split.test_ids.assign(ids.begin() + static_cast<long>(spec.train_identities),
                          ids.begin() + static_cast<long>(spec.train_identities + spec.test_identities));

    const std::unordered_set<std::string> train(split.train_ids.begin(), split.train_ids.end());
    const std::unordered_set<std::string> test(split.test_ids.begin(), split.test_ids.end());
    std::map<std::string, std::vector<LabeledImage>> groups;
    for (const auto& img : labeled_images(manifest)) {
        if (train.contains(img.identity)) split.train.push_back(img);
        if (test.contains(img.identity)) groups[img.identity].push_back(img);
    }
    halve(split, groups, rng);
    split.validate();
    return split;
}

EvalSplit redraw_probes(const EvalSplit& split, std::uint64_t seed) {
    EvalSplit out = split;
    Rng rng(seed);
    halve(out, group_test_images(split), rng);
    out.validate();
    return out;
}

void EvalSplit::validate() const {
    std::unordered_set<std::size_t> gallery_idx;
    std::unordered_set<std::string> gallery_ids;
    for (const auto& g : gallery) {
        gallery_idx.insert(g.index);
        gallery_ids.insert(g.identity);
    }
    for (const auto& p : probe) {
        if (gallery_idx.contains(p.index)) {
            throw Error(ErrorCode::Data, "probe image '" + p.ref + "' is also in the gallery");
        }
        if (!gallery_ids.contains(p.identity)) {
            throw Error(ErrorCode::Data, "probe identity '" + p.identity + "' has no gallery image");
        }
    }
    const std::unordered_set<std::string> test(test_ids.begin(), test_ids.end());
    for (const auto& t : train) {
        if (test.contains(t.identity)) throw Error(ErrorCode::Data, "identity in both train and test");
    }
}

std::string EvalSplit::to_json() const {
    json j = {{"spec",
               {{"train_identities", spec.train_identities},
                {"test_identities", spec.test_identities},
                {"probe_fraction", spec.probe_fraction},
                {"seed", spec.seed}}},
              {"train_ids", train_ids},
              {"test_ids", test_ids},
              {"train", images_json(train)},
              {"gallery", images_json(gallery)},
              {"probe", images_json(probe)}};
    return j.dump() + "\n";
}

EvalSplit EvalSplit::from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        EvalSplit s;
        const json& sp = j.at("spec");
        s.spec.train_identities = sp.at("train_identities").get<std::size_t>();
        s.spec.test_identities = sp.at("test_identities").get<std::size_t>();
        s.spec.probe_fraction = sp.at("probe_fraction").get<double>();
        s.spec.seed = sp.at("seed").get<std::uint64_t>();
        s.train_ids = j.at("train_ids").get<std::vector<std::string>>();
        s.test_ids = j.at("test_ids").get<std::vector<std::string>>();
        s.train = images_from_json(j.at("train"));
        s.gallery = images_from_json(j.at("gallery"));
        s.probe = images_from_json(j.at("probe"));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Data, std::string("malformed split file: ") + e.what());
    }
}

double CmcCurve::at(std::size_t rank) const {
    if (rank == 0 || rates.empty()) return 0.0;
    return rates[std::min(rank, rates.size()) - 1];
}

CmcCurve compute_cmc(std::span<const std::vector<std::string>> rankings, std::span<const std::string> truth,
                     std::size_t max_rank) {
    if (rankings.empty()) throw Error(ErrorCode::EmptyInput, "compute_cmc: no probes");
    if (rankings.size() != truth.size()) {
        throw Error(ErrorCode::InvalidArgument, "compute_cmc: rankings and truth differ in length");
    }
    if (max_rank < 1) throw Error(ErrorCode::InvalidArgument, "compute_cmc: max rank must be >= 1");
    std::vector<std::size_t> hits_at(max_rank, 0);
    for (std::size_t p = 0; p < rankings.size(); ++p) {
        const auto& r = rankings[p];
        const auto it = std::find(r.begin(), r.end(), truth[p]);
        if (it == r.end()) continue;
        const auto rank = static_cast<std::size_t>(it - r.begin());  // 0-based
        if (rank < max_rank) ++hits_at[rank];
    }
    CmcCurve c;
    c.rates.resize(max_rank);
    std::size_t cumulative = 0;
    for (std::size_t k = 0; k < max_rank; ++k) {
        cumulative += hits_at[k];
        c.rates[k] = static_cast<double>(cumulative) / static_cast<double>(rankings.size());
    }
    return c;
}

CmcCurve compute_cmc(std::span<const MatchResult> results, std::span<const std::string> truth,
                     std::size_t max_rank) {
    std::vector<std::vector<std::string>> rankings;
    rankings.reserve(results.size());
    for (const auto& r : results) {
        std::vector<std::string> ids;
        ids.reserve(r.ranking.size());
        for (const auto& e : r.ranking) ids.push_back(e.identity);
        rankings.push_back(std::move(ids));
    }
    return compute_cmc(rankings, truth, max_rank);
}

PairSample sample_pairs(std::span<const LabeledImage> images, std::size_t n_genuine, std::size_t n_imposter,
                        std::uint64_t seed) {
    // Order images by identity (first-appearance order, stable) so that each
    // image's same-identity and cross-identity partners form contiguous ranges.
    std::unordered_map<std::string, std::size_t> group_of;
    for (const auto& img : images) group_of.try_emplace(img.identity, group_of.size());
    std::vector<std::size_t> order(images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return group_of.at(images[a].identity) < group_of.at(images[b].identity);
    });
    std::vector<std::size_t> group_end(order.size());
    for (std::size_t i = order.size(); i-- > 0;) {
        const bool last = i + 1 == order.size() ||
                          images[order[i + 1]].identity != images[order[i]].identity;
        group_end[i] = last ? i + 1 : group_end[i + 1];
    }

    struct Ranges {
        std::vector<std::uint64_t> prefix;  // prefix[i] = pairs contributed by positions < i
        std::vector<std::size_t> lo;
    };
    auto build = [&](bool genuine) {
        Ranges r;
        r.prefix.assign(order.size() + 1, 0);
        r.lo.resize(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t lo = genuine ? i + 1 : group_end[i];
            const std::size_t hi = genuine ? group_end[i] : order.size();
            r.lo[i] = lo;
            r.prefix[i + 1] = r.prefix[i] + (hi - lo);
        }
        return r;
    };

    Rng rng(seed);
    auto draw = [&](const Ranges& r, std::size_t n, const char* kind) {
        const std::uint64_t total = r.prefix.back();
        if (n > total) {
            throw Error(ErrorCode::InsufficientData, std::string("requested ") + std::to_string(n) + " " + kind +
                                                         " pairs, only " + std::to_string(total) + " exist");
        }
        // Floyd's algorithm: n distinct indices from [0, total).
        std::vector<std::uint64_t> chosen;
        std::unordered_set<std::uint64_t> seen;
        chosen.reserve(n);
        for (std::uint64_t j = total - n; j < total; ++j) {
            const std::uint64_t t = rng.below(j + 1);
            const std::uint64_t pick = seen.contains(t) ? j : t;
            seen.insert(pick);
            chosen.push_back(pick);
        }
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        pairs.reserve(n);
        for (std::uint64_t idx : chosen) {
            const auto pos = static_cast<std::size_t>(
                std::upper_bound(r.prefix.begin(), r.prefix.end(), idx) - r.prefix.begin() - 1);
            const std::size_t partner = r.lo[pos] + static_cast<std::size_t>(idx - r.prefix[pos]);
            std::size_t a = order[pos];
            std::size_t b = order[partner];
            if (a > b) std::swap(a, b);
            pairs.emplace_back(a, b);
        }
        return pairs;
    };

    PairSample s;
    s.seed = seed;
    s.genuine = draw(build(true), n_genuine, "genuine");
    s.imposter = draw(build(false), n_imposter, "imposter");
    return s;
}

RocCurve compute_roc(std::span<const double> genuine_scores, std::span<const double> imposter_scores) {
    if (genuine_scores.empty() || imposter_scores.empty()) {
        throw Error(ErrorCode::EmptyInput, "compute_roc: need at least one genuine and one imposter score");
    }
    std::vector<double> g(genuine_scores.begin(), genuine_scores.end());
    std::vector<double> im(imposter_scores.begin(), imposter_scores.end());
    for (double v : g) {
        if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "compute_roc: NaN score");
    }
    for (double v : im) {
        if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "compute_roc: NaN score");
    }
    std::sort(g.begin(), g.end(), std::greater<>());
    std::sort(im.begin(), im.end(), std::greater<>());
    std::vector<double> thresholds;
    thresholds.reserve(g.size() + im.size());
    std::merge(g.begin(), g.end(), im.begin(), im.end(), std::back_inserter(thresholds), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const auto n_g = static_cast<std::uint64_t>(g.size());
    const auto n_i = static_cast<std::uint64_t>(im.size());
    RocCurve roc;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t prev_tp = 0;
    std::uint64_t prev_fp = 0;
    std::uint64_t twice_area = 0;  // sum of dFP * (TP + TP_prev), in count units
    std::size_t gi = 0;
    std::size_t ii = 0;
    auto step = [&](double threshold) {
        twice_area += (fp - prev_fp) * (tp + prev_tp);
        prev_tp = tp;
        prev_fp = fp;
        roc.points.push_back({static_cast<double>(fp) / static_cast<double>(n_i),
                              static_cast<double>(tp) / static_cast<double>(n_g), threshold});
    };
    for (double t : thresholds) {
        while (gi < g.size() && g[gi] >= t) ++gi, ++tp;
        while (ii < im.size() && im[ii] >= t) ++ii, ++fp;
        step(t);
    }
    tp = n_g;
    fp = n_i;
    step(-std::numeric_limits<double>::infinity());
    roc.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(n_g) * static_cast<double>(n_i));
    return roc;
}

RocCurve compute_roc(const PairSample& sample, std::span<const double> scores) {
    if (scores.size() != sample.genuine.size() + sample.imposter.size()) {
        throw Error(ErrorCode::InvalidArgument, "compute_roc: need exactly one score per pair");
    }
    return compute_roc(scores.first(sample.genuine.size()), scores.subspan(sample.genuine.size()));
}

Gallery build_gallery(std::span<const LabeledImage> images, std::span<const Embedding> embeddings) {
    if (images.size() != embeddings.size()) {
        throw Error(ErrorCode::InvalidArgument, "build_gallery: one embedding per image required");
    }
    Gallery g;
    for (std::size_t i = 0; i < images.size(); ++i) g.enroll(images[i].identity, embeddings[i], images[i].ref);
    return g;
}

RankTable rank_k_table(const EvalSplit& split, const Embedder& embed, std::size_t folds, Pooling pooling,
                       int jobs) {
    if (folds < 2) throw Error(ErrorCode::InvalidArgument, "rank_k_table: folds must be >= 2");

    std::vector<LabeledImage> all = split.gallery;
    all.insert(all.end(), split.probe.begin(), split.probe.end());
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    all.erase(std::unique(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.index == b.index; }),
              all.end());
    std::vector<Embedding> embedded(all.size());
    parallel_for(all.size(), jobs, [&](std::size_t i) { embedded[i] = embed(all[i]); });
    std::unordered_map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < all.size(); ++i) slot.emplace(all[i].index, i);
    auto embeddings_of = [&](const std::vector<LabeledImage>& v) {
        std::vector<Embedding> e;
        e.reserve(v.size());
        for (const auto& img : v) e.push_back(embedded[slot.at(img.index)]);
        return e;
    };

    RankTable table;
    std::vector<double> r1, r5, r10;
    for (std::size_t f = 0; f < folds; ++f) {
        const EvalSplit fold = redraw_probes(split, split.spec.seed + f);
        const Gallery gallery = build_gallery(fold.gallery, embeddings_of(fold.gallery));
        const auto probe_embeddings = embeddings_of(fold.probe);
        std::vector<MatchResult> results(fold.probe.size());
        parallel_for(fold.probe.size(), jobs, [&](std::size_t p) {
            results[p] = gallery.identify(probe_embeddings[p], std::nullopt, pooling);
        });
        std::vector<std::string> truth;
        truth.reserve(fold.probe.size());
        for (const auto& p : fold.probe) truth.push_back(p.identity);
        const CmcCurve cmc = compute_cmc(results, truth, 10);
        table.folds.push_back({cmc.at(1), cmc.at(5), cmc.at(10)});
        r1.push_back(cmc.at(1));
        r5.push_back(cmc.at(5));
        r10.push_back(cmc.at(10));
    }
    table.mean = {mean_of(r1), mean_of(r5), mean_of(r10)};
    table.stddev = {sample_std(r1), sample_std(r5), sample_std(r10)};
    return table;
}

std::string RankTable::render(const std::string& label) const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%-24s | %-12s | %-12s | %-12s\n%-24s | %5.1f+-%-5.1f | %5.1f+-%-5.1f | %5.1f+-%-5.1f\n",
                  "Alignment method", "Rank-1 (%)", "Rank-5 (%)", "Rank-10 (%)", label.c_str(),
                  100.0 * mean.rank1, 100.0 * stddev.rank1, 100.0 * mean.rank5, 100.0 * stddev.rank5,
                  100.0 * mean.rank10, 100.0 * stddev.rank10);
    return buf;
}

}  // namespace animalid
