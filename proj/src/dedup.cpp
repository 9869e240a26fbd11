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

#include "animalid/dedup.hpp"

#include <map>
#include <optional>
#include <unordered_set>

#include <json.hpp>

#include "animalid/error.hpp"
#include "animalid/parallel.hpp"
#include "animalid/random.hpp"

namespace animalid {

using nlohmann::json;

DedupOutcome dedup_greedy(std::size_t count, std::size_t start, double threshold,
                          const std::function<double(std::size_t, std::size_t)>& similarity) {
    if (count == 0) throw Error(ErrorCode::EmptyInput, "dedup: individual has no images");
    if (start >= count) throw Error(ErrorCode::InvalidArgument, "dedup: start index out of range");
    DedupOutcome out;
    out.start = start;
    out.retained.push_back(start);
    for (std::size_t step = 1; step < count; ++step) {
        const std::size_t candidate = (start + step) % count;
        bool keep = true;
        for (std::size_t kept : out.retained) {
            ++out.ssim_calls;
            if (similarity(candidate, kept) >= threshold) {
                keep = false;
                break;
            }
        }
        (keep ? out.retained : out.discarded).push_back(candidate);
    }
    return out;
}

std::size_t dedup_start_index(std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error(ErrorCode::EmptyInput, "dedup: individual has no images");
    Rng rng(seed);
    return static_cast<std::size_t>(rng.below(count));
}

DedupOutcome dedup_individual(std::span<const ImageBuffer> images, const DedupParams& params,
                              std::atomic<std::size_t>* ssim_counter) {
    if (images.empty()) throw Error(ErrorCode::EmptyInput, "dedup: individual has no images");
    params.ssim.validate();
    std::vector<std::optional<SsimPrepared>> prepared(images.size());
    auto get = [&](std::size_t i) -> const SsimPrepared& {
        if (!prepared[i]) prepared[i].emplace(images[i], params.ssim);
        return *prepared[i];
    };
    return dedup_greedy(images.size(), dedup_start_index(images.size(), params.seed), params.threshold,
                        [&](std::size_t a, std::size_t b) {
                            if (ssim_counter) ssim_counter->fetch_add(1, std::memory_order_relaxed);
                            return ssim(get(a), get(b), params.ssim);
                        });
}

std::uint64_t identity_seed(std::uint64_t seed, const std::string& identity) {
    return splitmix64(seed ^ fnv1a(identity));
}

DedupReport dedup_dataset(const DatasetManifest& manifest, const DedupParams& params,
                          const ImageLoader& load, const std::set<ImageSource>& sources, int jobs,
                          std::atomic<std::size_t>* ssim_counter) {
    DedupReport report;
    report.threshold = params.threshold;
    report.seed = params.seed;
    report.sources = sources;
    report.ssim = params.ssim;

    const auto identities = manifest.identities();
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        const auto& r = manifest.records[i];
        if (sources.contains(r.source)) {
            members[r.identity].push_back(i);
        } else {
            report.passed_through.push_back(r.path);
        }
    }
    std::vector<std::string> work;
    for (const auto& id : identities) {
        if (members.contains(id)) work.push_back(id);
    }

    report.individuals.resize(work.size());
    parallel_for(work.size(), jobs, [&](std::size_t w) {
        const std::string& id = work[w];
        const auto& idx = members.at(id);
        try {
            std::vector<ImageBuffer> images;
            images.reserve(idx.size());
            for (std::size_t i : idx) images.push_back(load(manifest.records[i]));
            DedupParams p = params;
            p.seed = identity_seed(params.seed, id);
            const DedupOutcome o = dedup_individual(images, p, ssim_counter);

            IndividualDedup& out = report.individuals[w];
            out.identity = id;
            out.start = manifest.records[idx[o.start]].path;
            for (std::size_t k : o.retained) out.retained.push_back(manifest.records[idx[k]].path);
            for (std::size_t k : o.discarded) out.discarded.push_back(manifest.records[idx[k]].path);
            out.ssim_calls = o.ssim_calls;
        } catch (const Error& e) {
            throw Error(e.code(), "dedup of identity '" + id + "': " + e.what());
        }
    });
    for (const auto& ind : report.individuals) {
        report.total_retained += ind.retained.size();
        report.total_discarded += ind.discarded.size();
        report.total_ssim_calls += ind.ssim_calls;
    }
    return report;
}

std::string DedupReport::to_jsonl() const {
    std::string out;
    json src = json::array();
    for (ImageSource s : sources) src.push_back(to_string(s));
    json header = {{"kind", "dedup_params"},
                   {"threshold", threshold},
                   {"seed", seed},
                   {"sources", src},
                   {"ssim",
                    {{"window_side", ssim.window_side},
                     {"window_kind", ssim.window_kind == WindowKind::Gaussian ? "gaussian" : "uniform"},
                     {"sigma", ssim.sigma},
                     {"k1", ssim.k1},
                     {"k2", ssim.k2},
                     {"dynamic_range", ssim.dynamic_range},
                     {"compare_size", ssim.compare_size}}}};
    out += header.dump() + "\n";
    for (const auto& ind : individuals) {
        json j = {{"kind", "individual"},
                  {"identity", ind.identity},
                  {"start", ind.start},
                  {"retained", ind.retained},
                  {"discarded", ind.discarded},
                  {"retained_count", ind.retained.size()},
                  {"discarded_count", ind.discarded.size()},
                  {"ssim_calls", ind.ssim_calls}};
        out += j.dump() + "\n";
    }
    json totals = {{"kind", "totals"},
                   {"individuals", individuals.size()},
                   {"retained", total_retained},
                   {"discarded", total_discarded},
                   {"passed_through", passed_through.size()},
                   {"ssim_calls", total_ssim_calls}};
    out += totals.dump() + "\n";
    return out;
}

DatasetManifest apply_dedup(const DatasetManifest& manifest, const DedupReport& report) {
    std::unordered_set<std::string> discarded;
    for (const auto& ind : report.individuals) discarded.insert(ind.discarded.begin(), ind.discarded.end());
    DatasetManifest out;
    out.schema_version = manifest.schema_version;
    for (const auto& r : manifest.records) {
        if (!discarded.contains(r.path)) out.records.push_back(r);
    }
    return out;
}

}  // namespace animalid
