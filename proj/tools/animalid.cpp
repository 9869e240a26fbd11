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

// Command-line front end. Every command reads a line-delimited JSON
// manifest and writes line-delimited JSON records; all randomness comes
// from --seed.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "animalid/align.hpp"
#include "animalid/dedup.hpp"
#include "animalid/error.hpp"
#include "animalid/eval.hpp"
#include "animalid/gallery.hpp"
#include "animalid/io.hpp"
#include "animalid/manifest.hpp"
#include "animalid/parallel.hpp"
#include "animalid/pipeline.hpp"
#include "animalid/providers.hpp"
#include "animalid/random.hpp"
#include "animalid/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace animalid;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string provider = "mock";
    bool trace = false;
};

// A manifest plus the directory its relative paths resolve against.
struct LoadedManifest {
    DatasetManifest manifest;
    fs::path base;

    std::string resolve(const std::string& ref) const {
        const fs::path p(ref);
        return (p.is_absolute() ? p : base / p).string();
    }
    ImageBuffer load(const ManifestRecord& r) const { return read_image(resolve(r.path)); }
};

LoadedManifest open_manifest(const std::string& path) {
    LoadedManifest m{load_manifest_file(path), fs::absolute(path).parent_path()};
    if (m.manifest.unknown_field_warnings > 0) {
        std::cerr << "warning: " << m.manifest.unknown_field_warnings << " unknown manifest field(s) ignored\n";
    }
    return m;
}

void write_output(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
    } else {
        write_file_atomic(path, contents);
    }
}

AlignParams parse_align_params(const std::string& text, int output_side) {
    AlignParams p;
    p.output_side = output_side;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "bad --params item '" + item + "'");
        const std::string key = item.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad --params value in '" + item + "'");
        }
        if (key == "a") {
            p.a = value;
        } else if (key == "b") {
            p.b = value;
        } else if (key == "c") {
            p.c = value;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown --params key '" + key + "'");
        }
    }
    p.validate();
    return p;
}

Pooling parse_pooling(const std::string& s) {
    if (s == "max") return Pooling::Max;
    if (s == "mean") return Pooling::Mean;
    throw Error(ErrorCode::InvalidArgument, "pooling must be max or mean");
}

std::vector<std::string> list_images(const std::string& dir) {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm") out.push_back(e.path().string());
    }
    if (ec) throw Error(ErrorCode::Io, "cannot list " + dir + ": " + ec.message());
    std::sort(out.begin(), out.end());
    return out;
}

json match_json(const MatchResult& r) {
    json ranking = json::array();
    for (const auto& e : r.ranking) ranking.push_back({{"identity", e.identity}, {"score", e.score}});
    return {{"kind", "match"},
            {"decision", r.identified ? json(*r.identified) : json("unknown")},
            {"threshold", r.threshold_used ? json(*r.threshold_used) : json(nullptr)},
            {"ranking", ranking}};
}

// Embeds every listed image through the full provider pipeline.
std::vector<Embedding> embed_all(const LoadedManifest& m, const Pipeline& pipeline,
                                 std::span<const LabeledImage> images, int jobs) {
    std::vector<Embedding> out(images.size());
    parallel_for(images.size(), jobs, [&](std::size_t i) {
        const auto& rec = m.manifest.records.at(images[i].index);
        out[i] = pipeline.embed(m.load(rec), rec.path);
    });
    return out;
}

Pipeline make_pipeline(const Globals& g, const LoadedManifest& m, const AlignParams& align) {
    return Pipeline(resolve_providers(g.provider, m.manifest), align);
}

EvalSplit load_split(const std::string& path) { return EvalSplit::from_json(read_file(path)); }

std::vector<LabeledImage> restrict_to(const std::vector<LabeledImage>& all, const std::vector<std::string>& ids) {
    const std::set<std::string> keep(ids.begin(), ids.end());
    std::vector<LabeledImage> out;
    for (const auto& i : all) {
        if (keep.contains(i.identity)) out.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& manifest_path, const std::string& identity, const std::string& frames_dir,
               const std::string& images_dir, const std::string& video_id, int stride, const std::string& source) {
    if (frames_dir.empty() == images_dir.empty()) {
        throw Error(ErrorCode::InvalidArgument, "ingest needs exactly one of --frames-dir or --images-dir");
    }
    DatasetManifest m;
    if (fs::exists(manifest_path)) m = load_manifest_file(manifest_path);
    const fs::path base = fs::absolute(manifest_path).parent_path();
    auto relative = [&](const std::string& p) { return fs::absolute(p).lexically_relative(base).generic_string(); };

    std::vector<ManifestRecord> added;
    if (!frames_dir.empty()) {
        std::vector<std::string> frames;
        for (const auto& f : list_images(frames_dir)) frames.push_back(relative(f));
        added = ingest_video(frames, stride, identity, video_id.empty() ? fs::path(frames_dir).filename().string()
                                                                        : video_id);
    } else {
        const ImageSource src = parse_image_source(source);
        if (src == ImageSource::VideoFrame) {
            throw Error(ErrorCode::InvalidArgument, "use --frames-dir for video frames");
        }
        const auto files = list_images(images_dir);
        if (files.empty()) throw Error(ErrorCode::EmptyInput, "no images in " + images_dir);
        for (const auto& f : files) {
            ManifestRecord r;
            r.path = relative(f);
            r.identity = identity;
            r.source = src;
            added.push_back(std::move(r));
        }
    }
    for (auto& r : added) {
        if (m.find(r.path)) throw Error(ErrorCode::Data, "duplicate path '" + r.path + "'");
        m.records.push_back(std::move(r));
    }
    save_manifest_file(manifest_path, m);
    std::cout << json{{"kind", "ingest"}, {"added", added.size()}, {"records", m.records.size()}}.dump() << "\n";
    return 0;
}

int cmd_dedup(const Globals& g, const std::string& manifest_path, double threshold, const std::string& out,
              const std::vector<std::string>& source_names, const std::string& cleaned) {
    const auto m = open_manifest(manifest_path);
    std::set<ImageSource> sources;
    for (const auto& s : source_names) sources.insert(parse_image_source(s));
    DedupParams p;
    p.threshold = threshold;
    p.seed = derive_seed(g.seed, SeedStream::Dedup);
    const DedupReport report =
        dedup_dataset(m.manifest, p, [&](const ManifestRecord& r) { return m.load(r); }, sources, g.jobs);
    write_output(out, report.to_jsonl());
    if (!cleaned.empty()) save_manifest_file(cleaned, apply_dedup(m.manifest, report));
    std::cerr << "dedup: threshold " << threshold << ", retained " << report.total_retained << ", discarded "
              << report.total_discarded << ", passed through " << report.passed_through.size() << "\n";
    return 0;
}

int cmd_split(const Globals& g, const std::string& manifest_path, std::size_t train, std::size_t test,
              double fraction, const std::string& out) {
    const auto m = open_manifest(manifest_path);
    SplitSpec spec{train, test, fraction, derive_seed(g.seed, SeedStream::Split)};
    const EvalSplit split = make_split(m.manifest, spec);
    write_output(out, split.to_json());
    std::cerr << "split: " << split.train.size() << " train, " << split.gallery.size() << " gallery, "
              << split.probe.size() << " probe images\n";
    return 0;
}

int cmd_align(const Globals& g, const std::string& manifest_path, const std::string& params_text, int side,
              const std::string& out_dir, const std::string& landmark_source) {
    const auto m = open_manifest(manifest_path);
    const AlignParams params = parse_align_params(params_text, side);
    const bool use_provider = landmark_source == "provider";
    if (!use_provider && landmark_source != "manifest") {
        throw Error(ErrorCode::InvalidArgument, "--landmarks must be manifest or provider");
    }
    std::optional<Pipeline> pipeline;
    if (use_provider) pipeline.emplace(make_pipeline(g, m, params));
    fs::create_directories(out_dir);

    const auto& records = m.manifest.records;
    std::vector<std::string> lines(records.size());
    parallel_for(records.size(), g.jobs, [&](std::size_t i) {
        const auto& rec = records[i];
        if (!use_provider && !rec.landmarks) return;
        const ImageBuffer img = m.load(rec);
        const AlignedFace face = use_provider ? pipeline->analyze(img, rec.path, false).aligned
                                              : align_face(img, *rec.landmarks, params);
        std::string name = rec.path;
        std::replace(name.begin(), name.end(), '/', '_');
        std::replace(name.begin(), name.end(), '\\', '_');
        const fs::path image_path = fs::path(out_dir) / (fs::path(name).stem().string() + ".png");
        write_image(image_path.string(), face.image);
        const auto& lm = face.source_landmarks;
        json sidecar = {{"path", rec.path},
                        {"identity", rec.identity},
                        {"aligned", image_path.filename().string()},
                        {"transform", face.transform.m},
                        {"angle", face.angle},
                        {"eye_distance", face.eye_distance},
                        {"crop", {face.crop.x, face.crop.y, face.crop.w, face.crop.h}},
                        {"params", {{"a", params.a}, {"b", params.b}, {"c", params.c}, {"output_side", side}}},
                        {"source_landmarks",
                         {{"left_eye", {lm.left_eye.x, lm.left_eye.y}},
                          {"right_eye", {lm.right_eye.x, lm.right_eye.y}},
                          {"nose", {lm.nose.x, lm.nose.y}}}}};
        write_file_atomic((fs::path(out_dir) / (fs::path(name).stem().string() + ".json")).string(),
                          sidecar.dump() + "\n");
        lines[i] = sidecar.dump() + "\n";
    });
    std::size_t written = 0;
    std::string index;
    for (const auto& l : lines) {
        if (l.empty()) continue;
        index += l;
        ++written;
    }
    write_file_atomic((fs::path(out_dir) / "aligned.jsonl").string(), index);
    std::cerr << "align: " << written << " faces written, " << records.size() - written << " skipped\n";
    return 0;
}

int cmd_enroll(const Globals& g, const std::string& manifest_path, const std::string& split_path,
               const std::string& gallery_path, bool append, const std::string& params_text, int side) {
    const auto m = open_manifest(manifest_path);
    const Pipeline pipeline = make_pipeline(g, m, parse_align_params(params_text, side));
    const std::vector<LabeledImage> images =
        split_path.empty() ? labeled_images(m.manifest) : load_split(split_path).gallery;
    const auto embeddings = embed_all(m, pipeline, images, g.jobs);
    Gallery gallery = append && fs::exists(gallery_path) ? Gallery::load_file(gallery_path) : Gallery{};
    for (std::size_t i = 0; i < images.size(); ++i) gallery.enroll(images[i].identity, embeddings[i], images[i].ref);
    gallery.save_file(gallery_path);
    std::cout << json{{"kind", "enroll"},
                      {"enrolled", images.size()},
                      {"entries", gallery.size()},
                      {"identities", gallery.identity_count()},
                      {"dim", gallery.dim()}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_identify(const Globals& g, const std::string& manifest_path, const std::string& gallery_path,
                 const std::string& image_path, std::string ref, std::optional<double> threshold,
                 const std::string& pooling, const std::string& params_text, int side) {
    LoadedManifest m;
    if (!manifest_path.empty()) m = open_manifest(manifest_path);
    if (ref.empty()) {
        ref = manifest_path.empty() ? image_path
                                    : fs::absolute(image_path).lexically_relative(m.base).generic_string();
    }
    const Gallery gallery = Gallery::load_file(gallery_path);
    const Pipeline pipeline = make_pipeline(g, m, parse_align_params(params_text, side));
    std::vector<TraceEvent> trace;
    const MatchResult r = pipeline.run(read_image(image_path), ref, gallery, threshold, parse_pooling(pooling),
                                       g.trace ? &trace : nullptr);
    for (const auto& t : trace) {
        std::cout << json{{"kind", "trace"}, {"stage", t.stage}, {"detail", json::parse(t.detail)}}.dump() << "\n";
    }
    std::cout << match_json(r).dump() << "\n";
    return 0;
}

int cmd_eval_cmc(const Globals& g, const std::string& manifest_path, const std::string& split_path,
                 const std::string& gallery_path, std::size_t max_rank, const std::string& pooling,
                 const std::string& out, const std::string& params_text, int side) {
    const auto m = open_manifest(manifest_path);
    const EvalSplit split = load_split(split_path);
    const Pipeline pipeline = make_pipeline(g, m, parse_align_params(params_text, side));
    Gallery gallery;
    if (!gallery_path.empty()) {
        gallery = Gallery::load_file(gallery_path);
    } else {
        gallery = build_gallery(split.gallery, embed_all(m, pipeline, split.gallery, g.jobs));
    }
    const auto probes = embed_all(m, pipeline, split.probe, g.jobs);
    std::vector<MatchResult> results(probes.size());
    const Pooling pool = parse_pooling(pooling);
    parallel_for(probes.size(), g.jobs,
                 [&](std::size_t i) { results[i] = gallery.identify(probes[i], std::nullopt, pool); });
    std::vector<std::string> truth;
    for (const auto& p : split.probe) truth.push_back(p.identity);
    const std::size_t k = max_rank > 0 ? max_rank : gallery.identity_count();
    const CmcCurve cmc = compute_cmc(results, truth, k);
    std::string text;
    for (std::size_t i = 0; i < cmc.rates.size(); ++i) {
        text += json{{"x", i + 1}, {"y", cmc.rates[i]}}.dump() + "\n";
    }
    write_output(out, text);
    return 0;
}

int cmd_eval_roc(const Globals& g, const std::string& manifest_path, const std::string& split_path,
                 const std::string& population, std::size_t n_genuine, std::size_t n_imposter,
                 const std::string& out, const std::string& params_text, int side) {
    const auto m = open_manifest(manifest_path);
    std::vector<LabeledImage> images = labeled_images(m.manifest);
    if (population == "test") {
        if (split_path.empty()) throw Error(ErrorCode::InvalidArgument, "--population test needs --split");
        images = restrict_to(images, load_split(split_path).test_ids);
    } else if (population != "all") {
        throw Error(ErrorCode::InvalidArgument, "--population must be test or all");
    }
    const PairSample pairs = sample_pairs(images, n_genuine, n_imposter, derive_seed(g.seed, SeedStream::Pairs));

    // Embed only the images that appear in a pair.
    std::set<std::size_t> used;
    for (const auto* v : {&pairs.genuine, &pairs.imposter}) {
        for (const auto& [a, b] : *v) {
            used.insert(a);
            used.insert(b);
        }
    }
    std::vector<LabeledImage> needed;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i : used) {
        slot[i] = needed.size();
        needed.push_back(images[i]);
    }
    const Pipeline pipeline = make_pipeline(g, m, parse_align_params(params_text, side));
    const auto emb = embed_all(m, pipeline, needed, g.jobs);
    std::vector<double> scores;
    for (const auto* v : {&pairs.genuine, &pairs.imposter}) {
        for (const auto& [a, b] : *v) scores.push_back(cosine_similarity(emb[slot[a]], emb[slot[b]]));
    }
    const RocCurve roc = compute_roc(pairs, scores);
    std::string text;
    for (const auto& p : roc.points) {
        text += json{{"x", p.fpr}, {"y", p.tpr}, {"threshold", std::isfinite(p.threshold) ? json(p.threshold)
                                                              : json(p.threshold > 0 ? "+inf" : "-inf")}}
                    .dump() +
                "\n";
    }
    text += json{{"kind", "summary"},
                 {"auc", roc.auc},
                 {"population", population},
                 {"genuine", pairs.genuine.size()},
                 {"imposter", pairs.imposter.size()}}
                .dump() +
            "\n";
    write_output(out, text);
    return 0;
}

int cmd_eval_ranks(const Globals& g, const std::string& manifest_path, const std::string& split_path,
                   std::size_t folds, const std::string& pooling, const std::string& label, const std::string& out,
                   const std::string& params_text, int side) {
    const auto m = open_manifest(manifest_path);
    const EvalSplit split = load_split(split_path);
    const Pipeline pipeline = make_pipeline(g, m, parse_align_params(params_text, side));
    const Embedder embed = [&](const LabeledImage& img) {
        const auto& rec = m.manifest.records.at(img.index);
        return pipeline.embed(m.load(rec), rec.path);
    };
    const RankTable t = rank_k_table(split, embed, folds, parse_pooling(pooling), g.jobs);
    std::string text;
    for (std::size_t f = 0; f < t.folds.size(); ++f) {
        text += json{{"kind", "fold"},
                     {"fold", f},
                     {"rank1", t.folds[f].rank1},
                     {"rank5", t.folds[f].rank5},
                     {"rank10", t.folds[f].rank10}}
                    .dump() +
                "\n";
    }
    text += json{{"kind", "summary"},
                 {"label", label},
                 {"mean", {{"rank1", t.mean.rank1}, {"rank5", t.mean.rank5}, {"rank10", t.mean.rank10}}},
                 {"std", {{"rank1", t.stddev.rank1}, {"rank5", t.stddev.rank5}, {"rank10", t.stddev.rank10}}}}
                .dump() +
            "\n";
    write_output(out, text);
    std::cerr << t.render(label);
    return 0;
}

int cmd_eval_landmarks(const Globals& g, const std::string& manifest_path, const std::string& split_path,
                       const std::string& predictions_path, const std::string& out) {
    const auto m = open_manifest(manifest_path);
    std::vector<LabeledImage> images = labeled_images(m.manifest);
    if (!split_path.empty()) images = restrict_to(images, load_split(split_path).test_ids);
    std::vector<LabeledImage> annotated;
    for (const auto& i : images) {
        if (m.manifest.records[i.index].landmarks) annotated.push_back(i);
    }
    std::vector<FaceLandmarks> truth;
    std::vector<FaceLandmarks> predicted(annotated.size());
    for (const auto& i : annotated) truth.push_back(*m.manifest.records[i.index].landmarks);

    if (!predictions_path.empty()) {
        const DatasetManifest pred = load_manifest_file(predictions_path);
        for (std::size_t k = 0; k < annotated.size(); ++k) {
            const auto idx = pred.find(annotated[k].ref);
            if (!idx || !pred.records[*idx].landmarks) {
                throw Error(ErrorCode::Data, "no predicted landmarks for '" + annotated[k].ref + "'");
            }
            predicted[k] = *pred.records[*idx].landmarks;
        }
    } else {
        const Pipeline pipeline = make_pipeline(g, m, AlignParams{});
        parallel_for(annotated.size(), g.jobs, [&](std::size_t k) {
            const auto& rec = m.manifest.records[annotated[k].index];
            predicted[k] = pipeline.analyze(m.load(rec), rec.path, false).source_landmarks;
        });
    }
    const LandmarkErrorReport r = localization_error(predicted, truth);
    const json j = {{"kind", "landmark_error"},
                    {"count", r.count},
                    {"left_eye", r.left_eye},
                    {"right_eye", r.right_eye},
                    {"nose", r.nose},
                    {"average", r.average},
                    {"mean_squared",
                     {{"left_eye", r.left_eye_sq},
                      {"right_eye", r.right_eye_sq},
                      {"nose", r.nose_sq},
                      {"average", r.average_sq}}}};
    write_output(out, j.dump() + "\n");
    std::cerr << r.render_table();
    return 0;
}

int cmd_synth(const std::string& out_dir, std::size_t identities, std::size_t records, std::uint64_t seed) {
    SyntheticDatasetSpec spec;
    spec.identities = identities;
    spec.records = records;
    spec.seed = seed;
    spec.path_prefix = "images";
    const DatasetManifest m = make_synthetic_manifest(spec);
    for (const auto& r : m.records) {
        const fs::path p = fs::path(out_dir) / r.path;
        fs::create_directories(p.parent_path());
        write_image(p.string(), synthesize_record_image(r, spec));
    }
    save_manifest_file((fs::path(out_dir) / "manifest.jsonl").string(), m);
    std::cout << json{{"kind", "synth"}, {"records", m.records.size()}, {"identities", identities}}.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"animalid: individual animal identification from face images"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Top-level seed for every sampled decision")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads for batch commands")->check(CLI::PositiveNumber);
    app.add_option("--provider", g.provider, "mock | external:<spec>")->capture_default_str();
    app.add_flag("--trace", g.trace, "Emit a record per pipeline stage");

    std::string params_text = "a=1.3,b=1.7,c=1.2";
    int side = 224;
    auto add_align_opts = [&](CLI::App* sub) {
        sub->add_option("--params", params_text, "Crop ratios a=..,b=..,c=..")->capture_default_str();
        sub->add_option("--output-side", side, "Aligned image side in pixels")->capture_default_str();
    };

    std::string manifest, out, split_file, gallery_file, identity, frames_dir, images_dir, video_id;
    std::string source = "photo";
    int stride = 10;
    auto* ingest = app.add_subcommand("ingest", "Append images or every stride-th video frame to a manifest");
    ingest->add_option("--manifest", manifest)->required();
    ingest->add_option("--identity", identity)->required();
    ingest->add_option("--frames-dir", frames_dir, "Directory of extracted video frames (sorted by name)");
    ingest->add_option("--video-id", video_id);
    ingest->add_option("--stride", stride)->capture_default_str()->check(CLI::PositiveNumber);
    ingest->add_option("--images-dir", images_dir, "Directory of still images");
    ingest->add_option("--source", source, "photo | phone")->capture_default_str();

    double threshold = 0.6;
    std::vector<std::string> sources{"video_frame"};
    bool all_sources = false;
    std::string cleaned;
    auto* dedup = app.add_subcommand("dedup", "Greedy SSIM filtering of correlated images per individual");
    dedup->add_option("--manifest", manifest)->required();
    dedup->add_option("--threshold", threshold, "Discard when SSIM to a kept image >= threshold")
        ->capture_default_str();
    dedup->add_option("--out", out, "Report path (- for stdout)")->required();
    dedup->add_option("--sources", sources, "Sources to filter")->delimiter(',')->capture_default_str();
    dedup->add_flag("--all-sources", all_sources, "Filter photo, video_frame and phone images");
    dedup->add_option("--cleaned-manifest", cleaned, "Also write the filtered manifest here");

    std::size_t train = 34, test = 17;
    double fraction = 0.5;
    auto* split = app.add_subcommand("split", "Train/test identities and gallery/probe halving");
    split->add_option("--manifest", manifest)->required();
    split->add_option("--train", train)->capture_default_str();
    split->add_option("--test", test)->capture_default_str();
    split->add_option("--probe-fraction", fraction)->capture_default_str();
    split->add_option("--out", out)->required();

    std::string out_dir, landmark_source = "manifest";
    auto* align = app.add_subcommand("align", "Rotate and crop faces by the eye-line rule");
    align->add_option("--manifest", manifest)->required();
    align->add_option("--out-dir", out_dir)->required();
    align->add_option("--landmarks", landmark_source, "manifest | provider")->capture_default_str();
    add_align_opts(align);

    bool append = false;
    auto* enroll = app.add_subcommand("enroll", "Embed images and write a gallery file");
    enroll->add_option("--manifest", manifest)->required();
    enroll->add_option("--split", split_file, "Enroll only the split's gallery images");
    enroll->add_option("--gallery", gallery_file)->required();
    enroll->add_flag("--append", append, "Add to an existing gallery");
    add_align_opts(enroll);

    std::string image, ref, pooling = "max";
    std::optional<double> id_threshold;
    auto* identify = app.add_subcommand("identify", "Run the full pipeline on one image");
    identify->add_option("--manifest", manifest, "Annotations for mock providers");
    identify->add_option("--gallery", gallery_file)->required();
    identify->add_option("--image", image)->required();
    identify->add_option("--ref", ref, "Manifest path of the image (defaults to its manifest-relative path)");
    identify->add_option("--threshold", id_threshold, "Open-set threshold; omit for closed-set");
    identify->add_option("--pooling", pooling, "max | mean")->capture_default_str();
    add_align_opts(identify);

    auto* evaluate = app.add_subcommand("evaluate", "Evaluation protocols");
    evaluate->require_subcommand(1);
    std::size_t max_rank = 0, n_genuine = 1000, n_imposter = 1000, folds = 3;
    std::string population, label = "Automatically aligned", predictions;
    auto* cmc = evaluate->add_subcommand("cmc", "Cumulative match characteristic");
    cmc->add_option("--manifest", manifest)->required();
    cmc->add_option("--split", split_file)->required();
    cmc->add_option("--gallery", gallery_file, "Precomputed gallery (default: embed the split gallery)");
    cmc->add_option("--max-rank", max_rank, "Default: number of gallery identities");
    cmc->add_option("--pooling", pooling)->capture_default_str();
    cmc->add_option("--out", out);
    add_align_opts(cmc);
    auto* roc = evaluate->add_subcommand("roc", "Genuine/imposter ROC");
    roc->add_option("--manifest", manifest)->required();
    roc->add_option("--split", split_file);
    roc->add_option("--population", population, "test | all")->required();
    roc->add_option("--genuine", n_genuine)->capture_default_str();
    roc->add_option("--imposter", n_imposter)->capture_default_str();
    roc->add_option("--out", out);
    add_align_opts(roc);
    auto* ranks = evaluate->add_subcommand("ranks", "Rank-1/5/10 over re-drawn probe folds");
    ranks->add_option("--manifest", manifest)->required();
    ranks->add_option("--split", split_file)->required();
    ranks->add_option("--folds", folds)->capture_default_str();
    ranks->add_option("--pooling", pooling)->capture_default_str();
    ranks->add_option("--label", label)->capture_default_str();
    ranks->add_option("--out", out);
    add_align_opts(ranks);
    auto* lmk = evaluate->add_subcommand("landmarks", "Landmark localization error");
    lmk->add_option("--manifest", manifest)->required();
    lmk->add_option("--split", split_file, "Restrict to the split's test identities");
    lmk->add_option("--predictions", predictions, "Manifest-format file of predicted landmarks");
    lmk->add_option("--out", out);

    std::size_t synth_ids = 51, synth_records = 2877;
    auto* synth = app.add_subcommand("synth", "Write a synthetic annotated dataset");
    synth->add_option("--out-dir", out_dir)->required();
    synth->add_option("--identities", synth_ids)->capture_default_str();
    synth->add_option("--records", synth_records)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(manifest, identity, frames_dir, images_dir, video_id, stride, source);
        if (*dedup) {
            if (all_sources) sources = {"photo", "video_frame", "phone"};
            return cmd_dedup(g, manifest, threshold, out, sources, cleaned);
        }
        if (*split) return cmd_split(g, manifest, train, test, fraction, out);
        if (*align) return cmd_align(g, manifest, params_text, side, out_dir, landmark_source);
        if (*enroll) return cmd_enroll(g, manifest, split_file, gallery_file, append, params_text, side);
        if (*identify) {
            return cmd_identify(g, manifest, gallery_file, image, ref, id_threshold, pooling, params_text, side);
        }
        if (*cmc) return cmd_eval_cmc(g, manifest, split_file, gallery_file, max_rank, pooling, out, params_text, side);
        if (*roc) {
            return cmd_eval_roc(g, manifest, split_file, population, n_genuine, n_imposter, out, params_text, side);
        }
        if (*ranks) return cmd_eval_ranks(g, manifest, split_file, folds, pooling, label, out, params_text, side);
        if (*lmk) return cmd_eval_landmarks(g, manifest, split_file, predictions, out);
        if (*synth) return cmd_synth(out_dir, synth_ids, synth_records, g.seed);
    } catch (const StageError& e) {
        std::cerr << "error [" << to_string(e.code()) << "] at stage " << e.stage() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
