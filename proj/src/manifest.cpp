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

#include "animalid/manifest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "animalid/error.hpp"
#include "animalid/io.hpp"

namespace animalid {

using nlohmann::json;

namespace {

const std::unordered_set<std::string> kKnownFields = {
    "path", "identity", "source", "bbox", "landmarks", "video_id", "frame_index"};

Point2 parse_point(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::Data, std::string(name) + " must be an [x, y] number pair");
    }
    return Point2{j[0].get<double>(), j[1].get<double>()};
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

ManifestRecord parse_record(const json& j, std::size_t& unknown) {
    if (!j.is_object()) throw Error(ErrorCode::Data, "record must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!kKnownFields.contains(key)) ++unknown;
    }
    ManifestRecord r;
    if (!j.contains("path") || !j["path"].is_string()) throw Error(ErrorCode::Data, "missing string field 'path'");
    if (!j.contains("identity") || !j["identity"].is_string()) {
        throw Error(ErrorCode::Data, "missing string field 'identity'");
    }
    r.path = j["path"].get<std::string>();
    r.identity = j["identity"].get<std::string>();
    if (j.contains("source")) {
        if (!j["source"].is_string()) throw Error(ErrorCode::Data, "'source' must be a string");
        r.source = parse_image_source(j["source"].get<std::string>());
    }
    if (j.contains("bbox")) {
        const json& b = j["bbox"];
        for (const char* k : {"x", "y", "w", "h"}) {
            if (!b.is_object() || !b.contains(k) || !b[k].is_number()) {
                throw Error(ErrorCode::Data, "'bbox' must be an object with numeric x, y, w, h");
            }
        }
        r.bbox = BoundingBox{b["x"].get<double>(), b["y"].get<double>(), b["w"].get<double>(),
                             b["h"].get<double>()};
    }
    if (j.contains("landmarks")) {
        const json& l = j["landmarks"];
        if (!l.is_object() || !l.contains("left_eye") || !l.contains("right_eye") || !l.contains("nose")) {
            throw Error(ErrorCode::Data, "'landmarks' needs left_eye, right_eye and nose");
        }
        r.landmarks = FaceLandmarks{parse_point(l["left_eye"], "left_eye"),
                                    parse_point(l["right_eye"], "right_eye"), parse_point(l["nose"], "nose")};
    }
    if (j.contains("video_id")) {
        if (!j["video_id"].is_string()) throw Error(ErrorCode::Data, "'video_id' must be a string");
        r.video_id = j["video_id"].get<std::string>();
    }
    if (j.contains("frame_index")) {
        if (!j["frame_index"].is_number_integer()) throw Error(ErrorCode::Data, "'frame_index' must be an integer");
        r.frame_index = j["frame_index"].get<std::int64_t>();
    }
    r.validate();
    return r;
}

json record_json(const ManifestRecord& r) {
    json j = json::object();
    j["path"] = r.path;
    j["identity"] = r.identity;
    j["source"] = to_string(r.source);
    if (r.bbox) j["bbox"] = {{"x", r.bbox->x}, {"y", r.bbox->y}, {"w", r.bbox->w}, {"h", r.bbox->h}};
    if (r.landmarks) {
        j["landmarks"] = {{"left_eye", point_json(r.landmarks->left_eye)},
                          {"right_eye", point_json(r.landmarks->right_eye)},
                          {"nose", point_json(r.landmarks->nose)}};
    }
    if (r.video_id) j["video_id"] = *r.video_id;
    if (r.frame_index) j["frame_index"] = *r.frame_index;
    return j;
}

}  // namespace

const char* to_string(ImageSource s) noexcept {
    switch (s) {
        case ImageSource::Photo: return "photo";
        case ImageSource::VideoFrame: return "video_frame";
        case ImageSource::Phone: return "phone";
    }
    return "photo";
}

ImageSource parse_image_source(std::string_view name) {
    if (name == "photo") return ImageSource::Photo;
    if (name == "video_frame") return ImageSource::VideoFrame;
    if (name == "phone") return ImageSource::Phone;
    throw Error(ErrorCode::Data, "unknown image source '" + std::string(name) + "'");
}

void ManifestRecord::validate() const {
    if (path.empty()) throw Error(ErrorCode::Data, "record path is empty");
    if (identity.empty()) throw Error(ErrorCode::Data, "record identity is empty");
    if (landmarks) landmarks->validate();
    if (bbox) {
        if (!std::isfinite(bbox->x) || !std::isfinite(bbox->y) || !(bbox->w > 0.0) || !(bbox->h > 0.0) ||
            !std::isfinite(bbox->w) || !std::isfinite(bbox->h)) {
            throw Error(ErrorCode::Data, "bbox must be finite with w, h > 0");
        }
    }
    if (frame_index.has_value() != (source == ImageSource::VideoFrame)) {
        throw Error(ErrorCode::Data, "frame_index must be present exactly for video_frame records");
    }
    if (frame_index && *frame_index < 0) throw Error(ErrorCode::Data, "frame_index must be >= 0");
}

std::vector<std::string> DatasetManifest::identities() const {
    std::vector<std::string> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& r : records) {
        if (seen.insert(r.identity).second) out.push_back(r.identity);
    }
    return out;
}

std::optional<std::size_t> DatasetManifest::find(std::string_view path) const {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].path == path) return i;
    }
    return std::nullopt;
}

DatasetManifest load_manifest(std::istream& in) {
    DatasetManifest m;
    std::unordered_map<std::string, std::size_t> paths;
    std::string line;
    std::size_t line_no = 0;
    bool seen_record = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            if (j.is_object() && j.contains("schema_version") && !j.contains("path")) {
                if (seen_record) throw Error(ErrorCode::Data, "schema header after records");
                if (!j["schema_version"].is_number_integer()) {
                    throw Error(ErrorCode::Data, "schema_version must be an integer");
                }
                m.schema_version = j["schema_version"].get<int>();
                if (m.schema_version != DatasetManifest::kSchemaVersion) {
                    throw Error(ErrorCode::Data, "unsupported schema_version " + std::to_string(m.schema_version));
                }
                continue;
            }
            ManifestRecord r = parse_record(j, m.unknown_field_warnings);
            if (auto [it, inserted] = paths.try_emplace(r.path, line_no); !inserted) {
                throw Error(ErrorCode::Data, "duplicate path '" + r.path + "' (first on line " +
                                                 std::to_string(it->second) + ")");
            }
            m.records.push_back(std::move(r));
            seen_record = true;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Data, "manifest line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::Data, "manifest line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (in.bad()) throw Error(ErrorCode::Io, "error reading manifest");
    return m;
}

DatasetManifest load_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open manifest " + path);
    return load_manifest(in);
}

std::string record_to_json_line(const ManifestRecord& record) { return record_json(record).dump(); }

void save_manifest(std::ostream& out, const DatasetManifest& manifest) {
    out << json{{"schema_version", manifest.schema_version}}.dump() << '\n';
    for (const auto& r : manifest.records) out << record_to_json_line(r) << '\n';
}

void save_manifest_file(const std::string& path, const DatasetManifest& manifest) {
    std::ostringstream out;
    save_manifest(out, manifest);
    write_file_atomic(path, out.str());
}

std::vector<ManifestRecord> ingest_video(const std::vector<std::string>& frame_paths, int stride,
                                         const std::string& identity, const std::string& video_id) {
    if (stride < 1) throw Error(ErrorCode::InvalidArgument, "ingest_video: stride must be >= 1");
    if (frame_paths.empty()) throw Error(ErrorCode::EmptyInput, "ingest_video: video has no frames");
    std::vector<ManifestRecord> out;
    for (std::size_t i = 0; i < frame_paths.size(); i += static_cast<std::size_t>(stride)) {
        ManifestRecord r;
        r.path = frame_paths[i];
        r.identity = identity;
        r.source = ImageSource::VideoFrame;
        r.video_id = video_id;
        r.frame_index = static_cast<std::int64_t>(i);
        r.validate();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace animalid
