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

#ifndef ANIMALID_MANIFEST_HPP
#define ANIMALID_MANIFEST_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "animalid/image.hpp"
#include "animalid/landmarks.hpp"

namespace animalid {

enum class ImageSource { Photo, VideoFrame, Phone };

const char* to_string(ImageSource s) noexcept;
/// Throws Data for an unknown name.
ImageSource parse_image_source(std::string_view name);

/// One annotated image. Landmarks are in original-image coordinates.
struct ManifestRecord {
    std::string path;
    std::string identity;
    ImageSource source = ImageSource::Photo;
    std::optional<BoundingBox> bbox;
    std::optional<FaceLandmarks> landmarks;
    std::optional<std::string> video_id;
    std::optional<std::int64_t> frame_index;

    /// Throws Data when an invariant does not hold.
    void validate() const;

    friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

/// Line-delimited JSON: an optional {"schema_version": N} header line, then
/// one record object per line, in file order.
struct DatasetManifest {
    static constexpr int kSchemaVersion = 1;

    int schema_version = kSchemaVersion;
    std::vector<ManifestRecord> records;
    std::size_t unknown_field_warnings = 0;

    /// Distinct identities in order of first appearance.
    std::vector<std::string> identities() const;
    /// Index of the record with `path`, if any.
    std::optional<std::size_t> find(std::string_view path) const;
};

/// Errors carry the 1-based line number. Duplicate paths are rejected.
DatasetManifest load_manifest(std::istream& in);
DatasetManifest load_manifest_file(const std::string& path);

/// Keys are written in sorted order so repeated saves are byte-identical.
void save_manifest(std::ostream& out, const DatasetManifest& manifest);
void save_manifest_file(const std::string& path, const DatasetManifest& manifest);

std::string record_to_json_line(const ManifestRecord& record);

/// Keeps frames 0, stride, 2*stride, ... of an ordered clip as
/// video_frame records.
std::vector<ManifestRecord> ingest_video(const std::vector<std::string>& frame_paths, int stride,
                                         const std::string& identity, const std::string& video_id);

}  // namespace animalid

#endif  // ANIMALID_MANIFEST_HPP
