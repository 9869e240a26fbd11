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

#include "animalid/error.hpp"

namespace animalid {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Io: return "io";
        case ErrorCode::Data: return "data";
        case ErrorCode::EmptyInput: return "empty-input";
        case ErrorCode::NoFace: return "no-face";
        case ErrorCode::LandmarkNotFound: return "landmark-not-found";
        case ErrorCode::DegenerateLandmarks: return "degenerate-landmarks";
        case ErrorCode::Provider: return "provider";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::GalleryEmpty: return "gallery-empty";
        case ErrorCode::GalleryVersion: return "gallery-version";
        case ErrorCode::GalleryDimension: return "gallery-dimension";
        case ErrorCode::GalleryTruncated: return "gallery-truncated";
        case ErrorCode::GalleryCorrupt: return "gallery-corrupt";
        case ErrorCode::InsufficientData: return "insufficient-data";
    }
    return "unknown";
}

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Provider: return 3;
        case ErrorCode::NoFace:
        case ErrorCode::LandmarkNotFound:
        case ErrorCode::DegenerateLandmarks: return 4;
        default: return 2;
    }
}

}  // namespace animalid
