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

#ifndef ANIMALID_ERROR_HPP
#define ANIMALID_ERROR_HPP

#include <stdexcept>
#include <string>

namespace animalid {

/// Failure classes. The CLI maps these onto process exit codes.
enum class ErrorCode {
    InvalidArgument,
    Io,
    Data,                 // malformed manifest, split or report input
    EmptyInput,           // e.g. an individual with no images
    NoFace,
    LandmarkNotFound,
    DegenerateLandmarks,
    Provider,
    DimensionMismatch,
    GalleryEmpty,
    GalleryVersion,
    GalleryDimension,
    GalleryTruncated,
    GalleryCorrupt,
    InsufficientData,     // not enough identities / images / pairs
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Process exit code for an error class: 2 data, 3 provider, 4 no-face/landmark.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace animalid

#endif  // ANIMALID_ERROR_HPP
