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

#ifndef ANIMALID_IO_HPP
#define ANIMALID_IO_HPP

#include <string>

#include "animalid/image.hpp"

namespace animalid {

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// PNG (gray, gray+alpha, RGB, RGBA; alpha dropped) or binary PGM/PPM,
/// chosen by file signature.
ImageBuffer read_image(const std::string& path);
/// PNG for ".png", binary PGM/PPM for ".pgm"/".ppm". Written atomically.
void write_image(const std::string& path, const ImageBuffer& img);

}  // namespace animalid

#endif  // ANIMALID_IO_HPP
