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

#include "animalid/io.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "animalid/error.hpp"

namespace animalid {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ImageBuffer decode_png(const std::string& bytes, const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::Data, path + ": " + image.message);
    }
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    // Composite any alpha onto black.
    png_color background{0, 0, 0};
    if (!png_image_finish_read(&image, &background, pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(ErrorCode::Data, path + ": " + image.message);
    }
    return ImageBuffer(static_cast<int>(image.width), static_cast<int>(image.height), gray ? 1 : 3,
                       std::move(pixels));
}

ImageBuffer decode_pnm(const std::string& bytes, const std::string& path) {
    std::istringstream in(bytes);
    std::string magic;
    in >> magic;
    auto next_int = [&]() {
        int v = -1;
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string comment;
                std::getline(in, comment);
                continue;
            }
            in >> v;
            return v;
        }
    };
    const int w = next_int();
    const int h = next_int();
    const int maxval = next_int();
    if (!in || (magic != "P5" && magic != "P6") || w < 1 || h < 1 || maxval != 255) {
        throw Error(ErrorCode::Data, path + ": unsupported PNM header");
    }
    in.get();  // single whitespace before the raster
    const int channels = magic == "P5" ? 1 : 3;
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
        throw Error(ErrorCode::Data, path + ": truncated PNM raster");
    }
    return ImageBuffer(w, h, channels, std::move(pixels));
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "failed writing " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ImageBuffer read_image(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
        return decode_png(bytes, path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_pnm(bytes, path);
    }
    throw Error(ErrorCode::Data, path + ": unrecognized image format");
}

void write_image(const std::string& path, const ImageBuffer& img) {
    if (img.empty()) throw Error(ErrorCode::InvalidArgument, "write_image: empty image");
    std::string bytes;
    if (ends_with(path, ".pgm") || ends_with(path, ".ppm")) {
        const bool gray = img.channels() == 1;
        if (gray != ends_with(path, ".pgm")) {
            throw Error(ErrorCode::InvalidArgument, path + ": extension does not match channel count");
        }
        bytes = std::string(gray ? "P5\n" : "P6\n") + std::to_string(img.width()) + " " +
                std::to_string(img.height()) + "\n255\n";
        bytes.append(reinterpret_cast<const char*>(img.pixels().data()), img.pixels().size());
    } else {
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        image.width = static_cast<png_uint_32>(img.width());
        image.height = static_cast<png_uint_32>(img.height());
        image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
        // Worst-case bound lets libpng encode once.
        png_alloc_size_t size = PNG_IMAGE_PNG_SIZE_MAX(image);
        bytes.resize(size);
        if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, img.pixels().data(), 0, nullptr)) {
            throw Error(ErrorCode::Io, path + ": " + image.message);
        }
        bytes.resize(size);
    }
    write_file_atomic(path, bytes);
}

}  // namespace animalid
