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


#include <gtest/gtest.h>

#include <sstream>

#include "animalid/error.hpp"
#include "animalid/manifest.hpp"
#include "animalid/synthetic.hpp"

namespace animalid {
namespace {

DatasetManifest parse(const std::string& text) {
    std::istringstream in(text);
    return load_manifest(in);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Data);
        return e.what();
    }
    ADD_FAILURE() << "parse succeeded";
    return {};
}

TEST(Manifest, EmptyFile) {
    EXPECT_TRUE(parse("").records.empty());
    EXPECT_TRUE(parse("\n\n").records.empty());
}

TEST(Manifest, FullScaleFixture) {
    std::ostringstream out;
    save_manifest(out, make_synthetic_manifest({}));
    const auto m = parse(out.str());
    EXPECT_EQ(m.records.size(), 2877u);
    EXPECT_EQ(m.identities().size(), 51u);
}

TEST(Manifest, MinimalRecord) {
    const auto m = parse(R"({"path":"a.png","identity":"x"})" "\n");
    ASSERT_EQ(m.records.size(), 1u);
    EXPECT_EQ(m.records[0].source, ImageSource::Photo);
    EXPECT_FALSE(m.records[0].bbox.has_value());
}

TEST(Manifest, SwappedEyesNameTheLine) {
    const std::string text =
        R"({"schema_version":1})" "\n"
        R"({"path":"a.png","identity":"x"})" "\n"
        R"({"path":"b.png","identity":"x","landmarks":{"left_eye":[50,10],"right_eye":[20,10],"nose":[35,30]}})" "\n";
    EXPECT_NE(error_of(text).find("line 3"), std::string::npos);
}

TEST(Manifest, MalformedInputs) {
    EXPECT_NE(error_of("{not json\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of(R"({"identity":"x"})").find("path"), std::string::npos);
    error_of(R"({"path":"a","identity":"x","source":"drone"})");
    error_of(R"({"path":"a","identity":"x","source":"video_frame"})");
    error_of(R"({"path":"a","identity":"x","frame_index":3})");
    error_of(R"({"path":"a","identity":"x","bbox":{"x":0,"y":0,"w":0,"h":5}})");
    error_of(R"({"schema_version":7})");
    EXPECT_NE(error_of(R"({"path":"a","identity":"x"})" "\n" R"({"path":"a","identity":"y"})").find("duplicate"),
              std::string::npos);
}

TEST(Manifest, UnknownFieldsAreCounted) {
    const auto m = parse(R"({"path":"a","identity":"x","camera":"z","note":1})" "\n");
    EXPECT_EQ(m.unknown_field_warnings, 2u);
}

TEST(Manifest, RoundTripIsByteStable) {
    SyntheticDatasetSpec spec;
    spec.records = 40;
    spec.identities = 4;
    const auto m = make_synthetic_manifest(spec);
    std::ostringstream a;
    save_manifest(a, m);
    const auto back = parse(a.str());
    EXPECT_EQ(back.records, m.records);
    std::ostringstream b;
    save_manifest(b, back);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Manifest, FindAndIdentitiesOrder) {
    const auto m = parse(R"({"path":"a","identity":"z"})" "\n" R"({"path":"b","identity":"y"})" "\n"
                         R"({"path":"c","identity":"z"})" "\n");
    EXPECT_EQ(m.identities(), (std::vector<std::string>{"z", "y"}));
    EXPECT_EQ(m.find("c"), 2u);
    EXPECT_FALSE(m.find("d").has_value());
}

std::vector<std::string> frames(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back("f" + std::to_string(i) + ".png");
    return v;
}

TEST(IngestVideo, EveryTenthFrame) {
    const auto r = ingest_video(frames(100), 10, "red", "clip");
    ASSERT_EQ(r.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(r[i].frame_index, static_cast<std::int64_t>(10 * i));
        EXPECT_EQ(r[i].path, "f" + std::to_string(10 * i) + ".png");
        EXPECT_EQ(r[i].source, ImageSource::VideoFrame);
        EXPECT_EQ(r[i].video_id, "clip");
    }
}

TEST(IngestVideo, StrideOneAndShortClip) {
    EXPECT_EQ(ingest_video(frames(7), 1, "a", "v").size(), 7u);
    const auto r = ingest_video(frames(5), 10, "a", "v");
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].frame_index, 0);
}

TEST(IngestVideo, Errors) {
    EXPECT_THROW(ingest_video({}, 10, "a", "v"), Error);
    EXPECT_THROW(ingest_video(frames(3), 0, "a", "v"), Error);
}

TEST(ImageSourceNames, RoundTrip) {
    for (ImageSource s : {ImageSource::Photo, ImageSource::VideoFrame, ImageSource::Phone}) {
        EXPECT_EQ(parse_image_source(to_string(s)), s);
    }
}

}  // namespace
}  // namespace animalid
