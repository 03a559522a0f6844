#include <gtest/gtest.h>

#include "tadac/errors.hpp"
#include "tadac/manifest.hpp"

namespace tadac {
namespace {

Manifest sample_manifest() {
  Manifest m;
  m.kind = "distort";
  m.global_seed = 18446744073709551615ULL;
  m.phrase_checksum = "0123456789abcdef";
  ManifestRow a;
  a.record.image_id = "a__blur_2";
  a.record.source = SourceKind::Synthetic;
  a.record.content_label = "dog";
  a.record.distortion = DistortionSpec{DistortionType::Blur, 2, 77};
  a.record.texts = {"A photo of a dog", "little blurring."};
  a.record.seed = 5;
  a.image_path = "images/a__blur_2.png";
  a.saliency_path = "saliency/a.png";
  a.width = 64;
  a.height = 48;
  ManifestRow b;
  b.record.image_id = "b";
  b.record.source = SourceKind::Authentic;
  AppearanceProfile p;
  p.brightness = {0.1234567890123, 0.1234567890123, Level::Low};
  p.contrast = {0.3, 0.6, Level::High};
  p.sharpness = {1.0 / 3.0, 1.0 / 3.0, Level::High};
  p.colorfulness = {0.0, 0.0, Level::Low};
  b.record.appearance = p;
  b.record.texts = {"dark \"quoted\" text", "x"};
  b.image_path = "images/b.png";
  b.width = 1;
  b.height = 1;
  m.rows = {a, b};
  return m;
}

TEST(Manifest, RoundTripsExactly) {
  const Manifest m = sample_manifest();
  const std::string text = serialize(m);
  EXPECT_EQ(parse_manifest(text), m);
  EXPECT_EQ(serialize(parse_manifest(text)), text);
}

TEST(Manifest, HeaderComesFirst) {
  const std::string text = serialize(sample_manifest());
  EXPECT_EQ(text.rfind(R"({"format":"tadac-manifest","version":1,"kind":"distort")", 0), 0U);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(Manifest, UnsortedRowsAreRejected) {
  Manifest m = sample_manifest();
  std::swap(m.rows[0], m.rows[1]);
  EXPECT_THROW(serialize(m), ValidationError);
  m.sort_rows();
  EXPECT_NO_THROW(serialize(m));
}

TEST(Manifest, NewerVersionFailsLoudly) {
  std::string text = serialize(sample_manifest());
  text.replace(text.find("\"version\":1"), 11, "\"version\":2");
  try {
    parse_manifest(text, "m.jsonl");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("version 2"), std::string::npos) << what;
    EXPECT_NE(what.find("m.jsonl:1"), std::string::npos) << what;
  }
}

TEST(Manifest, UnknownFieldsNameTheVersion) {
  std::string text = serialize(sample_manifest());
  text.insert(text.find("\"image_id\":\"b\""), "\"mood\":\"happy\",");
  try {
    parse_manifest(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("'mood'"), std::string::npos);
    EXPECT_NE(what.find("version 1"), std::string::npos);
    EXPECT_NE(what.find(":3:"), std::string::npos);
  }
}

TEST(Manifest, MalformedInputsAreRejected) {
  EXPECT_THROW(parse_manifest(""), ValidationError);
  EXPECT_THROW(parse_manifest("{not json"), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"format":"other","version":1})"), ValidationError);
  std::string text = serialize(sample_manifest());
  text.replace(text.find("\"blur\""), 6, "\"sepia\"");
  EXPECT_THROW(parse_manifest(text), ValidationError);
  text = serialize(sample_manifest());
  text.replace(text.find("\"level\":2"), 9, "\"level\":7");
  EXPECT_THROW(parse_manifest(text), ValidationError);
  text = serialize(sample_manifest());
  text.replace(text.find("\"width\":64"), 10, "\"width\":-4");
  EXPECT_THROW(parse_manifest(text), ValidationError);
}

TEST(PairManifest, RoundTrips) {
  PairManifest m;
  m.global_seed = 3;
  m.phrase_checksum = "abc";
  m.batch_size = 2;
  m.crop_side = 32;
  PairRecord t;
  t.batch = 0;
  t.left = {"a", CropWindow{1, 2, 32}};
  t.right_text = TextRef{"a", 1, "text"};
  PairRecord i;
  i.batch = 1;
  i.kind = PairKind::ImageImage;
  i.polarity = Polarity::Negative;
  i.left = {"a", CropWindow{0, 0, 32}};
  i.right_image = ImageRef{"b", CropWindow{3, 4, 32}};
  PairRecord o = i;
  o.polarity = Polarity::Positive;
  o.right_image = ImageRef{"a", CropWindow{24, 0, 32}};
  o.overlap_fraction = 0.25;
  m.pairs = {t, i, o};
  const std::string text = serialize(m);
  EXPECT_EQ(parse_pair_manifest(text), m);
  EXPECT_THROW(parse_manifest(text), ValidationError);

  std::string both = text;
  both.replace(both.find("\"text\":{"), 8, "\"image\":{\"image_id\":\"z\"},\"text\":{");
  EXPECT_THROW(parse_pair_manifest(both), ValidationError);
}

}  // namespace
}  // namespace tadac
