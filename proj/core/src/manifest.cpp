#include "tadac/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tadac/errors.hpp"

namespace tadac {

namespace {

using Json = nlohmann::ordered_json;

// Error context: "origin:line".
struct Where {
  std::string_view origin;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(std::string(origin) + ":" + std::to_string(line) + ": " + what);
  }
};

void only_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
               const Where& at) {
  if (!obj.is_object()) at.fail("expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      at.fail("unknown field '" + item.key() + "' (not defined in manifest version " +
              std::to_string(kManifestVersion) + ")");
    }
  }
}

const Json& field(const Json& obj, std::string_view key, const Where& at) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) at.fail("missing field '" + std::string(key) + "'");
  return *it;
}

std::string get_string(const Json& obj, std::string_view key, const Where& at) {
  const Json& v = field(obj, key, at);
  if (!v.is_string()) at.fail("field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t get_u64(const Json& obj, std::string_view key, const Where& at) {
  const Json& v = field(obj, key, at);
  if (!v.is_number_unsigned()) {
    at.fail("field '" + std::string(key) + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

int get_int(const Json& obj, std::string_view key, const Where& at) {
  const std::uint64_t v = get_u64(obj, key, at);
  if (v > 1'000'000'000ULL) at.fail("field '" + std::string(key) + "' is out of range");
  return static_cast<int>(v);
}

double get_double(const Json& obj, std::string_view key, const Where& at) {
  const Json& v = field(obj, key, at);
  if (!v.is_number()) at.fail("field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

template <class F>
auto converting(const Where& at, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    at.fail(e.what());
  }
}

void check_header(const Json& h, std::string_view format, const Where& at) {
  if (!h.is_object()) at.fail("header must be an object");
  const std::string got = get_string(h, "format", at);
  if (got != format) at.fail("expected format '" + std::string(format) + "', got '" + got + "'");
  const std::uint64_t version = get_u64(h, "version", at);
  if (version > static_cast<std::uint64_t>(kManifestVersion)) {
    at.fail("manifest version " + std::to_string(version) + " requires a newer reader (this one reads version " +
            std::to_string(kManifestVersion) + ")");
  }
  if (version < 1) at.fail("invalid manifest version 0");
}

Json crop_json(const CropWindow& w) { return Json::array({w.origin_x, w.origin_y, w.side}); }

CropWindow crop_from(const Json& v, const Where& at) {
  if (!v.is_array() || v.size() != 3) at.fail("crop must be [x, y, side]");
  for (const Json& e : v)
    if (!e.is_number_unsigned()) at.fail("crop entries must be nonnegative integers");
  return {v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
}

Json image_ref_json(const ImageRef& r) {
  Json j;
  j["image_id"] = r.image_id;
  if (r.crop) j["crop"] = crop_json(*r.crop);
  return j;
}

ImageRef image_ref_from(const Json& j, const Where& at) {
  only_keys(j, {"image_id", "crop"}, at);
  ImageRef r;
  r.image_id = get_string(j, "image_id", at);
  if (j.contains("crop")) r.crop = crop_from(j["crop"], at);
  return r;
}

Json row_json(const ManifestRow& row) {
  const AnnotationRecord& rec = row.record;
  Json j;
  j["image_id"] = rec.image_id;
  j["source"] = std::string(to_name(rec.source));
  if (rec.content_label) j["content_label"] = *rec.content_label;
  j["image_path"] = row.image_path;
  if (row.saliency_path) j["saliency_path"] = *row.saliency_path;
  j["width"] = row.width;
  j["height"] = row.height;
  if (rec.distortion) {
    j["distortion"] = Json{{"kind", std::string(to_name(rec.distortion->kind))},
                           {"level", rec.distortion->level},
                           {"seed", rec.distortion->seed}};
  }
  if (rec.appearance) {
    Json a;
    for (MetricKind m : {MetricKind::Brightness, MetricKind::Contrast, MetricKind::Sharpness,
                         MetricKind::Colorfulness}) {
      const MetricValue& v = rec.appearance->get(m);
      a[std::string(to_name(m))] =
          Json{{"raw", v.raw}, {"norm", v.norm}, {"level", std::string(to_name(v.level))}};
    }
    j["appearance"] = std::move(a);
  }
  j["texts"] = rec.texts;
  j["seed"] = rec.seed;
  return j;
}

ManifestRow row_from(const Json& j, const Where& at) {
  only_keys(j,
            {"image_id", "source", "content_label", "image_path", "saliency_path", "width",
             "height", "distortion", "appearance", "texts", "seed"},
            at);
  ManifestRow row;
  AnnotationRecord& rec = row.record;
  rec.image_id = get_string(j, "image_id", at);
  if (rec.image_id.empty()) at.fail("image_id must not be empty");
  rec.source = converting(at, [&] { return source_from_name(get_string(j, "source", at)); });
  if (j.contains("content_label")) rec.content_label = get_string(j, "content_label", at);
  row.image_path = get_string(j, "image_path", at);
  if (j.contains("saliency_path")) row.saliency_path = get_string(j, "saliency_path", at);
  row.width = get_int(j, "width", at);
  row.height = get_int(j, "height", at);
  if (j.contains("distortion")) {
    const Json& d = j["distortion"];
    only_keys(d, {"kind", "level", "seed"}, at);
    DistortionSpec spec;
    spec.kind = converting(at, [&] { return distortion_from_name(get_string(d, "kind", at)); });
    spec.level = get_int(d, "level", at);
    converting(at, [&] {
      check_level(spec.level);
      return 0;
    });
    spec.seed = get_u64(d, "seed", at);
    rec.distortion = spec;
  }
  if (j.contains("appearance")) {
    const Json& a = j["appearance"];
    only_keys(a, {"brightness", "contrast", "sharpness", "colorfulness"}, at);
    AppearanceProfile p;
    for (MetricKind m : {MetricKind::Brightness, MetricKind::Contrast, MetricKind::Sharpness,
                         MetricKind::Colorfulness}) {
      const Json& v = field(a, to_name(m), at);
      only_keys(v, {"raw", "norm", "level"}, at);
      MetricValue& mv = p.get(m);
      mv.raw = get_double(v, "raw", at);
      mv.norm = get_double(v, "norm", at);
      mv.level = converting(at, [&] { return level_from_name(get_string(v, "level", at)); });
    }
    rec.appearance = p;
  }
  const Json& texts = field(j, "texts", at);
  if (!texts.is_array()) at.fail("field 'texts' must be an array");
  for (const Json& t : texts) {
    if (!t.is_string()) at.fail("texts must be strings");
    rec.texts.push_back(t.get<std::string>());
  }
  rec.seed = get_u64(j, "seed", at);
  return row;
}

Json pair_json(const PairRecord& p) {
  Json j;
  j["batch"] = p.batch;
  j["kind"] = std::string(to_name(p.kind));
  j["polarity"] = std::string(to_name(p.polarity));
  j["left"] = image_ref_json(p.left);
  if (p.right_text) {
    j["text"] = Json{{"image_id", p.right_text->image_id},
                     {"index", p.right_text->text_index},
                     {"text", p.right_text->text}};
  }
  if (p.right_image) j["image"] = image_ref_json(*p.right_image);
  if (p.overlap_fraction) j["overlap"] = *p.overlap_fraction;
  return j;
}

PairRecord pair_from(const Json& j, const Where& at) {
  only_keys(j, {"batch", "kind", "polarity", "left", "text", "image", "overlap"}, at);
  PairRecord p;
  p.batch = get_u64(j, "batch", at);
  const std::string kind = get_string(j, "kind", at);
  if (kind == "image_text") {
    p.kind = PairKind::ImageText;
  } else if (kind == "image_image") {
    p.kind = PairKind::ImageImage;
  } else {
    at.fail("unknown pair kind '" + kind + "'");
  }
  const std::string polarity = get_string(j, "polarity", at);
  if (polarity == "positive") {
    p.polarity = Polarity::Positive;
  } else if (polarity == "negative") {
    p.polarity = Polarity::Negative;
  } else {
    at.fail("unknown polarity '" + polarity + "'");
  }
  p.left = image_ref_from(field(j, "left", at), at);
  if (j.contains("text")) {
    const Json& t = j["text"];
    only_keys(t, {"image_id", "index", "text"}, at);
    p.right_text = TextRef{get_string(t, "image_id", at), get_u64(t, "index", at),
                           get_string(t, "text", at)};
  }
  if (j.contains("image")) p.right_image = image_ref_from(j["image"], at);
  if (j.contains("overlap")) p.overlap_fraction = get_double(j, "overlap", at);
  if (p.right_text.has_value() == p.right_image.has_value()) {
    at.fail("a pair needs exactly one of 'text' or 'image'");
  }
  return p;
}

// Splits into nonblank lines, parsing each as JSON.
std::vector<std::pair<std::size_t, Json>> json_lines(std::string_view text,
                                                     std::string_view origin) {
  std::vector<std::pair<std::size_t, Json>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.emplace_back(line_no, Json::parse(line));
    } catch (const Json::parse_error& e) {
      Where{origin, line_no}.fail(std::string("malformed JSON: ") + e.what());
    }
  }
  if (out.empty()) throw ValidationError(std::string(origin) + ": manifest is empty");
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out.flush()) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void Manifest::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(), [](const ManifestRow& a, const ManifestRow& b) {
    return a.record.image_id < b.record.image_id;
  });
}

std::string serialize(const Manifest& manifest) {
  std::string out;
  Json header;
  header["format"] = kManifestFormat;
  header["version"] = kManifestVersion;
  header["kind"] = manifest.kind;
  header["global_seed"] = manifest.global_seed;
  header["phrase_checksum"] = manifest.phrase_checksum;
  out += header.dump();
  out += '\n';
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    if (i > 0 && !(manifest.rows[i - 1].record.image_id < manifest.rows[i].record.image_id)) {
      throw ValidationError("manifest rows must be sorted by unique image_id ('" +
                            manifest.rows[i].record.image_id + "')");
    }
    out += row_json(manifest.rows[i]).dump();
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text, std::string_view origin) {
  const auto lines = json_lines(text, origin);
  const Where head{origin, lines.front().first};
  const Json& h = lines.front().second;
  check_header(h, kManifestFormat, head);
  only_keys(h, {"format", "version", "kind", "global_seed", "phrase_checksum"}, head);
  Manifest m;
  m.kind = get_string(h, "kind", head);
  m.global_seed = get_u64(h, "global_seed", head);
  m.phrase_checksum = get_string(h, "phrase_checksum", head);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Where at{origin, lines[i].first};
    m.rows.push_back(row_from(lines[i].second, at));
    if (i > 1 && !(m.rows[i - 2].record.image_id < m.rows[i - 1].record.image_id)) {
      at.fail("rows are not sorted by unique image_id");
    }
  }
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  write_text(serialize(manifest), path);
}

Manifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.string());
}

std::string serialize(const PairManifest& manifest) {
  std::string out;
  Json header;
  header["format"] = kPairManifestFormat;
  header["version"] = kManifestVersion;
  header["global_seed"] = manifest.global_seed;
  header["phrase_checksum"] = manifest.phrase_checksum;
  header["batch_size"] = manifest.batch_size;
  header["crop_side"] = manifest.crop_side;
  out += header.dump();
  out += '\n';
  for (const PairRecord& p : manifest.pairs) {
    out += pair_json(p).dump();
    out += '\n';
  }
  return out;
}

PairManifest parse_pair_manifest(std::string_view text, std::string_view origin) {
  const auto lines = json_lines(text, origin);
  const Where head{origin, lines.front().first};
  const Json& h = lines.front().second;
  check_header(h, kPairManifestFormat, head);
  only_keys(h, {"format", "version", "global_seed", "phrase_checksum", "batch_size", "crop_side"},
            head);
  PairManifest m;
  m.global_seed = get_u64(h, "global_seed", head);
  m.phrase_checksum = get_string(h, "phrase_checksum", head);
  m.batch_size = get_u64(h, "batch_size", head);
  m.crop_side = get_int(h, "crop_side", head);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    m.pairs.push_back(pair_from(lines[i].second, Where{origin, lines[i].first}));
  }
  return m;
}

void write_pair_manifest(const PairManifest& manifest, const std::filesystem::path& path) {
  write_text(serialize(manifest), path);
}

PairManifest read_pair_manifest(const std::filesystem::path& path) {
  return parse_pair_manifest(read_text(path), path.string());
}

}  // namespace tadac
