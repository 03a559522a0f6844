#include "tadac/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "tadac/errors.hpp"

namespace tadac {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("config '" + std::string(key) + "': expected " + std::string(want) +
                    ", got '" + std::string(value) + "'");
}

template <class T>
T parse_number(std::string_view key, std::string_view value, std::string_view want) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, want);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const std::string_view item = trim(value.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

using Setter = std::function<void(PipelineConfig&, std::string_view, std::string_view,
                                  const std::filesystem::path&)>;

const std::vector<std::pair<std::string_view, Setter>>& setters() {
  static const std::vector<std::pair<std::string_view, Setter>> table = {
      {"input", [](auto& c, auto, auto v, auto& b) { c.input_dir = resolve(v, b); }},
      {"out", [](auto& c, auto, auto v, auto& b) { c.output_dir = resolve(v, b); }},
      {"manifest", [](auto& c, auto, auto v, auto& b) { c.manifest = resolve(v, b); }},
      {"features", [](auto& c, auto, auto v, auto& b) { c.features = resolve(v, b); }},
      {"phrase_dir", [](auto& c, auto, auto v, auto& b) { c.phrase_dir = resolve(v, b); }},
      {"seed",
       [](auto& c, auto k, auto v, auto&) {
         c.seed = parse_number<std::uint64_t>(k, v, "an unsigned 64-bit integer");
       }},
      {"workers",
       [](auto& c, auto k, auto v, auto&) {
         c.workers = parse_number<int>(k, v, "a worker count");
       }},
      {"kinds",
       [](auto& c, auto k, auto v, auto&) {
         if (v == "all") {
           c.kinds.assign(kAllDistortionTypes.begin(), kAllDistortionTypes.end());
           return;
         }
         c.kinds.clear();
         for (std::string_view name : split_list(v)) {
           try {
             c.kinds.push_back(distortion_from_name(name));
           } catch (const std::exception&) {
             bad_value(k, name, "a distortion name");
           }
         }
       }},
      {"levels",
       [](auto& c, auto k, auto v, auto&) {
         c.levels.clear();
         for (std::string_view item : split_list(v))
           c.levels.push_back(parse_number<int>(k, item, "levels 1-5"));
       }},
      {"default_label", [](auto& c, auto, auto v, auto&) { c.default_label = std::string(v); }},
      {"crop_side",
       [](auto& c, auto k, auto v, auto&) {
         c.crop_side = parse_number<int>(k, v, "a pixel count");
       }},
      {"batch_size",
       [](auto& c, auto k, auto v, auto&) {
         c.batch_size = parse_number<std::size_t>(k, v, "a batch size");
       }},
      {"negatives", [](auto& c, auto k, auto v, auto&) { c.negatives = parse_bool(k, v); }},
      {"image_text", [](auto& c, auto k, auto v, auto&) { c.image_text = parse_bool(k, v); }},
      {"image_image", [](auto& c, auto k, auto v, auto&) { c.image_image = parse_bool(k, v); }},
      {"temperature",
       [](auto& c, auto k, auto v, auto&) {
         c.temperature = parse_number<double>(k, v, "a number");
       }},
      {"alpha",
       [](auto& c, auto k, auto v, auto&) { c.alpha = parse_number<double>(k, v, "a number"); }},
      {"query", [](auto& c, auto, auto v, auto& b) { c.query = resolve(v, b); }},
      {"keys", [](auto& c, auto, auto v, auto& b) { c.keys = resolve(v, b); }},
      {"positive",
       [](auto& c, auto k, auto v, auto&) {
         c.positive = parse_number<std::size_t>(k, v, "a row index");
       }},
      {"image_embeddings",
       [](auto& c, auto, auto v, auto& b) { c.image_embeddings = resolve(v, b); }},
      {"text_embeddings",
       [](auto& c, auto, auto v, auto& b) { c.text_embeddings = resolve(v, b); }},
      {"crop_a_embeddings",
       [](auto& c, auto, auto v, auto& b) { c.crop_a_embeddings = resolve(v, b); }},
      {"crop_b_embeddings",
       [](auto& c, auto, auto v, auto& b) { c.crop_b_embeddings = resolve(v, b); }},
      {"lambda",
       [](auto& c, auto k, auto v, auto&) { c.lambda = parse_number<double>(k, v, "a number"); }},
      {"train_fraction",
       [](auto& c, auto k, auto v, auto&) {
         c.train_fraction = parse_number<double>(k, v, "a fraction");
       }},
      {"validation_fraction",
       [](auto& c, auto k, auto v, auto&) {
         c.validation_fraction = parse_number<double>(k, v, "a fraction");
       }},
      {"test_fraction",
       [](auto& c, auto k, auto v, auto&) {
         c.test_fraction = parse_number<double>(k, v, "a fraction");
       }},
      {"repeats",
       [](auto& c, auto k, auto v, auto&) {
         c.repeats = parse_number<int>(k, v, "a repeat count");
       }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  if (workers < 0) throw ConfigError("workers must be nonnegative");
  if (kinds.empty()) throw ConfigError("kinds must name at least one distortion");
  if (levels.empty()) throw ConfigError("levels must list at least one level");
  for (int l : levels)
    if (l < 1 || l > 5) throw ConfigError("level " + std::to_string(l) + " is outside 1-5");
  if (crop_side < 1) throw ConfigError("crop_side must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be positive");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda))) {
    throw ConfigError("lambda must be nonnegative");
  }
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (default_label && default_label->empty()) throw ConfigError("default_label is empty");
}

int PipelineConfig::effective_workers() const noexcept {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base) {
  key = trim(key);
  value = trim(value);
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(config, key, value, base);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file '" + file.string() + "'");
  const std::filesystem::path base = file.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    try {
      apply_setting(config, text.substr(0, eq), text.substr(eq + 1), base);
    } catch (const ConfigError& e) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto& entry : setters()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

}  // namespace tadac
