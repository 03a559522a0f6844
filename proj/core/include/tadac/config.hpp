#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tadac/distortion.hpp"
#include "tadac/imaging.hpp"

namespace tadac {

/// Settings shared by every command. Defaults follow the training setup:
/// 224-pixel crops, temperature 0.1, alpha 0.7, 70/10/20 splits repeated 10 times.
struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::filesystem::path manifest;  ///< input manifest for `pairs`
  std::filesystem::path features;  ///< feature file for `regress` and `eval`
  std::optional<std::filesystem::path> phrase_dir;
  std::uint64_t seed = 0;
  int workers = 1;  ///< 0 means one per hardware thread

  std::vector<DistortionType> kinds{kAllDistortionTypes.begin(), kAllDistortionTypes.end()};
  std::vector<int> levels{1, 2, 3, 4, 5};
  std::optional<std::string> default_label;

  int crop_side = CropWindow::kDefaultSide;
  std::size_t batch_size = 8;
  bool negatives = true;
  bool image_text = true;
  bool image_image = true;

  double temperature = 0.1;
  double alpha = 0.7;
  std::filesystem::path query;  ///< loss-check single-query mode
  std::filesystem::path keys;
  std::size_t positive = 0;
  std::filesystem::path image_embeddings;  ///< loss-check batch mode
  std::filesystem::path text_embeddings;
  std::filesystem::path crop_a_embeddings;
  std::filesystem::path crop_b_embeddings;

  std::optional<double> lambda;
  double train_fraction = 0.70;
  double validation_fraction = 0.10;
  double test_fraction = 0.20;
  int repeats = 10;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  int effective_workers() const noexcept;
};

/// Applies one `key = value` setting. Relative paths resolve against `base`.
/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base = {});

/// Reads a key-value file: one `key = value` per line, '#' starts a comment,
/// blank lines ignored. Relative paths resolve against the file's directory.
void apply_config_file(PipelineConfig& config, const std::filesystem::path& file);

/// Names accepted by apply_setting, in documentation order.
const std::vector<std::string_view>& config_keys();

}  // namespace tadac
