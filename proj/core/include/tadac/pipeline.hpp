#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tadac/config.hpp"
#include "tadac/contrastive.hpp"
#include "tadac/manifest.hpp"
#include "tadac/regression.hpp"

namespace tadac {

/// Output file names inside the output directory.
inline constexpr std::string_view kDistortManifestName = "distort.jsonl";
inline constexpr std::string_view kAppearanceManifestName = "appearance.jsonl";
inline constexpr std::string_view kPairManifestName = "pairs.jsonl";
/// Optional `file<TAB>label` sidecar in the input directory.
inline constexpr std::string_view kLabelFileName = "labels.tsv";

/// Runs fn(0) .. fn(count - 1) on up to `workers` threads. Each index is
/// claimed from a shared counter; results land in their own slot, so the
/// output order never depends on scheduling. The first exception by index
/// is rethrown after all threads finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Images in a directory (.png/.ppm, saliency sidecars `*.sal.png` and
/// `*.sal.ppm` excluded), sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Reads the label sidecar, keyed by file name; a missing file yields an
/// empty map.
std::map<std::string, std::string> read_labels(const std::filesystem::path& dir);

/// Synthetic grid: every configured (kind, level) plus one pristine record per
/// input. Writes images under out/images and the manifest to out/distort.jsonl.
/// Per-image failures are logged and skipped; throws if every image fails.
Manifest cmd_distort(const PipelineConfig& config, std::ostream& log);

/// Authentic records with appearance profiles, written to out/appearance.jsonl.
Manifest cmd_appearance(const PipelineConfig& config, std::ostream& log);

/// Pair manifest for config.manifest, written to out/pairs.jsonl. Saliency
/// comes from each row's saliency_path when present, else from the proxy.
PairManifest cmd_pairs(const PipelineConfig& config, std::ostream& log);

struct LossReport {
  std::optional<double> info_nce;
  std::optional<GradientCheckResult> gradient;
  std::optional<double> l1;
  std::optional<double> l2;
  std::optional<double> joint;
  double temperature = 0.0;
  double alpha = 0.0;
};

/// Whitespace/comma separated numeric rows; '#' starts a comment.
EmbeddingBatch read_embedding_file(const std::filesystem::path& path);

/// Single-query mode (query + keys + positive) and/or batch mode (image/text
/// and crop embedding files split into consecutive batches of batch_size,
/// positive first). At least one mode must be configured.
LossReport cmd_losscheck(const PipelineConfig& config);
void print_loss_report(const LossReport& report, std::ostream& out);

struct RegressReport {
  RidgeModel model;
  bool lambda_selected = false;
  double train_mae = 0.0;
};

/// Ridge fit on the whole feature file. Without a configured lambda, the grid
/// value is chosen on the first repeat's train/validation split.
RegressReport cmd_regress(const PipelineConfig& config);
void print_regress_report(const RegressReport& report, std::ostream& out);

EvaluationReport cmd_eval(const PipelineConfig& config);
void print_eval_report(const EvaluationReport& report, std::ostream& out);

}  // namespace tadac
