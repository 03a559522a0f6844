#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tadac/annotation.hpp"
#include "tadac/pairing.hpp"

namespace tadac {

// Manifests are JSON Lines: a header object, then one object per row.
inline constexpr std::string_view kManifestFormat = "tadac-manifest";
inline constexpr std::string_view kPairManifestFormat = "tadac-pairs";
inline constexpr int kManifestVersion = 1;

struct ManifestRow {
  AnnotationRecord record;
  std::string image_path;  ///< relative to the manifest's directory
  std::optional<std::string> saliency_path;
  int width = 0;
  int height = 0;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

struct Manifest {
  std::string kind;  ///< producing command, e.g. "distort" or "appearance"
  std::uint64_t global_seed = 0;
  std::string phrase_checksum;
  std::vector<ManifestRow> rows;

  /// Stable sort of rows by image_id.
  void sort_rows();
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Rows must already be sorted by image_id; throws ValidationError otherwise.
std::string serialize(const Manifest& manifest);
/// Strict reader: unknown fields, missing fields, other formats, and newer
/// versions are all ValidationErrors naming the origin and line.
Manifest parse_manifest(std::string_view text, std::string_view origin = "<memory>");

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

struct PairManifest {
  std::uint64_t global_seed = 0;
  std::string phrase_checksum;
  std::size_t batch_size = 0;
  int crop_side = 0;
  std::vector<PairRecord> pairs;

  friend bool operator==(const PairManifest&, const PairManifest&) = default;
};

std::string serialize(const PairManifest& manifest);
PairManifest parse_pair_manifest(std::string_view text, std::string_view origin = "<memory>");

void write_pair_manifest(const PairManifest& manifest, const std::filesystem::path& path);
PairManifest read_pair_manifest(const std::filesystem::path& path);

}  // namespace tadac
