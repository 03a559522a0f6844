#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tadac/appearance.hpp"
#include "tadac/distortion.hpp"

namespace tadac {

enum class PartOfSpeech : std::uint8_t { Adjective, Quantifier, Adverb };

/// "(adj.)", "(quant.)", "(adv.)".
std::string_view marker(PartOfSpeech pos) noexcept;
/// "adj", "quant", "adv" as written in the table file.
std::string_view short_name(PartOfSpeech pos) noexcept;

inline constexpr std::size_t kDistortionPhrasesPerType = 10;
inline constexpr std::size_t kPristinePhraseCount = 20;
inline constexpr std::size_t kAppearancePhrasesPerBin = 20;

/// A template split into literal runs and placeholder slots:
/// literals.size() == slots.size() + 1, text = l0 s0 l1 s1 ... ln.
struct ParsedTemplate {
  std::vector<std::string> literals;
  std::vector<PartOfSpeech> slots;
};

/// Throws ValidationError if the text holds a malformed placeholder
/// (anything starting "(adj", "(quant" or "(adv" that is not an exact marker).
ParsedTemplate parse_template(std::string_view text);

/// Immutable phrase tables. Loading validates every cardinality: 10
/// templates for each of the 19 distortion types, 20 pristine phrases,
/// 20 phrases per (metric, level), and a nonempty word list for every
/// (degree, part of speech).
class PhraseTable {
 public:
  static PhraseTable parse(std::string_view text, std::string_view origin = "<memory>");
  static PhraseTable load(const std::filesystem::path& file);

  /// $TADAC_PHRASE_DIR when set, else the directory bundled with the build.
  static std::filesystem::path default_directory();
  static constexpr std::string_view kFileName = "phrases.txt";
  static PhraseTable load_default();

  const std::vector<std::string>& distortion_phrases(DistortionType kind) const;
  const ParsedTemplate& distortion_template(DistortionType kind, std::size_t index) const;
  const std::vector<std::string>& pristine_phrases() const noexcept { return pristine_; }
  const std::vector<std::string>& appearance_phrases(MetricKind metric, Level level) const;
  const std::vector<std::string>& degree_words(int level, PartOfSpeech pos) const;

  /// FNV-1a 64 of the source bytes, as 16 lowercase hex digits.
  const std::string& checksum() const noexcept { return checksum_; }

  std::size_t total_appearance_phrases() const noexcept;

 private:
  PhraseTable() = default;

  std::array<std::vector<std::string>, kDistortionTypeCount> distortion_;
  std::array<std::vector<ParsedTemplate>, kDistortionTypeCount> parsed_;
  std::vector<std::string> pristine_;
  std::array<std::array<std::vector<std::string>, 3>, 4> appearance_;
  std::array<std::array<std::vector<std::string>, 3>, 5> degree_;
  std::string checksum_;
};

/// "A photo of a dog" / "A photo of an elephant". Throws on empty label.
std::string content_text(std::string_view label);

std::string distortion_text(const PhraseTable& table, const DistortionSpec& spec,
                            std::uint64_t seed);
std::string pristine_text(const PhraseTable& table, std::uint64_t seed);
/// One phrase per metric, in brightness, contrast, sharpness, colorfulness order.
std::vector<std::string> appearance_texts(const PhraseTable& table,
                                          const AppearanceProfile& profile, std::uint64_t seed);

/// Decomposition of a generated distortion text.
struct DistortionTextParse {
  std::size_t template_index = 0;
  std::vector<std::string> words;
};

/// Finds a template of `kind` and level-`level` degree words reproducing
/// `text` exactly; nullopt if none does.
std::optional<DistortionTextParse> parse_distortion_text(const PhraseTable& table,
                                                         DistortionType kind, int level,
                                                         std::string_view text);

/// Index of `text` within the given phrase list, if present.
std::optional<std::size_t> find_phrase(const std::vector<std::string>& phrases,
                                       std::string_view text);

enum class SourceKind : std::uint8_t { Pristine, Synthetic, Authentic };
std::string_view to_name(SourceKind source) noexcept;
SourceKind source_from_name(std::string_view name);

struct AnnotationInputs {
  std::string image_id;
  SourceKind source = SourceKind::Pristine;
  std::optional<std::string> content_label;
  std::optional<DistortionSpec> distortion;
  std::optional<AppearanceProfile> appearance;
};

struct AnnotationRecord {
  std::string image_id;
  SourceKind source = SourceKind::Pristine;
  std::optional<std::string> content_label;
  std::optional<DistortionSpec> distortion;
  std::optional<AppearanceProfile> appearance;
  std::vector<std::string> texts;
  std::uint64_t seed = 0;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// Per-record seed for one text category. Depends only on
/// (global_seed, image_id, category).
std::uint64_t text_seed(std::uint64_t global_seed, std::string_view image_id,
                        std::string_view category) noexcept;

/// texts = [content text if labelled] followed by the pristine text, the
/// distortion text, or the four appearance texts according to `source`.
/// Throws ValidationError when the inputs do not match the source kind.
AnnotationRecord annotate(const PhraseTable& table, const AnnotationInputs& inputs,
                          std::uint64_t global_seed);

}  // namespace tadac
