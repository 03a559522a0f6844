#include "tadac/annotation.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tadac/errors.hpp"
#include "tadac/rng.hpp"

#ifndef TADAC_DEFAULT_PHRASE_DIR
#define TADAC_DEFAULT_PHRASE_DIR "share/tadac"
#endif

namespace tadac {

namespace {

constexpr std::array<PartOfSpeech, 3> kAllPos{PartOfSpeech::Adjective, PartOfSpeech::Quantifier,
                                              PartOfSpeech::Adverb};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

PartOfSpeech pos_from_short(std::string_view s) {
  for (PartOfSpeech p : kAllPos)
    if (short_name(p) == s) return p;
  throw ValidationError("unknown part of speech '" + std::string(s) + "'");
}

std::size_t pick(CounterRng& rng, std::size_t n) { return static_cast<std::size_t>(rng.below(n)); }

// Exhaustive match of text[pos..] against the template pieces from `piece` on.
bool match_from(const ParsedTemplate& t, std::size_t piece, std::string_view text,
                const std::array<const std::vector<std::string>*, 3>& words,
                std::vector<std::string>& chosen) {
  const std::string& lit = t.literals[piece];
  if (text.substr(0, lit.size()) != lit) return false;
  text.remove_prefix(lit.size());
  if (piece == t.slots.size()) return text.empty();
  for (const std::string& w : *words[static_cast<std::size_t>(t.slots[piece])]) {
    if (text.substr(0, w.size()) != w) continue;
    chosen.push_back(w);
    if (match_from(t, piece + 1, text.substr(w.size()), words, chosen)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace

std::string_view marker(PartOfSpeech pos) noexcept {
  switch (pos) {
    case PartOfSpeech::Adjective:
      return "(adj.)";
    case PartOfSpeech::Quantifier:
      return "(quant.)";
    case PartOfSpeech::Adverb:
      return "(adv.)";
  }
  return "";
}

std::string_view short_name(PartOfSpeech pos) noexcept {
  switch (pos) {
    case PartOfSpeech::Adjective:
      return "adj";
    case PartOfSpeech::Quantifier:
      return "quant";
    case PartOfSpeech::Adverb:
      return "adv";
  }
  return "";
}

ParsedTemplate parse_template(std::string_view text) {
  ParsedTemplate out;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    if (text[i] == '(') {
      for (PartOfSpeech p : kAllPos) {
        const std::string_view m = marker(p);
        if (text.substr(i, m.size()) == m) {
          out.literals.push_back(std::move(current));
          current.clear();
          out.slots.push_back(p);
          i += m.size();
          matched = true;
          break;
        }
      }
      if (!matched) {
        for (PartOfSpeech p : kAllPos) {
          const std::string prefix = "(" + std::string(short_name(p));
          if (text.substr(i, prefix.size()) == prefix) {
            throw ValidationError("malformed placeholder in template '" + std::string(text) +
                                  "'");
          }
        }
      }
    }
    if (!matched) current.push_back(text[i++]);
  }
  out.literals.push_back(std::move(current));
  return out;
}

PhraseTable PhraseTable::parse(std::string_view text, std::string_view origin) {
  PhraseTable table;
  table.checksum_.resize(16);
  std::snprintf(table.checksum_.data(), 17, "%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));

  const std::string where = std::string(origin);
  std::vector<std::string>* target = nullptr;
  bool in_degrees = false;
  bool have_degrees = false;
  bool have_pristine = false;
  std::array<bool, kDistortionTypeCount> have_distortion{};
  std::array<std::array<bool, 3>, 4> have_appearance{};

  std::size_t line_no = 0;
  std::size_t start = 0;
  auto fail = [&](const std::string& what) -> ValidationError {
    return ValidationError(where + ":" + std::to_string(line_no) + ": " + what);
  };

  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim_right(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[' && line.back() == ']') {
      const auto words = split_ws(line.substr(1, line.size() - 2));
      in_degrees = false;
      target = nullptr;
      if (words.size() == 1 && words[0] == "degree_words") {
        if (have_degrees) throw fail("duplicate section [degree_words]");
        have_degrees = in_degrees = true;
      } else if (words.size() == 1 && words[0] == "pristine") {
        if (have_pristine) throw fail("duplicate section [pristine]");
        have_pristine = true;
        target = &table.pristine_;
      } else if (words.size() == 2 && words[0] == "distortion") {
        const DistortionType kind = distortion_from_name(words[1]);
        const std::size_t s = static_cast<std::size_t>(kind) - 1;
        if (have_distortion[s]) throw fail("duplicate section for " + std::string(words[1]));
        have_distortion[s] = true;
        target = &table.distortion_[s];
      } else if (words.size() == 3 && words[0] == "appearance") {
        const auto m = static_cast<std::size_t>(metric_from_name(words[1]));
        const auto l = static_cast<std::size_t>(level_from_name(words[2]));
        if (have_appearance[m][l]) throw fail("duplicate appearance section");
        have_appearance[m][l] = true;
        target = &table.appearance_[m][l];
      } else {
        throw fail("unknown section " + std::string(line));
      }
      continue;
    }

    if (in_degrees) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw fail("degree line needs '='");
      const auto head = split_ws(line.substr(0, eq));
      if (head.size() != 2 || head[0].size() != 1 || head[0][0] < '1' || head[0][0] > '5') {
        throw fail("degree line must start with '<level 1-5> <adj|quant|adv>'");
      }
      const int level = head[0][0] - '0';
      const PartOfSpeech pos = pos_from_short(head[1]);
      auto& list = table.degree_[level - 1][static_cast<std::size_t>(pos)];
      if (!list.empty()) throw fail("duplicate degree entry");
      std::string_view rest = line.substr(eq + 1);
      while (true) {
        const std::size_t bar = rest.find('|');
        const std::string_view word = trim(rest.substr(0, bar));
        if (word.empty()) throw fail("empty degree word");
        list.emplace_back(word);
        if (bar == std::string_view::npos) break;
        rest.remove_prefix(bar + 1);
      }
      continue;
    }

    if (target == nullptr) throw fail("phrase outside of any section");
    const ParsedTemplate parsed = parse_template(line);
    const bool is_template = target != &table.pristine_ &&
                             std::any_of(table.distortion_.begin(), table.distortion_.end(),
                                         [&](const auto& v) { return &v == target; });
    if (!is_template && !parsed.slots.empty()) {
      throw fail("placeholder not allowed outside distortion templates");
    }
    target->emplace_back(line);
  }

  // Cardinality checks.
  for (DistortionType kind : kAllDistortionTypes) {
    const auto& v = table.distortion_[static_cast<std::size_t>(kind) - 1];
    if (v.size() != kDistortionPhrasesPerType) {
      throw ValidationError(where + ": distortion '" + std::string(to_name(kind)) + "' has " +
                            std::to_string(v.size()) + " templates, expected 10");
    }
    auto& parsed = table.parsed_[static_cast<std::size_t>(kind) - 1];
    for (const std::string& t : v) parsed.push_back(parse_template(t));
  }
  if (table.pristine_.size() != kPristinePhraseCount) {
    throw ValidationError(where + ": pristine table has " +
                          std::to_string(table.pristine_.size()) + " phrases, expected 20");
  }
  for (MetricKind m : kAllMetrics)
    for (Level l : kAllLevels) {
      const auto& v = table.appearance_[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)];
      if (v.size() != kAppearancePhrasesPerBin) {
        throw ValidationError(where + ": appearance " + std::string(to_name(m)) + "/" +
                              std::string(to_name(l)) + " has " + std::to_string(v.size()) +
                              " phrases, expected 20");
      }
    }
  for (int level = 1; level <= 5; ++level)
    for (PartOfSpeech p : kAllPos)
      if (table.degree_[level - 1][static_cast<std::size_t>(p)].empty()) {
        throw ValidationError(where + ": no degree words for level " + std::to_string(level) +
                              " " + std::string(short_name(p)));
      }
  return table;
}

PhraseTable PhraseTable::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open phrase table '" + file.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse(text, file.string());
}

std::filesystem::path PhraseTable::default_directory() {
  if (const char* env = std::getenv("TADAC_PHRASE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  // The source tree copy serves builds; the installed copy serves installs
  // whose source tree is gone.
  const std::filesystem::path build_dir = TADAC_DEFAULT_PHRASE_DIR;
  const std::filesystem::path installed = TADAC_INSTALLED_PHRASE_DIR;
  if (!std::filesystem::exists(build_dir / kFileName) &&
      std::filesystem::exists(installed / kFileName)) {
    return installed;
  }
  return build_dir;
}

PhraseTable PhraseTable::load_default() { return load(default_directory() / kFileName); }

const std::vector<std::string>& PhraseTable::distortion_phrases(DistortionType kind) const {
  return distortion_[static_cast<std::size_t>(kind) - 1];
}

const ParsedTemplate& PhraseTable::distortion_template(DistortionType kind,
                                                       std::size_t index) const {
  return parsed_[static_cast<std::size_t>(kind) - 1].at(index);
}

const std::vector<std::string>& PhraseTable::appearance_phrases(MetricKind metric,
                                                                Level level) const {
  return appearance_[static_cast<std::size_t>(metric)][static_cast<std::size_t>(level)];
}

const std::vector<std::string>& PhraseTable::degree_words(int level, PartOfSpeech pos) const {
  check_level(level);
  return degree_[level - 1][static_cast<std::size_t>(pos)];
}

std::size_t PhraseTable::total_appearance_phrases() const noexcept {
  std::size_t n = 0;
  for (const auto& row : appearance_)
    for (const auto& v : row) n += v.size();
  return n;
}

std::string content_text(std::string_view label) {
  if (label.empty()) throw ValidationError("content label must be nonempty");
  const char first = static_cast<char>(std::tolower(static_cast<unsigned char>(label.front())));
  const bool vowel = first == 'a' || first == 'e' || first == 'i' || first == 'o' || first == 'u';
  return std::string(vowel ? "A photo of an " : "A photo of a ") + std::string(label);
}

std::string distortion_text(const PhraseTable& table, const DistortionSpec& spec,
                            std::uint64_t seed) {
  check_level(spec.level);
  CounterRng rng(seed);
  const ParsedTemplate& t =
      table.distortion_template(spec.kind, pick(rng, kDistortionPhrasesPerType));
  std::string out = t.literals[0];
  for (std::size_t i = 0; i < t.slots.size(); ++i) {
    const auto& words = table.degree_words(spec.level, t.slots[i]);
    out += words[pick(rng, words.size())];
    out += t.literals[i + 1];
  }
  return out;
}

std::string pristine_text(const PhraseTable& table, std::uint64_t seed) {
  CounterRng rng(seed);
  return table.pristine_phrases()[pick(rng, kPristinePhraseCount)];
}

std::vector<std::string> appearance_texts(const PhraseTable& table,
                                          const AppearanceProfile& profile, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::string> out;
  out.reserve(kAllMetrics.size());
  for (MetricKind m : kAllMetrics) {
    const auto& phrases = table.appearance_phrases(m, profile.get(m).level);
    out.push_back(phrases[pick(rng, phrases.size())]);
  }
  return out;
}

std::optional<DistortionTextParse> parse_distortion_text(const PhraseTable& table,
                                                         DistortionType kind, int level,
                                                         std::string_view text) {
  const std::array<const std::vector<std::string>*, 3> words{
      &table.degree_words(level, PartOfSpeech::Adjective),
      &table.degree_words(level, PartOfSpeech::Quantifier),
      &table.degree_words(level, PartOfSpeech::Adverb)};
  for (std::size_t i = 0; i < kDistortionPhrasesPerType; ++i) {
    std::vector<std::string> chosen;
    if (match_from(table.distortion_template(kind, i), 0, text, words, chosen)) {
      return DistortionTextParse{i, std::move(chosen)};
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> find_phrase(const std::vector<std::string>& phrases,
                                       std::string_view text) {
  for (std::size_t i = 0; i < phrases.size(); ++i)
    if (phrases[i] == text) return i;
  return std::nullopt;
}

std::string_view to_name(SourceKind source) noexcept {
  switch (source) {
    case SourceKind::Pristine:
      return "pristine";
    case SourceKind::Synthetic:
      return "synthetic";
    case SourceKind::Authentic:
      return "authentic";
  }
  return "";
}

SourceKind source_from_name(std::string_view name) {
  for (SourceKind s : {SourceKind::Pristine, SourceKind::Synthetic, SourceKind::Authentic})
    if (to_name(s) == name) return s;
  throw ValidationError("unknown source kind '" + std::string(name) + "'");
}

std::uint64_t text_seed(std::uint64_t global_seed, std::string_view image_id,
                        std::string_view category) noexcept {
  return derive_seed(global_seed, image_id, category);
}

AnnotationRecord annotate(const PhraseTable& table, const AnnotationInputs& inputs,
                          std::uint64_t global_seed) {
  if (inputs.image_id.empty()) throw ValidationError("annotation needs an image_id");
  const std::string& id = inputs.image_id;
  switch (inputs.source) {
    case SourceKind::Synthetic:
      if (!inputs.distortion) throw ValidationError(id + ": synthetic record needs a distortion");
      break;
    case SourceKind::Authentic:
      if (!inputs.appearance) {
        throw ValidationError(id + ": authentic record needs an appearance profile");
      }
      [[fallthrough]];
    case SourceKind::Pristine:
      if (inputs.distortion) {
        throw ValidationError(id + ": only synthetic records carry a distortion");
      }
      break;
  }
  if (inputs.content_label && inputs.content_label->empty()) {
    throw ValidationError(id + ": content label must be nonempty when present");
  }

  AnnotationRecord rec;
  rec.image_id = id;
  rec.source = inputs.source;
  rec.content_label = inputs.content_label;
  rec.distortion = inputs.distortion;
  rec.appearance = inputs.appearance;
  rec.seed = text_seed(global_seed, id, "record");
  if (rec.content_label) rec.texts.push_back(content_text(*rec.content_label));
  switch (rec.source) {
    case SourceKind::Pristine:
      rec.texts.push_back(pristine_text(table, text_seed(global_seed, id, "pristine")));
      break;
    case SourceKind::Synthetic:
      rec.texts.push_back(
          distortion_text(table, *rec.distortion, text_seed(global_seed, id, "distortion")));
      break;
    case SourceKind::Authentic:
      for (std::string& t :
           appearance_texts(table, *rec.appearance, text_seed(global_seed, id, "appearance"))) {
        rec.texts.push_back(std::move(t));
      }
      break;
  }
  return rec;
}

}  // namespace tadac
