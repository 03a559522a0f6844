#include "tadac/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "tadac/annotation.hpp"
#include "tadac/errors.hpp"
#include "tadac/rng.hpp"

namespace tadac {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(),
                                                suffix) == 0;
}

PhraseTable load_phrases(const PipelineConfig& config) {
  if (config.phrase_dir) return PhraseTable::load(*config.phrase_dir / PhraseTable::kFileName);
  return PhraseTable::load_default();
}

void require_path(const fs::path& p, std::string_view key) {
  if (p.empty()) throw ConfigError("missing required setting '" + std::string(key) + "'");
}

std::optional<fs::path> saliency_sidecar(const fs::path& image) {
  for (const char* ext : {".sal.png", ".sal.ppm"}) {
    fs::path p = image.parent_path() / (image.stem().string() + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

// Stems double as image ids, so two inputs must not share one.
void check_unique_stems(const std::vector<fs::path>& images) {
  std::set<std::string> seen;
  for (const fs::path& p : images) {
    if (!seen.insert(p.stem().string()).second) {
      throw ValidationError("two inputs share the stem '" + p.stem().string() + "'");
    }
  }
}

struct ImageJob {
  std::vector<ManifestRow> rows;
  std::vector<std::string> messages;
  bool failed = false;
};

// Shared driver for the per-image commands: deterministic logging and the
// all-failed rule.
template <class Work>
Manifest run_per_image(const PipelineConfig& config, std::ostream& log, std::string_view kind,
                       Work&& work) {
  config.validate();
  require_path(config.input_dir, "input");
  require_path(config.output_dir, "out");
  const PhraseTable table = load_phrases(config);
  const std::vector<fs::path> images = list_images(config.input_dir);
  if (images.empty()) {
    throw ValidationError("no .png or .ppm images in '" + config.input_dir.string() + "'");
  }
  check_unique_stems(images);
  const std::map<std::string, std::string> labels = read_labels(config.input_dir);
  fs::create_directories(config.output_dir / "images");

  std::vector<ImageJob> jobs(images.size());
  parallel_for(images.size(), config.effective_workers(), [&](std::size_t i) {
    ImageJob& job = jobs[i];
    const fs::path& path = images[i];
    std::optional<std::string> label = config.default_label;
    if (const auto it = labels.find(path.filename().string()); it != labels.end()) {
      label = it->second;
    }
    if (!label) {
      job.messages.push_back("warning: skipping '" + path.filename().string() +
                             "': no content label and no default_label");
      return;
    }
    try {
      work(table, path, *label, job.rows);
    } catch (const std::exception& e) {
      job.rows.clear();
      job.failed = true;
      job.messages.push_back("error: '" + path.filename().string() + "': " + e.what());
    }
  });

  Manifest manifest;
  manifest.kind = std::string(kind);
  manifest.global_seed = config.seed;
  manifest.phrase_checksum = table.checksum();
  std::size_t failures = 0;
  for (ImageJob& job : jobs) {
    for (const std::string& m : job.messages) log << m << '\n';
    if (job.failed) ++failures;
    for (ManifestRow& row : job.rows) manifest.rows.push_back(std::move(row));
  }
  if (manifest.rows.empty()) {
    throw ValidationError("no records produced from " + std::to_string(images.size()) +
                          " input image(s) (" + std::to_string(failures) + " failed)");
  }
  manifest.sort_rows();
  const std::string name =
      std::string(kind == "distort" ? kDistortManifestName : kAppearanceManifestName);
  write_manifest(manifest, config.output_dir / name);
  log << kind << ": " << manifest.rows.size() << " records from " << images.size()
      << " image(s), " << failures << " failed\n";
  return manifest;
}

std::optional<std::string> copy_saliency(const fs::path& image, const ImageBuffer& img,
                                         const fs::path& out_dir) {
  const auto sidecar = saliency_sidecar(image);
  if (!sidecar) return std::nullopt;
  const ImageBuffer sal = load_image(*sidecar);
  if (sal.width() != img.width() || sal.height() != img.height()) {
    throw ValidationError("saliency map '" + sidecar->filename().string() +
                          "' does not match the image size");
  }
  const std::string rel = "saliency/" + image.stem().string() + ".png";
  fs::create_directories(out_dir / "saliency");
  save_image(sal, out_dir / rel);
  return rel;
}

std::vector<double> parse_numbers(const std::string& line, const fs::path& path,
                                  std::size_t line_no) {
  std::string text = line;
  if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream ss(text);
  std::vector<double> row;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" +
                            tok + "'");
    }
    row.push_back(v);
  }
  return row;
}

// Shortest text that reads back as the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads =
      std::min(count, static_cast<std::size_t>(std::max(1, workers)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("input directory '" + dir.string() + "' not found");
  std::vector<fs::path> out;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = lower(e.path().filename().string());
    if (ends_with(name, ".sal.png") || ends_with(name, ".sal.ppm")) continue;
    if (ends_with(name, ".png") || ends_with(name, ".ppm")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

std::map<std::string, std::string> read_labels(const fs::path& dir) {
  std::map<std::string, std::string> labels;
  const fs::path file = dir / kLabelFileName;
  if (!fs::exists(file)) return labels;
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                            ": expected 'file<TAB>label'");
    }
    labels[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return labels;
}

Manifest cmd_distort(const PipelineConfig& config, std::ostream& log) {
  return run_per_image(
      config, log, "distort",
      [&](const PhraseTable& table, const fs::path& path, const std::string& label,
          std::vector<ManifestRow>& rows) {
        const ImageBuffer img = load_image(path);
        const std::string stem = path.stem().string();
        const std::optional<std::string> sal = copy_saliency(path, img, config.output_dir);

        auto emit = [&](const ImageBuffer& pixels, AnnotationInputs inputs) {
          ManifestRow row;
          row.image_path = "images/" + inputs.image_id + ".png";
          row.saliency_path = sal;
          row.width = pixels.width();
          row.height = pixels.height();
          save_image(pixels, config.output_dir / row.image_path);
          row.record = annotate(table, inputs, config.seed);
          rows.push_back(std::move(row));
        };

        AnnotationInputs pristine;
        pristine.image_id = stem + "__pristine";
        pristine.source = SourceKind::Pristine;
        pristine.content_label = label;
        emit(img, pristine);

        for (DistortionType kind : config.kinds)
          for (int level : config.levels) {
            AnnotationInputs in;
            in.image_id = stem + "__" + std::string(to_name(kind)) + "_" + std::to_string(level);
            in.source = SourceKind::Synthetic;
            in.content_label = label;
            in.distortion = DistortionSpec{kind, level, derive_seed(config.seed, in.image_id, "synth")};
            emit(apply_distortion(img, *in.distortion), in);
          }
      });
}

Manifest cmd_appearance(const PipelineConfig& config, std::ostream& log) {
  return run_per_image(
      config, log, "appearance",
      [&](const PhraseTable& table, const fs::path& path, const std::string& label,
          std::vector<ManifestRow>& rows) {
        const ImageBuffer img = load_image(path);
        ManifestRow row;
        AnnotationInputs in;
        in.image_id = path.stem().string();
        in.source = SourceKind::Authentic;
        in.content_label = label;
        in.appearance = profile(img);
        row.image_path = "images/" + in.image_id + ".png";
        row.saliency_path = copy_saliency(path, img, config.output_dir);
        row.width = img.width();
        row.height = img.height();
        save_image(img, config.output_dir / row.image_path);
        row.record = annotate(table, in, config.seed);
        rows.push_back(std::move(row));
      });
}

PairManifest cmd_pairs(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  require_path(config.manifest, "manifest");
  require_path(config.output_dir, "out");
  const Manifest manifest = read_manifest(config.manifest);
  if (manifest.rows.empty()) throw ValidationError("manifest has no records");
  const fs::path base = config.manifest.parent_path();

  std::vector<PairSource> sources(manifest.rows.size());
  parallel_for(sources.size(), config.effective_workers(), [&](std::size_t i) {
    const ManifestRow& row = manifest.rows[i];
    std::optional<SaliencyMap> sal;
    if (row.saliency_path) {
      sal = SaliencyMap::from_image(load_image(base / *row.saliency_path));
    } else {
      sal = saliency_proxy(load_image(base / row.image_path));
    }
    if (sal->width() != row.width || sal->height() != row.height) {
      throw ValidationError("'" + row.record.image_id + "': image or saliency size differs from " +
                            "the manifest's " + std::to_string(row.width) + "x" +
                            std::to_string(row.height));
    }
    sources[i] = PairSource{row.record, row.width, row.height,
                            saliency_crop(*sal, config.crop_side)};
  });

  PairConfig pc;
  pc.batch_size = config.batch_size;
  pc.negatives = config.negatives;
  pc.image_text = config.image_text;
  pc.image_image = config.image_image;
  pc.crop_side = config.crop_side;
  pc.seed = config.seed;

  PairManifest out;
  out.global_seed = config.seed;
  out.phrase_checksum = manifest.phrase_checksum;
  out.batch_size = config.batch_size;
  out.crop_side = config.crop_side;
  out.pairs = build_pair_manifest(sources, pc);

  const PairAudit audit = audit_pairs(out.pairs, sources, pc);
  if (!audit.ok()) {
    throw ValidationError("pair audit failed: " + audit.violations.front() + " (" +
                          std::to_string(audit.violations.size()) + " violation(s))");
  }
  write_pair_manifest(out, config.output_dir / kPairManifestName);
  log << "pairs: " << out.pairs.size() << " pairs in " << audit.batches << " batches ("
      << audit.positives << " positive, " << audit.negatives << " negative)\n";
  return out;
}

EmbeddingBatch read_embedding_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    std::vector<double> row = parse_numbers(line, path, ++line_no);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": row has " +
                            std::to_string(row.size()) + " values, expected " +
                            std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("embedding file '" + path.string() + "' is empty");
  return EmbeddingBatch::from_rows(rows);
}

LossReport cmd_losscheck(const PipelineConfig& config) {
  config.validate();
  LossReport r;
  r.temperature = config.temperature;
  r.alpha = config.alpha;
  bool any = false;

  if (!config.query.empty() || !config.keys.empty()) {
    require_path(config.query, "query");
    require_path(config.keys, "keys");
    const EmbeddingBatch query = read_embedding_file(config.query);
    if (query.rows() != 1) throw ValidationError("query file must hold exactly one row");
    const EmbeddingBatch keys = read_embedding_file(config.keys);
    r.info_nce = info_nce(query.row(0), keys, config.positive, config.temperature);
    r.gradient = check_info_nce_gradient(query.row(0), keys, config.positive, config.temperature);
    any = true;
  }

  using BatchLoss = double (*)(const EmbeddingBatch&, const EmbeddingBatch&,
                               std::span<const PairBatch>, double, LossDirection);
  auto pair_loss = [&](BatchLoss loss, const fs::path& a, const fs::path& b,
                       std::string_view a_key, std::string_view b_key) -> std::optional<double> {
    if (a.empty() && b.empty()) return std::nullopt;
    require_path(a, a_key);
    require_path(b, b_key);
    const EmbeddingBatch left = read_embedding_file(a);
    const EmbeddingBatch right = read_embedding_file(b);
    if (left.rows() != right.rows()) {
      throw ValidationError("'" + std::string(a_key) + "' and '" + std::string(b_key) +
                            "' differ in row count");
    }
    const auto batches = consecutive_batches(left.rows(), config.batch_size, 0);
    return loss(left, right, batches, config.temperature, LossDirection::LeftQuery);
  };
  r.l1 = pair_loss(batch_loss_l1, config.image_embeddings, config.text_embeddings, "image_embeddings",
                   "text_embeddings");
  r.l2 = pair_loss(batch_loss_l2, config.crop_a_embeddings, config.crop_b_embeddings, "crop_a_embeddings",
                   "crop_b_embeddings");
  if (r.l1 && r.l2) r.joint = joint_loss(*r.l1, *r.l2, config.alpha);
  any = any || r.l1 || r.l2;
  if (!any) {
    throw ConfigError("loss-check needs query/keys or a pair of embedding files");
  }
  return r;
}

void print_loss_report(const LossReport& r, std::ostream& out) {
  out << "alpha = " << num(r.alpha) << " (joint = (1 - alpha) * L1 + alpha * L2)\n";
  out << "temperature = " << num(r.temperature) << '\n';
  if (r.info_nce) out << "info_nce = " << num(*r.info_nce) << '\n';
  if (r.gradient) {
    out << "gradient relative_error = " << num(r.gradient->relative_error)
        << " max_abs_error = " << num(r.gradient->max_abs_error) << '\n';
  }
  if (r.l1) out << "L1 = " << num(*r.l1) << '\n';
  if (r.l2) out << "L2 = " << num(*r.l2) << '\n';
  if (r.joint) out << "joint = " << num(*r.joint) << '\n';
}

RegressReport cmd_regress(const PipelineConfig& config) {
  config.validate();
  require_path(config.features, "features");
  const FeatureMatrix data = read_feature_file(config.features);
  RegressReport r;
  double lambda = 0.0;
  if (config.lambda) {
    lambda = *config.lambda;
  } else {
    SplitProtocol protocol{config.train_fraction, config.validation_fraction,
                           config.test_fraction, 1, config.seed};
    protocol.validate();
    const SplitSizes sizes = split_sizes(data.samples(), protocol);
    if (sizes.train < 2 || sizes.validation < 1) {
      throw ValidationError("too few samples to select lambda; set lambda explicitly");
    }
    const auto perm = split_permutation(data.samples(), config.seed, 0);
    FeatureMatrix train, val;
    train.features.resize(static_cast<Eigen::Index>(sizes.train), data.features.cols());
    train.targets.resize(static_cast<Eigen::Index>(sizes.train));
    val.features.resize(static_cast<Eigen::Index>(sizes.validation), data.features.cols());
    val.targets.resize(static_cast<Eigen::Index>(sizes.validation));
    for (std::size_t i = 0; i < sizes.train + sizes.validation; ++i) {
      const auto src = static_cast<Eigen::Index>(perm[i]);
      FeatureMatrix& dst = i < sizes.train ? train : val;
      const auto row = static_cast<Eigen::Index>(i < sizes.train ? i : i - sizes.train);
      dst.features.row(row) = data.features.row(src);
      dst.targets(row) = data.targets(src);
    }
    lambda = select_lambda(train, val);
    r.lambda_selected = true;
  }
  r.model = ridge_fit(data.features, data.targets, lambda);
  r.train_mae = mean_absolute_error(r.model.predict(data.features), data.targets);
  return r;
}

void print_regress_report(const RegressReport& r, std::ostream& out) {
  out << "lambda = " << num(r.model.lambda) << (r.lambda_selected ? " (selected)" : "") << '\n';
  out << "intercept = " << num(r.model.intercept) << '\n';
  out << "weights =";
  for (Eigen::Index i = 0; i < r.model.weights.size(); ++i) out << ' ' << num(r.model.weights(i));
  out << '\n' << "train_mae = " << num(r.train_mae) << '\n';
}

EvaluationReport cmd_eval(const PipelineConfig& config) {
  config.validate();
  require_path(config.features, "features");
  const FeatureMatrix data = read_feature_file(config.features);
  return evaluate(data, SplitProtocol{config.train_fraction, config.validation_fraction,
                                      config.test_fraction, config.repeats, config.seed});
}

void print_eval_report(const EvaluationReport& report, std::ostream& out) {
  auto show = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "undefined";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(6) << *v;
    return ss.str();
  };
  for (const RepeatResult& r : report.repeats) {
    out << "repeat " << r.repeat << ": lambda=" << num(r.lambda) << " srocc=" << show(r.srocc)
        << " plcc=" << show(r.plcc) << '\n';
  }
  out << "mean srocc = " << show(report.mean_srocc) << '\n';
  out << "mean plcc = " << show(report.mean_plcc) << '\n';
  if (report.degenerate_repeats > 0) {
    out << report.degenerate_repeats << " repeat(s) had a constant prediction or target\n";
  }
}

}  // namespace tadac
