#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "tadac/errors.hpp"
#include "tadac/pipeline.hpp"

namespace tadac {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig base_config(const fs::path& input, const fs::path& out) {
  PipelineConfig c;
  c.input_dir = input;
  c.output_dir = out;
  c.seed = 2024;
  c.crop_side = 16;
  return c;
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrowsFirstError) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 7 || i == 3) throw std::runtime_error("boom " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 3");
  }
}

TEST(ListImages, SortsAndSkipsSidecars) {
  testing::TempDir dir("list");
  for (const char* name : {"b.png", "a.PPM", "a.sal.png", "notes.txt", "labels.tsv"}) {
    std::ofstream(dir / name) << "x";
  }
  const auto images = list_images(dir.path());
  ASSERT_EQ(images.size(), 2U);
  EXPECT_EQ(images[0].filename(), "a.PPM");
  EXPECT_EQ(images[1].filename(), "b.png");
  EXPECT_THROW(list_images(dir / "nope"), IoError);
}

TEST(ReadLabels, ParsesTabSeparatedPairs) {
  testing::TempDir dir("labels");
  std::ofstream(dir / "labels.tsv") << "# file\tlabel\na.png\tred fox\r\nb.png\towl\n";
  const auto labels = read_labels(dir.path());
  EXPECT_EQ(labels.at("a.png"), "red fox");
  EXPECT_EQ(labels.at("b.png"), "owl");
  std::ofstream(dir / "labels.tsv") << "no tab here\n";
  EXPECT_THROW(read_labels(dir.path()), ValidationError);
}

TEST(CmdDistort, FullGridRowCount) {
  testing::TempDir dir("distort");
  testing::write_image_fixture(dir / "in", 2, 32, 24);
  std::ostringstream log;
  const Manifest m = cmd_distort(base_config(dir / "in", dir / "out"), log);
  EXPECT_EQ(m.rows.size(), 192U);
  EXPECT_TRUE(fs::exists(dir / "out" / "distort.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "out" / "images" / "img100__pristine.png"));
  EXPECT_TRUE(fs::exists(dir / "out" / "images" / "img101__uncomfortable_luminance_change_5.png"));
  EXPECT_EQ(read_manifest(dir / "out" / "distort.jsonl"), m);
  std::size_t pristine = 0;
  for (const ManifestRow& r : m.rows) {
    if (r.record.source == SourceKind::Pristine) ++pristine;
    EXPECT_EQ(r.record.texts.front().rfind("A photo of", 0), 0U);
  }
  EXPECT_EQ(pristine, 2U);
}

TEST(CmdDistort, ByteIdenticalAcrossRunsAndWorkerCounts) {
  testing::TempDir dir("distort");
  testing::write_image_fixture(dir / "in", 3, 24, 24);
  PipelineConfig c = base_config(dir / "in", dir / "a");
  c.kinds = {DistortionType::Noise, DistortionType::JitterDistortion, DistortionType::ColorBlocks};
  std::ostringstream log;
  cmd_distort(c, log);
  c.output_dir = dir / "b";
  cmd_distort(c, log);
  c.output_dir = dir / "c";
  c.workers = 3;
  cmd_distort(c, log);
  const std::string a = slurp(dir / "a" / "distort.jsonl");
  EXPECT_EQ(a, slurp(dir / "b" / "distort.jsonl"));
  EXPECT_EQ(a, slurp(dir / "c" / "distort.jsonl"));
  EXPECT_EQ(slurp(dir / "a" / "images" / "img101__noise_4.png"),
            slurp(dir / "c" / "images" / "img101__noise_4.png"));
  c.output_dir = dir / "d";
  c.seed = 1;
  cmd_distort(c, log);
  EXPECT_NE(a, slurp(dir / "d" / "distort.jsonl"));
}

TEST(CmdDistort, EmptyInputIsAnError) {
  testing::TempDir dir("distort");
  fs::create_directories(dir / "in");
  std::ostringstream log;
  EXPECT_THROW(cmd_distort(base_config(dir / "in", dir / "out"), log), ValidationError);
}

TEST(CmdDistort, UnlabelledImagesAreSkippedWithAWarning) {
  testing::TempDir dir("distort");
  testing::write_image_fixture(dir / "in", 2, 16, 16);
  save_image(testing::structured_fixture(16, 16), dir / "in" / "stray.png");
  PipelineConfig c = base_config(dir / "in", dir / "out");
  c.kinds = {DistortionType::Blur};
  c.levels = {1};
  std::ostringstream log;
  EXPECT_EQ(cmd_distort(c, log).rows.size(), 4U);
  EXPECT_NE(log.str().find("skipping 'stray.png'"), std::string::npos) << log.str();
  c.default_label = "thing";
  EXPECT_EQ(cmd_distort(c, log).rows.size(), 6U);
}

TEST(CmdDistort, FailuresAreLoggedAndAllFailuresThrow) {
  testing::TempDir dir("distort");
  testing::write_image_fixture(dir / "in", 1, 16, 16);
  std::ofstream(dir / "in" / "broken.png") << "garbage";
  PipelineConfig c = base_config(dir / "in", dir / "out");
  c.default_label = "thing";
  c.kinds = {DistortionType::PixelateDistortion};
  c.levels = {2};
  std::ostringstream log;
  EXPECT_EQ(cmd_distort(c, log).rows.size(), 2U);
  EXPECT_NE(log.str().find("error: 'broken.png'"), std::string::npos);
  fs::remove(dir / "in" / "img100.png");
  EXPECT_THROW(cmd_distort(c, log), ValidationError);
}

TEST(CmdDistort, SaliencySidecarIsCarriedThrough) {
  testing::TempDir dir("distort");
  testing::write_image_fixture(dir / "in", 2, 32, 24);
  ImageBuffer sal(32, 24);
  sal.set(20, 10, {1, 1, 1});
  save_image(sal, dir / "in" / "img100.sal.png");
  PipelineConfig c = base_config(dir / "in", dir / "out");
  c.kinds = {DistortionType::Blur};
  c.levels = {2};
  std::ostringstream log;
  const Manifest m = cmd_distort(c, log);
  ASSERT_EQ(m.rows.size(), 4U);
  EXPECT_EQ(m.rows[0].saliency_path, "saliency/img100.png");
  EXPECT_FALSE(m.rows[2].saliency_path.has_value());

  c.manifest = dir / "out" / "distort.jsonl";
  c.output_dir = dir / "pairs";
  c.negatives = false;
  const PairManifest pm = cmd_pairs(c, log);
  // The single bright pixel at (20, 10) pins the first window containing it.
  EXPECT_EQ(pm.pairs[0].left.crop, (CropWindow{5, 0, 16}));
}

TEST(CmdAppearance, GrayAndBlackInputs) {
  testing::TempDir dir("appearance");
  fs::create_directories(dir / "in");
  save_image(testing::solid(8, 8, {0, 0, 0}), dir / "in" / "black.png");
  ImageBuffer gray(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) gray.set(x, y, {x / 7.0, x / 7.0, x / 7.0});
  save_image(gray, dir / "in" / "gray.ppm");
  PipelineConfig c = base_config(dir / "in", dir / "out");
  c.default_label = "scene";
  std::ostringstream log;
  const Manifest m = cmd_appearance(c, log);
  ASSERT_EQ(m.rows.size(), 2U);
  const AppearanceProfile& black = *m.rows[0].record.appearance;
  for (MetricKind k : kAllMetrics) EXPECT_EQ(black.get(k).level, Level::Low);
  const AppearanceProfile& g = *m.rows[1].record.appearance;
  EXPECT_EQ(g.colorfulness.norm, 0.0);
  EXPECT_EQ(g.colorfulness.level, Level::Low);
  EXPECT_EQ(m.rows[1].record.texts.size(), 5U);
  EXPECT_EQ(m.rows[1].record.source, SourceKind::Authentic);
}

TEST(CmdAppearance, ThreeImageGoldenManifest) {
  testing::TempDir dir("appearance");
  testing::write_image_fixture(dir / "in", 3, 20, 16);
  std::ostringstream log;
  const Manifest m = cmd_appearance(base_config(dir / "in", dir / "out"), log);
  ASSERT_EQ(m.rows.size(), 3U);
  for (const ManifestRow& r : m.rows) {
    const AppearanceProfile p = profile(load_image(dir / "out" / r.image_path));
    EXPECT_EQ(*r.record.appearance, p);
  }
  // Frozen after the per-row comparison above agreed with profile().
  EXPECT_EQ(fnv1a64(slurp(dir / "out" / "appearance.jsonl")), 0x6b88617fdfebdd90ULL);
}

TEST(CmdPairs, BatchesPassTheAuditAndRerunsMatch) {
  testing::TempDir dir("pairs");
  testing::write_image_fixture(dir / "in", 8, 40, 32);
  PipelineConfig c = base_config(dir / "in", dir / "out");
  std::ostringstream log;
  cmd_appearance(c, log);
  c.manifest = dir / "out" / "appearance.jsonl";
  c.batch_size = 4;
  const PairManifest pm = cmd_pairs(c, log);
  EXPECT_EQ(pm.pairs.size(), 8U * 6U * 4U);
  const std::string first = slurp(dir / "out" / "pairs.jsonl");
  c.workers = 4;
  cmd_pairs(c, log);
  EXPECT_EQ(slurp(dir / "out" / "pairs.jsonl"), first);
  EXPECT_EQ(read_pair_manifest(dir / "out" / "pairs.jsonl"), pm);
}

TEST(CmdPairs, OneRecordWithNegativesIsAnError) {
  testing::TempDir dir("pairs");
  testing::write_image_fixture(dir / "in", 1, 40, 32);
  PipelineConfig c = base_config(dir / "in", dir / "out");
  std::ostringstream log;
  cmd_appearance(c, log);
  c.manifest = dir / "out" / "appearance.jsonl";
  EXPECT_THROW(cmd_pairs(c, log), ValidationError);
  c.negatives = false;
  EXPECT_EQ(cmd_pairs(c, log).pairs.size(), 6U);
}

TEST(CmdLossCheck, ReproducesClosedFormsFromFiles) {
  testing::TempDir dir("loss");
  std::ofstream(dir / "q.txt") << "1 0\n";
  std::ofstream(dir / "equal.txt") << "0.5 1\n0.5 -1\n";
  std::ofstream(dir / "ortho.txt") << "1 0\n0 1\n";
  std::ofstream(dir / "single.txt") << "0.3 0.4\n";
  PipelineConfig c;
  c.query = dir / "q.txt";
  for (const auto& [file, want] : {std::pair{"single.txt", 0.0},
                                   std::pair{"equal.txt", std::log(2.0)},
                                   std::pair{"ortho.txt", std::log1p(std::exp(-10.0))}}) {
    c.keys = dir / file;
    const LossReport r = cmd_losscheck(c);
    EXPECT_NEAR(*r.info_nce, want, 1e-12) << file;
    EXPECT_LT(r.gradient->max_abs_error, 1e-6);
  }
  std::ostringstream out;
  print_loss_report(cmd_losscheck(c), out);
  EXPECT_NE(out.str().find("alpha = 0.7"), std::string::npos) << out.str();

  std::ofstream(dir / "wide.txt") << "1 0 0\n";
  c.keys = dir / "wide.txt";
  EXPECT_THROW(cmd_losscheck(c), ValidationError);
  EXPECT_THROW(cmd_losscheck(PipelineConfig{}), ConfigError);
}

TEST(CmdLossCheck, BatchModeJointLoss) {
  testing::TempDir dir("loss");
  std::ofstream(dir / "a.txt") << "1 0\n0 1\n1 0\n0 1\n";
  std::ofstream(dir / "b.txt") << "1 0\n0 1\n0 1\n1 0\n";
  PipelineConfig c;
  c.batch_size = 2;
  c.image_embeddings = dir / "a.txt";
  c.text_embeddings = dir / "b.txt";
  c.crop_a_embeddings = dir / "a.txt";
  c.crop_b_embeddings = dir / "a.txt";
  const LossReport r = cmd_losscheck(c);
  // Batch 0 aligned (positive first), batch 1 swapped.
  const double aligned = std::log1p(std::exp(-10.0));
  EXPECT_NEAR(*r.l1, aligned + 10.0 + aligned, 1e-12);
  EXPECT_NEAR(*r.l2, 2 * aligned, 1e-12);
  EXPECT_NEAR(*r.joint, 0.3 * *r.l1 + 0.7 * *r.l2, 1e-12);
  std::ofstream(dir / "short.txt") << "1 0\n";
  c.text_embeddings = dir / "short.txt";
  EXPECT_THROW(cmd_losscheck(c), ValidationError);
}

TEST(CmdRegressAndEval, RunFromFeatureFiles) {
  testing::TempDir dir("regress");
  {
    std::ofstream f(dir / "feat.txt");
    CounterRng rng(1);
    for (int i = 0; i < 60; ++i) {
      const double a = rng.normal(), b = rng.normal();
      f << a << ' ' << b << ' ' << (2 * a - b + 1) << '\n';
    }
  }
  PipelineConfig c;
  c.features = dir / "feat.txt";
  const RegressReport r = cmd_regress(c);
  EXPECT_TRUE(r.lambda_selected);
  EXPECT_EQ(r.model.lambda, 1e-3);
  EXPECT_NEAR(r.model.weights(0), 2.0, 1e-3);
  c.lambda = 0.0;
  const RegressReport exact = cmd_regress(c);
  EXPECT_FALSE(exact.lambda_selected);
  EXPECT_NEAR(exact.model.intercept, 1.0, 1e-5);
  const EvaluationReport e = cmd_eval(c);
  EXPECT_EQ(*e.mean_srocc, 1.0);
  std::ostringstream out;
  print_eval_report(e, out);
  EXPECT_NE(out.str().find("mean srocc = 1.000000"), std::string::npos);
}

}  // namespace
}  // namespace tadac
