#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Result forge(const std::string& args) {
  const std::string cmd = std::string("'") + TADAC_FORGE_EXE + "' " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(forge("").code, 2);
  EXPECT_EQ(forge("frobnicate").code, 2);
  EXPECT_EQ(forge("distort --seed banana").code, 2);
  EXPECT_EQ(forge("distort --set nonsense=1").code, 2);
  EXPECT_EQ(forge("distort --set workers=-1").code, 2);
  EXPECT_EQ(forge("--help").code, 0);
}

TEST(Cli, MissingFilesExitWithThree) {
  tadac::testing::TempDir dir("cli");
  const Result r = forge("distort --config " + q(dir / "absent.cfg"));
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_EQ(forge("distort --input " + q(dir / "absent") + " --out " + q(dir / "o")).code, 3);
}

TEST(Cli, EmptyInputExitsWithFour) {
  tadac::testing::TempDir dir("cli");
  fs::create_directories(dir / "in");
  const Result r = forge("appearance --input " + q(dir / "in") + " --out " + q(dir / "o"));
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_NE(r.out.find("invalid input"), std::string::npos);
}

TEST(Cli, ConfigFileFlagsAndSetsCompose) {
  tadac::testing::TempDir dir("cli");
  tadac::testing::write_image_fixture(dir / "in", 2, 40, 32);
  std::ofstream(dir / "run.cfg") << "# relative paths resolve next to this file\n"
                                    "input = in\nout = wrong\nseed = 5\n"
                                    "kinds = blur, noise\nlevels = 1, 5\n";
  Result r = forge("distort --config " + q(dir / "run.cfg") + " --out " + q(dir / "out") +
                   " --workers 2");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir / "out" / "distort.jsonl"));
  EXPECT_FALSE(fs::exists(dir / "wrong"));
  EXPECT_TRUE(fs::exists(dir / "out" / "images" / "img101__noise_5.png"));

  r = forge("pairs --manifest " + q(dir / "out" / "distort.jsonl") + " --out " + q(dir / "out") +
            " --set crop_side=16 --set batch_size=4");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("pairs: "), std::string::npos);
}

TEST(Cli, LossCheckPrintsTheReport) {
  tadac::testing::TempDir dir("cli");
  std::ofstream(dir / "q.txt") << "1 0\n";
  std::ofstream(dir / "k.txt") << "0.5 1\n0.5 -1\n";
  const Result r = forge("loss-check --set query=" + q(dir / "q.txt") + " --set keys=" +
                         q(dir / "k.txt") + " --set temperature=1");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("alpha = 0.7 (joint = (1 - alpha) * L1 + alpha * L2)"), std::string::npos);
  EXPECT_NE(r.out.find("info_nce = 0.69314718055994"), std::string::npos) << r.out;
}

}  // namespace
