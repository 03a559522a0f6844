// tadac-forge: builds and checks text-annotated quality datasets.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration error,
// 3 I/O error, 4 validation error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tadac/config.hpp"
#include "tadac/errors.hpp"
#include "tadac/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kValidation = 4 };

struct CommonFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string input;
  std::string manifest;
  std::string features;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "key = value settings file");
  cmd->add_option("--seed", f.seed, "global seed (unsigned 64-bit)");
  cmd->add_option("--workers", f.workers, "worker threads, 0 for one per core");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--set", f.settings, "extra key=value setting, repeatable");
}

tadac::PipelineConfig resolve_config(const CommonFlags& f) {
  tadac::PipelineConfig config;
  if (!f.config_file.empty()) tadac::apply_config_file(config, f.config_file);
  for (const std::string& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw tadac::ConfigError("--set expects key=value, got '" + kv + "'");
    tadac::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) config.seed = *f.seed;
  if (f.workers) config.workers = *f.workers;
  if (!f.out.empty()) config.output_dir = f.out;
  if (!f.input.empty()) config.input_dir = f.input;
  if (!f.manifest.empty()) config.manifest = f.manifest;
  if (!f.features.empty()) config.features = f.features;
  config.validate();
  return config;
}

int run(CLI::App& app, const std::string& command, const CommonFlags& flags) {
  const tadac::PipelineConfig config = resolve_config(flags);
  if (command == "distort") {
    tadac::cmd_distort(config, std::cerr);
  } else if (command == "appearance") {
    tadac::cmd_appearance(config, std::cerr);
  } else if (command == "pairs") {
    tadac::cmd_pairs(config, std::cerr);
  } else if (command == "loss-check") {
    tadac::print_loss_report(tadac::cmd_losscheck(config), std::cout);
  } else if (command == "regress") {
    tadac::print_regress_report(tadac::cmd_regress(config), std::cout);
  } else if (command == "eval") {
    tadac::print_eval_report(tadac::cmd_eval(config), std::cout);
  } else {
    std::cerr << app.help();
    return kConfig;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build and check text-annotated image quality datasets"};
  app.require_subcommand(1);
  CommonFlags flags;

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"distort", "apply the distortion grid to pristine images and annotate them"},
      {"appearance", "profile authentic images and annotate their appearance"},
      {"pairs", "build positive/negative pair batches from a manifest"},
      {"loss-check", "evaluate the contrastive losses on embedding files"},
      {"regress", "fit a ridge model from features to MOS"},
      {"eval", "repeated split evaluation reporting SROCC and PLCC"},
  };
  for (const Spec& s : specs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, flags);
    const std::string name = s.name;
    if (name == "distort" || name == "appearance") {
      cmd->add_option("--input", flags.input, "directory of pristine .png/.ppm images");
    } else if (name == "pairs") {
      cmd->add_option("--manifest", flags.manifest, "manifest written by distort or appearance");
    } else if (name == "regress" || name == "eval") {
      cmd->add_option("--features", flags.features, "feature file, MOS in the last column");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    return run(app, app.get_subcommands().front()->get_name(), flags);
  } catch (const tadac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const tadac::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const tadac::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
