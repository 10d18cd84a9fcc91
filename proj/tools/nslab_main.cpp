#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "nslab/pipeline.hpp"

namespace {

int dispatch(const std::string& mode, const std::string& config_path,
             const std::string& out_dir, int workers, long long seed) {
  nslab::RunConfig cfg = nslab::parse_config(config_path);
  cfg.mode = mode;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (workers > 0) cfg.workers = workers;
  if (seed >= 0) cfg.seed = static_cast<unsigned long long>(seed);
  const nslab::RunManifest m = nslab::run_pipeline(cfg);
  for (const auto& [audit, status] : m.statuses)
    std::printf("%-16s %s\n", audit.c_str(), status.c_str());
  return m.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nslab: compressible-flow inequality laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int workers = 0;
  long long seed = -1;
  app.add_option("--config", config_path, "run configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides [run] out)");
  app.add_option("--workers", workers, "sweep worker count");
  app.add_option("--seed", seed, "seed for randomized suites");

  for (const char* verb :
       {"simulate", "audit", "ws", "probe", "sweep", "constants"}) {
    app.add_subcommand(verb, std::string("run the ") + verb + " pipeline");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    return dispatch(mode, config_path, out_dir, workers, seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
