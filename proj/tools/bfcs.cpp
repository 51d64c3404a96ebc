#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bfcs/harness.hpp"
#include "bfcs/io.hpp"

namespace {

bfcs::ExperimentConfig load_config(const std::string& config_path,
                                   bool paper_defaults) {
  if (paper_defaults) return bfcs::paper_defaults();
  std::ifstream in(config_path);
  if (!in) throw bfcs::InvalidInput("cannot open config: " + config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return bfcs::config_from_json(buffer.str());
}

void apply_overrides(bfcs::ExperimentConfig& config, int trials,
                     std::uint64_t seed, int workers, bool seed_set) {
  if (trials > 0) config.trials = trials;
  if (workers > 0) config.workers = workers;
  if (seed_set) config.master_seed = seed;
}

void print_summaries(const std::vector<bfcs::AlgorithmSummary>& summaries) {
  std::printf("%-14s %12s %12s %10s %8s %10s\n", "algorithm", "best_eps",
              "mean_snr_db", "std_snr", "f1", "completed");
  for (const auto& s : summaries) {
    std::printf("%-14s %12s %12.3f %10.3f %8.3f %6d/%d\n",
                s.algorithm.c_str(), bfcs::format_double(s.best_epsilon).c_str(),
                s.mean_snr_db, s.std_snr_db, s.mean_support_f1, s.completed,
                s.total);
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream fields(spec);
  std::string f;
  while (std::getline(fields, f, ',')) {
    if (f == "inf") {
      grid.push_back(std::numeric_limits<double>::infinity());
    } else {
      grid.push_back(std::strtod(f.c_str(), nullptr));
    }
  }
  if (grid.empty()) throw bfcs::InvalidInput("empty epsilon grid");
  return grid;
}

bool rows_match(const bfcs::TrialResult& a, const bfcs::TrialResult& b) {
  auto same = [](double x, double y) {
    return bfcs::format_double(x) == bfcs::format_double(y);
  };
  return a.ok == b.ok && a.iterations == b.iterations && same(a.snr_db, b.snr_db) &&
         same(a.sign_consistency_error, b.sign_consistency_error) &&
         same(a.support_f1, b.support_f1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit compressive sensing recovery experiments"};
  app.require_subcommand(1);

  std::string config_path;
  bool paper_defaults = false;
  std::string out_dir = "bfcs-out";
  int trials = 0;
  int workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON");
    cmd->add_flag("--paper-defaults", paper_defaults,
                  "use the built-in reference configuration");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--trials", trials, "override trial count");
    cmd->add_option("--workers", workers, "override worker count");
    cmd->add_option("--seed", seed, "override master seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* run = app.add_subcommand("run", "run the experiment");
  add_run_flags(run);

  CLI::App* sweep =
      app.add_subcommand("sweep", "sweep epsilon and report the best point");
  add_run_flags(sweep);
  std::string grid_spec;
  sweep->add_option("--epsilon-grid", grid_spec,
                    "comma-separated epsilon values (inf allowed), applied to "
                    "every TV/MTV algorithm");

  CLI::App* replay = app.add_subcommand("replay", "re-run one recorded row");
  std::string csv_path;
  int row_index = -1;
  std::string replay_config;
  replay->add_option("--csv", csv_path, "results.csv path")->required();
  replay->add_option("--row", row_index, "data row index, 0-based")->required();
  replay->add_option("--config", replay_config,
                     "config JSON (default: config.echo.json next to the csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || sweep->parsed()) {
      if (config_path.empty() && !paper_defaults) {
        std::cerr << "error: need --config or --paper-defaults\n";
        return 1;
      }
      bfcs::ExperimentConfig config = load_config(config_path, paper_defaults);
      apply_overrides(config, trials, seed, workers, seed_set);
      if (sweep->parsed() && !grid_spec.empty()) {
        const std::vector<double> grid = parse_grid(grid_spec);
        for (auto& algo : config.algorithms) {
          if (algo.variant != bfcs::SolverVariant::Biht) {
            algo.epsilon_grid = grid;
          }
        }
      }
      const bfcs::ExperimentOutcome outcome =
          bfcs::run_experiment(config, out_dir);
      const auto summaries = bfcs::summarize(outcome.rows);
      if (sweep->parsed()) {
        for (const auto& s : summaries) {
          std::printf("%s best_epsilon=%s mean_snr_db=%.3f\n",
                      s.algorithm.c_str(),
                      bfcs::format_double(s.best_epsilon).c_str(),
                      s.mean_snr_db);
        }
      } else {
        print_summaries(summaries);
      }
      if (outcome.failures > 0) {
        std::fprintf(stderr, "%d run(s) failed\n", outcome.failures);
        return 2;
      }
      return 0;
    }

    // replay
    const std::filesystem::path csv(csv_path);
    if (replay_config.empty()) {
      replay_config = (csv.parent_path() / "config.echo.json").string();
    }
    const bfcs::ExperimentConfig config = load_config(replay_config, false);
    const auto rows = bfcs::load_results_csv(csv);
    if (row_index < 0 || row_index >= static_cast<int>(rows.size())) {
      std::cerr << "error: row out of range (have " << rows.size()
                << " rows)\n";
      return 1;
    }
    const bfcs::TrialResult& recorded = rows[row_index];
    const bfcs::TrialResult fresh = bfcs::replay_row(config, recorded);
    std::printf("recorded: snr_db=%s sce=%s f1=%s iters=%d\n",
                bfcs::format_double(recorded.snr_db).c_str(),
                bfcs::format_double(recorded.sign_consistency_error).c_str(),
                bfcs::format_double(recorded.support_f1).c_str(),
                recorded.iterations);
    std::printf("replayed: snr_db=%s sce=%s f1=%s iters=%d\n",
                bfcs::format_double(fresh.snr_db).c_str(),
                bfcs::format_double(fresh.sign_consistency_error).c_str(),
                bfcs::format_double(fresh.support_f1).c_str(),
                fresh.iterations);
    if (rows_match(recorded, fresh)) {
      std::printf("replay: MATCH\n");
      return 0;
    }
    std::printf("replay: MISMATCH\n");
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
