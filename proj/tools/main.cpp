#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "steincast/commands.hpp"
#include "steincast/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::int64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file");
  cmd->add_option("--seed", flags.seed, "override the run seed");
  cmd->add_option("--workers", flags.workers, "worker threads (0 = hardware)");
  cmd->add_option("--out", flags.out_dir, "output directory");
}

steincast::RunConfig resolve(const CommonFlags& flags) {
  steincast::RunConfig config;
  if (!flags.config_path.empty()) {
    config = steincast::load_run_config(flags.config_path);
  }
  if (flags.seed) {
    config.seed = static_cast<std::uint64_t>(*flags.seed);
    config.svgd.seed = config.seed;
  }
  if (flags.workers) {
    config.workers = *flags.workers;
    config.svgd.workers = config.workers;
  }
  if (flags.out_dir) config.eval.out_dir = *flags.out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian cyclical demand forecasting with SVGD particle ensembles"};
  app.require_subcommand(1);

  CommonFlags sim_flags, train_flags, predict_flags, eval_flags, report_flags;
  std::string model_override;
  std::string checkpoint_base = "out/checkpoint";
  std::string split = "test";
  std::string predictions_csv;
  std::string metrics_json;
  std::string tag;

  auto* simulate = app.add_subcommand("simulate", "generate the synthetic demand series");
  add_common(simulate, sim_flags);

  auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(train, train_flags);
  train->add_option("--model", model_override, "bnn | detnn | mlp");

  auto* predict = app.add_subcommand("predict", "write predictions for one split");
  add_common(predict, predict_flags);
  predict->add_option("--checkpoint", checkpoint_base, "checkpoint base path (no extension)");
  predict->add_option("--split", split, "train | val | test");

  auto* evaluate = app.add_subcommand("evaluate", "compute metrics from a predictions CSV");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--predictions", predictions_csv, "predictions CSV path")->required();
  evaluate->add_option("--tag", tag, "model tag for the report");

  auto* report = app.add_subcommand("report", "print a metrics JSON as a table");
  add_common(report, report_flags);
  report->add_option("--metrics", metrics_json, "metrics JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      const auto path = steincast::cmd_simulate(resolve(sim_flags));
      std::cout << "wrote " << path << '\n';
    } else if (train->parsed()) {
      auto config = resolve(train_flags);
      if (!model_override.empty()) config.model = model_override;
      const auto artifacts = steincast::cmd_train(config);
      std::cout << "wrote " << artifacts.checkpoint_base << ".bin and " << artifacts.log_path
                << '\n';
    } else if (predict->parsed()) {
      const auto path = steincast::cmd_predict(resolve(predict_flags), checkpoint_base, split);
      std::cout << "wrote " << path << '\n';
    } else if (evaluate->parsed()) {
      const auto artifacts = steincast::cmd_evaluate(
          resolve(eval_flags), predictions_csv,
          tag.empty() ? std::nullopt : std::optional<std::string>(tag));
      std::cout << "wrote " << artifacts.metrics_json << " and " << artifacts.per_horizon_csv
                << '\n';
    } else if (report->parsed()) {
      steincast::cmd_report(metrics_json, std::cout);
    }
  } catch (const steincast::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const steincast::ContractError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const steincast::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const steincast::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
