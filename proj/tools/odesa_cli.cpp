#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "odesa/error.hpp"
#include "odesa/harness/commands.hpp"

namespace {

using namespace odesa;
using namespace odesa::harness;

template <typename T>
std::optional<T> opt_if(const CLI::Option* o, const T& v) {
  return o->count() > 0 ? std::optional<T>(v) : std::nullopt;
}

void print_report(const std::string& what, const json& r) {
  std::cout << what << ": accuracy " << r.at("accuracy").get<double>() << " (" << r.at("hits").get<std::size_t>()
            << "/" << r.at("labels").get<std::size_t>() << " hits, " << r.at("misses").get<std::size_t>()
            << " silent, " << r.at("wrong_class").get<std::size_t>() << " wrong class, "
            << r.at("false_positives").get<std::size_t>() << " false positives)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven supervised spiking network: data generation, training and evaluation"};
  app.require_subcommand(1);

  GenerateOptions gen;
  std::uint64_t gen_seed = 0;
  std::string gen_config, gen_data;
  auto* generate = app.add_subcommand("generate", "Write spike and label CSVs for a built-in task");
  generate->add_option("task", gen.task, "random-pattern | morse-names | morse-positional | morse-sonnet | iris-encode")
      ->required();
  auto* gen_config_opt = generate->add_option("--config", gen_config, "Experiment config supplying task parameters");
  auto* gen_seed_opt = generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out", gen.out, "Output directory")->capture_default_str();
  auto* gen_data_opt = generate->add_option("--data", gen_data, "Source IRIS CSV for iris-encode");

  TrainOptions train;
  std::uint64_t train_seed = 0;
  std::size_t train_epochs = 0;
  std::string train_out, train_data;
  auto* train_cmd = app.add_subcommand("train", "Train one network and write checkpoint, event log and metrics");
  train_cmd->add_option("--config", train.config, "Experiment config (JSON)")->required();
  auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "Run seed (default: first seed in config)");
  auto* train_out_opt = train_cmd->add_option("--out", train_out, "Output directory (default: config output_dir)");
  auto* train_epochs_opt = train_cmd->add_option("--epochs", train_epochs, "Override the epoch count");
  auto* train_data_opt = train_cmd->add_option("--data", train_data, "Use a generated data directory");
  train_cmd->add_flag("--resume", train.resume, "Continue from checkpoint.json in the output directory");

  EvalOptions eval;
  std::string eval_data, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Frozen evaluation of a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint.json written by train")->required();
  auto* eval_data_opt = eval_cmd->add_option("--data", eval_data, "Evaluate on a generated data directory");
  eval_cmd->add_option("--split", eval.split, "train | test")->capture_default_str();
  auto* eval_out_opt = eval_cmd->add_option("--out", eval_out, "Directory for eval.json");

  CrossValidateOptions cv;
  std::uint64_t cv_seed = 0;
  std::size_t cv_folds = 0, cv_epochs = 0;
  std::string cv_out, cv_data;
  auto* cv_cmd = app.add_subcommand("cross-validate", "Stratified k-fold cross-validation over the config's seeds");
  cv_cmd->add_option("--config", cv.config, "Experiment config (JSON)")->required();
  auto* cv_folds_opt = cv_cmd->add_option("--folds", cv_folds, "Number of folds (default: config)");
  auto* cv_seed_opt = cv_cmd->add_option("--seed", cv_seed, "Run a single seed");
  auto* cv_epochs_opt = cv_cmd->add_option("--epochs", cv_epochs, "Override the epoch count");
  auto* cv_data_opt = cv_cmd->add_option("--data", cv_data, "Use a generated data directory");
  auto* cv_out_opt = cv_cmd->add_option("--out", cv_out, "Directory for cross_validation.json");
  cv_cmd->add_option("--workers", cv.workers, "Parallel folds (default: hardware threads)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      gen.config = opt_if(gen_config_opt, gen_config);
      gen.seed = opt_if(gen_seed_opt, gen_seed);
      gen.data = opt_if(gen_data_opt, gen_data);
      const json meta = cmd_generate(gen);
      std::cout << "wrote " << meta.at("events").get<std::size_t>() << " events and "
                << meta.at("labels").get<std::size_t>() << " labels to " << gen.out << "\n";
    } else if (*train_cmd) {
      train.seed = opt_if(train_seed_opt, train_seed);
      train.out = opt_if(train_out_opt, train_out);
      train.epochs = opt_if(train_epochs_opt, train_epochs);
      train.data = opt_if(train_data_opt, train_data);
      const RunResult r = cmd_train(train);
      std::cout << "seed " << r.seed << ", " << r.epochs.size() << " epochs, last epoch training accuracy "
                << (r.epochs.empty() ? 0.0 : r.epochs.back().accuracy()) << "\n";
      print_report("final train", stats_to_json(r.final_train));
      print_report("test", stats_to_json(r.test));
    } else if (*eval_cmd) {
      eval.data = opt_if(eval_data_opt, eval_data);
      eval.out = opt_if(eval_out_opt, eval_out);
      const json r = cmd_eval(eval);
      print_report("eval (" + eval.split + ")", r);
    } else if (*cv_cmd) {
      cv.folds = opt_if(cv_folds_opt, cv_folds);
      cv.seed = opt_if(cv_seed_opt, cv_seed);
      cv.epochs = opt_if(cv_epochs_opt, cv_epochs);
      cv.data = opt_if(cv_data_opt, cv_data);
      cv.out = opt_if(cv_out_opt, cv_out);
      const auto rep = cmd_cross_validate(cv);
      for (const auto& f : rep.results) {
        std::cout << "seed " << f.seed << " fold " << f.fold << ": test accuracy " << f.test_accuracy << "\n";
      }
      std::cout << rep.folds << "-fold mean accuracy " << rep.mean << " (stddev " << rep.stddev << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
