#include "ahcrf/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/config.hpp"
#include "ahcrf/crf.hpp"
#include "ahcrf/error.hpp"
#include "ahcrf/experiment.hpp"
#include "ahcrf/features.hpp"
#include "ahcrf/io.hpp"
#include "ahcrf/training.hpp"

namespace ahcrf {
namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;

  std::string data;
  std::string out;
  std::string train;
  std::string model;
  std::string in;
  std::string out_dir;
  std::string trace_out;
  std::string csv;

  std::string kind;
  std::optional<double> ratio;
  bool known = false;
  std::optional<double> noise_std;

  std::optional<std::size_t> window;
  bool known_mask = false;
  bool drop_masked = false;
  std::string backend;

  bool plain = false;
  bool decode = false;
  bool timing = false;
  std::string task;
  std::string ratios;

  std::ostream* err = nullptr;
};

void add_shared(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "key=value configuration file");
  cmd->add_option("--seed", o.seed, "Base seed; overrides every component seed");
}

KeyValueConfig load_config(const Options& o) {
  KeyValueConfig config = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  if (o.seed) {
    config.set("seed", std::to_string(*o.seed));
    for (const char* key : {"synth.seed", "corrupt.seed", "train.seed", "experiment.split_seed"}) config.erase(key);
  }
  // Run every reader on a copy to find keys no component knows. A bad value
  // is left for the command itself to report.
  if (o.err) {
    KeyValueConfig probe = config;
    try {
      synthetic_spec_from(probe);
      experiment_config_from(probe);
      for (const auto& key : probe.unused_keys()) *o.err << "warning: unknown config key '" << key << "'\n";
    } catch (const std::exception&) {
    }
  }
  return config;
}

void apply_augment_flags(const Options& o, KeyValueConfig& config) {
  if (o.window) config.set("augment.duplicate_window", std::to_string(*o.window));
  if (o.known_mask) config.set("augment.known_mask_mode", "true");
  if (o.drop_masked) config.set("augment.drop_masked_original", "true");
  if (!o.backend.empty()) config.set("augment.backend", o.backend);
}

IndexBackend backend_from(const KeyValueConfig& config) {
  const std::string name = config.get_string("augment.backend", "linear");
  if (name == "linear") return IndexBackend::kLinearScan;
  if (name == "kdtree") return IndexBackend::kKdTree;
  throw InvalidInput("augment.backend must be 'linear' or 'kdtree'");
}

AugmentedDataset self_augment(const Dataset& data, const AugmentOptions& options, IndexBackend backend) {
  const auto index = RetrievalIndex::build(data, backend);
  AugmentOptions opts = options;
  opts.exclude_self = true;
  AugmentedDataset out;
  for (const auto& action : data.actions) out.actions.push_back(augment_action(index, action, opts));
  return out;
}

std::vector<std::string> labels_of(const AugmentedDataset& data) {
  Dataset names;
  for (const auto& a : data.actions) names.actions.push_back({a.id, {}, a.label, {}, {}});
  return class_names(names);
}

void print_summary(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  const auto show = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("undefined"); };
  for (const auto& r : reports) {
    out << r.task << " ratio=" << format_double(r.ratio) << " accuracy=" << show(r.accuracy)
        << " baseline=" << show(r.baseline_accuracy) << " correct_replacement=" << show(r.correct_replacement)
        << " replaced=" << r.replaced_outliers << " tested=" << r.test_count << '\n';
  }
}

int cmd_synth(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  const auto spec = synthetic_spec_from(config);
  const auto data = generate_synthetic_dataset(spec);
  save_dataset(o.out, data);
  out << "wrote " << data.size() << " actions to " << o.out << '\n';
  return 0;
}

int cmd_corrupt(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  if (!o.kind.empty()) config.set("corrupt.kind", o.kind);
  if (o.ratio) config.set("corrupt.ratio", format_double(*o.ratio));
  if (o.known) config.set("corrupt.known", "true");
  if (o.noise_std) config.set("corrupt.noise_std", format_double(*o.noise_std));
  const auto spec = corruption_spec_from(config);
  const auto data = inject_corruption(load_dataset(o.data), spec);
  save_dataset(o.out, data);
  out << "corrupted " << data.size() << " actions (" << to_string(spec.kind) << ", ratio "
      << format_double(spec.ratio) << ") into " << o.out << '\n';
  return 0;
}

int cmd_augment(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  apply_augment_flags(o, config);
  const auto options = augment_options_from(config);
  const auto backend = backend_from(config);
  const auto train = load_dataset(o.train);
  const auto index = RetrievalIndex::build(train, backend);
  AugmentedDataset result;
  if (o.data.empty()) {
    AugmentOptions opts = options;
    opts.exclude_self = true;
    for (const auto& action : train.actions) result.actions.push_back(augment_action(index, action, opts));
  } else {
    AugmentOptions opts = options;
    opts.exclude_self = false;
    for (const auto& action : load_dataset(o.data).actions) result.actions.push_back(augment_action(index, action, opts));
  }
  save_augmented(o.out, result);
  out << "augmented " << result.size() << " actions with " << index.query_count() << " nearest-neighbour queries into "
      << o.out << '\n';
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  apply_augment_flags(o, config);
  const auto train_config = train_config_from(config);
  const std::string format = peek_format(o.data);

  std::optional<Dataset> plain;
  std::optional<AugmentedDataset> augmented;
  if (format == "ahcrf-augmented") {
    if (o.plain) throw InvalidInput("--plain needs a plain dataset");
    augmented = load_augmented(o.data);
  } else {
    plain = load_dataset(o.data);
    if (!o.plain) augmented = self_augment(*plain, augment_options_from(config), backend_from(config));
  }

  TrainResult result;
  if (augmented) {
    const TrainingSet set(*augmented, labels_of(*augmented));
    result = train(set, train_config);
  } else {
    const TrainingSet set(*plain, class_names(*plain));
    result = train(set, train_config);
  }
  save_model(o.out, result.params, augmented.has_value());
  if (!o.trace_out.empty()) {
    std::ofstream trace(o.trace_out);
    if (!trace) throw InvalidInput("cannot open '" + o.trace_out + "' for writing");
    write_train_trace_csv(trace, result.report);
  }
  out << "objective=" << format_double(result.report.final_objective) << " iterations=" << result.report.iterations
      << " gradient_norm=" << format_double(result.report.gradient_norm) << " status=" << to_string(result.report.status)
      << " model=" << o.out << '\n';
  return 0;
}

int cmd_predict(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  apply_augment_flags(o, config);
  const auto model = load_model(o.model);
  const std::string format = peek_format(o.data);

  AugmentedDataset data;
  if (format == "ahcrf-augmented") {
    if (!model.augmented) throw InvalidInput("a plain model needs a plain dataset");
    data = load_augmented(o.data);
  } else {
    const auto plain = load_dataset(o.data);
    if (model.augmented) {
      if (o.train.empty()) throw InvalidInput("an augmented model needs --train to augment a plain dataset");
      const auto index = RetrievalIndex::build(load_dataset(o.train), backend_from(config));
      AugmentOptions opts = augment_options_from(config);
      opts.exclude_self = false;
      for (const auto& action : plain.actions) data.actions.push_back(augment_action(index, action, opts));
    } else {
      for (const auto& action : plain.actions) data.actions.push_back(without_alternatives(action));
    }
  }

  for (const auto& action : data.actions) {
    auto chain = make_chain(action);
    chain.biased = model.augmented;
    const auto result = class_posterior(chain, model.params, o.decode);
    out << action.id << ' ' << model.params.class_names[result.predicted];
    if (o.decode) {
      for (std::size_t t = 0; t < result.map->states.size(); ++t) {
        const auto& s = result.map->states[t];
        out << ' ' << t + 1 << ':' << s.observation << ',' << s.pose + 1;
      }
    }
    out << '\n';
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  auto config = load_config(o);
  apply_augment_flags(o, config);
  if (!o.task.empty()) config.set("experiment.task", o.task);
  if (!o.kind.empty()) config.set("corrupt.kind", o.kind);
  if (o.known) config.set("corrupt.known", "true");
  if (o.noise_std) config.set("corrupt.noise_std", format_double(*o.noise_std));
  if (o.ratio) config.set("corrupt.ratio", format_double(*o.ratio));

  const auto experiment = experiment_config_from(config);
  const Dataset data = o.data.empty() ? generate_synthetic_dataset(synthetic_spec_from(config)) : load_dataset(o.data);
  std::vector<double> ratios;
  if (o.ratios.empty()) {
    ratios.push_back(experiment.corruption.ratio);
  } else {
    ratios = parse_ratios(o.ratios);
  }
  auto reports = run_sweep(experiment, data, ratios);
  if (!o.timing) {
    for (auto& r : reports) r.runtime.reset();
  }
  if (!o.out.empty()) save_reports(o.out, reports);
  if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    if (!csv) throw InvalidInput("cannot open '" + o.csv + "' for writing");
    write_curve_csv(csv, reports);
  }
  print_summary(out, reports);
  return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
  const auto reports = load_reports(o.in);
  out << "summary\n";
  print_summary(out, reports);
  for (const auto& r : reports) {
    if (!r.runtime) continue;
    out << "runtime ratio=" << format_double(r.ratio) << " augment=" << format_double(r.runtime->augment_seconds)
        << "s train=" << format_double(r.runtime->train_seconds)
        << "s predict=" << format_double(r.runtime->predict_seconds) << "s\n";
  }
  out << '\n';
  write_curve_csv(out, reports);
  for (const auto& r : reports) {
    out << '\n';
    write_confusion_csv(out, r);
  }
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    const std::filesystem::path dir(o.out_dir);
    std::ofstream curve(dir / "curve.csv");
    write_curve_csv(curve, reports);
    for (std::size_t k = 0; k < reports.size(); ++k) {
      std::ofstream confusion(dir / ("confusion_" + std::to_string(k + 1) + ".csv"));
      write_confusion_csv(confusion, reports[k]);
    }
    if (!curve) throw InvalidInput("failed writing tables to '" + o.out_dir + "'");
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alternative-augmented hidden CRF toolkit", "ahcrf"};
  app.require_subcommand(1, 1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  add_shared(synth, o);
  synth->add_option("--spec", o.config, "Generator configuration (same as --config)");
  synth->add_option("--out", o.out, "Output dataset")->required();

  auto* corrupt = app.add_subcommand("corrupt", "Inject outlier segments");
  add_shared(corrupt, o);
  corrupt->add_option("--data", o.data, "Input dataset")->required();
  corrupt->add_option("--out", o.out, "Output dataset")->required();
  corrupt->add_option("--kind", o.kind, "gap | truncate | random-segments | noise-overlay");
  corrupt->add_option("--ratio", o.ratio, "Fraction of corrupted segments");
  corrupt->add_flag("--known", o.known, "Expose the outlier mask");
  corrupt->add_option("--noise-std", o.noise_std, "Noise level for noise-overlay");

  auto* augment = app.add_subcommand("augment", "Attach retrieved alternatives");
  add_shared(augment, o);
  augment->add_option("--train", o.train, "Training dataset (retrieval pool)")->required();
  augment->add_option("--data", o.data, "Dataset to augment; default: the training set itself");
  augment->add_option("--out", o.out, "Output augmented dataset")->required();
  augment->add_option("--window", o.window, "Duplicate-recommendation window");
  augment->add_flag("--known-mask", o.known_mask, "Only masked segments receive alternatives");
  augment->add_flag("--drop-masked", o.drop_masked, "Masked originals leave the observation domain");
  augment->add_option("--backend", o.backend, "linear | kdtree");

  auto* train_cmd = app.add_subcommand("train", "Fit a model");
  add_shared(train_cmd, o);
  train_cmd->add_option("--data", o.data, "Plain or augmented dataset")->required();
  train_cmd->add_flag("--plain", o.plain, "Train the plain HCRF without alternatives");
  train_cmd->add_option("--out", o.out, "Output model")->default_str("model.txt");
  train_cmd->add_option("--trace-out", o.trace_out, "Optimizer trace CSV");
  train_cmd->add_option("--window", o.window, "Duplicate-recommendation window");
  train_cmd->add_option("--backend", o.backend, "linear | kdtree");

  auto* predict_cmd = app.add_subcommand("predict", "Classify actions");
  add_shared(predict_cmd, o);
  predict_cmd->add_option("--model", o.model, "Model file")->required();
  predict_cmd->add_option("--data", o.data, "Plain or augmented dataset")->required();
  predict_cmd->add_option("--train", o.train, "Retrieval pool for augmenting a plain dataset");
  predict_cmd->add_flag("--decode", o.decode, "Print the MAP configuration");
  predict_cmd->add_option("--window", o.window, "Duplicate-recommendation window");
  predict_cmd->add_flag("--known-mask", o.known_mask, "Only masked segments receive alternatives");
  predict_cmd->add_flag("--drop-masked", o.drop_masked, "Masked originals leave the observation domain");
  predict_cmd->add_option("--backend", o.backend, "linear | kdtree");

  auto* evaluate = app.add_subcommand("evaluate", "Run an experiment over outlier ratios");
  add_shared(evaluate, o);
  evaluate->add_option("--data", o.data, "Labeled dataset; default: synthetic data from the configuration");
  evaluate->add_option("--task", o.task, "Task name");
  evaluate->add_option("--ratios", o.ratios, "start:stop:step or a comma list");
  evaluate->add_option("--ratio", o.ratio, "Single outlier ratio");
  evaluate->add_option("--kind", o.kind, "Corruption kind");
  evaluate->add_flag("--known", o.known, "Expose outlier masks to the pipeline");
  evaluate->add_option("--noise-std", o.noise_std, "Noise level for noise-overlay");
  evaluate->add_option("--backend", o.backend, "linear | kdtree");
  evaluate->add_option("--out", o.out, "Report file");
  evaluate->add_option("--csv", o.csv, "Curve CSV");
  evaluate->add_flag("--timing", o.timing, "Record runtime statistics in the report");

  auto* report = app.add_subcommand("report", "Summarize a report file");
  add_shared(report, o);
  report->add_option("--in", o.in, "Report file")->required();
  report->add_option("--out-dir", o.out_dir, "Directory for CSV tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    CLI::App* failing = &app;
    for (auto* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return 2;
  }

  if (train_cmd->parsed() && o.out.empty()) o.out = "model.txt";
  o.err = &err;
  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (corrupt->parsed()) return cmd_corrupt(o, out);
    if (augment->parsed()) return cmd_augment(o, out);
    if (train_cmd->parsed()) return cmd_train(o, out);
    if (predict_cmd->parsed()) return cmd_predict(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (report->parsed()) return cmd_report(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ahcrf
