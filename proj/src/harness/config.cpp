#include "ahcrf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ahcrf/error.hpp"
#include "ahcrf/experiment.hpp"
#include "ahcrf/io.hpp"

namespace ahcrf {
namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("config key '" + key + "': expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& source) {
  KeyValueConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    if (content.rfind("ahcrf-config", 0) == 0) {
      if (content != "ahcrf-config " + std::to_string(kFormatVersion)) {
        throw ParseError(source, number, "unsupported config version");
      }
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected key=value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.empty()) throw ParseError(source, number, "empty key");
    config.entries_[key] = trim(std::string_view(content).substr(eq + 1));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void KeyValueConfig::erase(const std::string& key) { entries_.erase(key); }

bool KeyValueConfig::contains(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> KeyValueConfig::lookup(const std::string& key) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return lookup(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto raw = lookup(key);
  if (!raw) return fallback;
  try {
    return parse_double(*raw);
  } catch (const std::exception&) {
    throw InvalidInput("config key '" + key + "': expected a number, got '" + *raw + "'");
  }
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
  const auto raw = lookup(key);
  return raw ? parse_integer<std::size_t>(key, *raw) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto raw = lookup(key);
  return raw ? parse_integer<std::uint64_t>(key, *raw) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto raw = lookup(key);
  if (!raw) return fallback;
  if (*raw == "1" || *raw == "true" || *raw == "yes" || *raw == "on") return true;
  if (*raw == "0" || *raw == "false" || *raw == "no" || *raw == "off") return false;
  throw InvalidInput("config key '" + key + "': expected a boolean, got '" + *raw + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const auto raw = lookup(key);
  std::vector<double> values;
  if (!raw) return values;
  std::istringstream in(*raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string value = trim(item);
    if (value.empty()) continue;
    try {
      values.push_back(parse_double(value));
    } catch (const std::exception&) {
      throw InvalidInput("config key '" + key + "': bad number '" + value + "'");
    }
  }
  return values;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> unused;
  for (const auto& [key, value] : entries_) {
    if (!used_.count(key)) unused.push_back(key);
  }
  return unused;
}

// ---------------------------------------------------------------------------
// Component readers. Component seeds default to the shared `seed` key.

SyntheticSpec synthetic_spec_from(const KeyValueConfig& config) {
  SyntheticSpec spec;
  spec.num_classes = config.get_size("synth.num_classes", spec.num_classes);
  spec.actions_per_class = config.get_size("synth.actions_per_class", spec.actions_per_class);
  spec.length = config.get_size("synth.length", spec.length);
  spec.dim = config.get_size("synth.dim", spec.dim);
  spec.poses_per_class = config.get_size("synth.poses_per_class", spec.poses_per_class);
  spec.noise_std = config.get_double("synth.noise_std", spec.noise_std);
  spec.prototype_scale = config.get_double("synth.prototype_scale", spec.prototype_scale);
  spec.seed = config.get_u64("synth.seed", config.get_u64("seed", 1));
  return spec;
}

TrainConfig train_config_from(const KeyValueConfig& config) {
  TrainConfig train;
  train.sigma = config.get_double("train.sigma", train.sigma);
  train.epsilon = config.get_double("train.epsilon", train.epsilon);
  train.num_poses = config.get_size("train.poses", train.num_poses);
  train.max_iterations = config.get_size("train.max_iterations", train.max_iterations);
  train.gradient_tolerance = config.get_double("train.gradient_tolerance", train.gradient_tolerance);
  train.init_scale = config.get_double("train.init_scale", train.init_scale);
  train.workers = config.get_size("train.workers", train.workers);
  train.seed = config.get_u64("train.seed", config.get_u64("seed", 1) + 2);
  if (!(train.sigma > 0.0)) throw InvalidInput("train.sigma must be > 0");
  if (!(train.epsilon >= 0.0)) throw InvalidInput("train.epsilon must be >= 0");
  if (train.num_poses == 0) throw InvalidInput("train.poses must be >= 1");
  return train;
}

AugmentOptions augment_options_from(const KeyValueConfig& config) {
  AugmentOptions options;
  options.duplicate_window = config.get_size("augment.duplicate_window", 0);
  options.known_mask_mode = config.get_bool("augment.known_mask_mode", false);
  options.drop_masked_original = config.get_bool("augment.drop_masked_original", false);
  return options;
}

CorruptionSpec corruption_spec_from(const KeyValueConfig& config) {
  CorruptionSpec spec;
  spec.kind = corruption_kind_from_string(config.get_string("corrupt.kind", to_string(spec.kind)));
  spec.ratio = config.get_double("corrupt.ratio", spec.ratio);
  spec.known = config.get_bool("corrupt.known", spec.known);
  spec.noise_std = config.get_double("corrupt.noise_std", spec.noise_std);
  spec.action_fraction = config.get_double("corrupt.action_fraction", spec.action_fraction);
  spec.seed = config.get_u64("corrupt.seed", config.get_u64("seed", 1) + 1);
  return spec;
}

ExperimentConfig experiment_config_from(const KeyValueConfig& config) {
  ExperimentConfig out;
  out.task = task_from_string(config.get_string("experiment.task", to_string(out.task)));
  out.corruption = corruption_spec_from(config);
  if (config.contains("corrupt.kind")) out.requested_kind = out.corruption.kind;
  out.model = train_config_from(config);
  out.augmentation = augment_options_from(config);
  const std::string backend = config.get_string("augment.backend", "linear");
  if (backend == "linear") {
    out.backend = IndexBackend::kLinearScan;
  } else if (backend == "kdtree") {
    out.backend = IndexBackend::kKdTree;
  } else {
    throw InvalidInput("augment.backend must be 'linear' or 'kdtree'");
  }
  const std::string split = config.get_string("experiment.split", "kfold");
  if (split == "kfold") {
    out.split.kind = SplitKind::kKFold;
  } else if (split == "loo") {
    out.split.kind = SplitKind::kLeaveOneOut;
  } else if (split == "fixed") {
    out.split.kind = SplitKind::kFixed;
  } else {
    throw InvalidInput("experiment.split must be 'kfold', 'loo' or 'fixed'");
  }
  out.split.folds = config.get_size("experiment.folds", out.split.folds);
  out.split.train_fraction = config.get_double("experiment.train_fraction", out.split.train_fraction);
  out.split.seed = config.get_u64("experiment.split_seed", config.get_u64("seed", 1) + 3);
  out.mixed_fraction = config.get_double("experiment.mixed_fraction", out.mixed_fraction);
  out.augmented = config.get_bool("experiment.augmented", out.augmented);
  out.baseline = config.get_bool("experiment.baseline", out.baseline);
  out.epsilon_grid = config.get_doubles("experiment.epsilon_grid");
  out.validation_fraction = config.get_double("experiment.validation_fraction", out.validation_fraction);
  return out;
}

}  // namespace ahcrf
