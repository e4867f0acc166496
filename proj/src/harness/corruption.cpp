#include "ahcrf/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ahcrf/error.hpp"

namespace ahcrf {
namespace {

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// First `count` entries of a seeded Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), 0);
  for (std::size_t i = 0; i < count && i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(items[i], items[j]);
  }
  items.resize(std::min(count, n));
  return items;
}

}  // namespace

const char* to_string(CorruptionKind kind) noexcept {
  switch (kind) {
    case CorruptionKind::kGap:
      return "gap";
    case CorruptionKind::kTruncate:
      return "truncate";
    case CorruptionKind::kRandomSegments:
      return "random-segments";
    case CorruptionKind::kNoiseOverlay:
      return "noise-overlay";
  }
  return "unknown";
}

CorruptionKind corruption_kind_from_string(const std::string& name) {
  for (auto kind : {CorruptionKind::kGap, CorruptionKind::kTruncate, CorruptionKind::kRandomSegments,
                    CorruptionKind::kNoiseOverlay}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidInput("unknown corruption kind '" + name + "'");
}

std::size_t corrupted_count(double ratio, std::size_t length) {
  return static_cast<std::size_t>(std::lround(ratio * static_cast<double>(length)));
}

std::vector<bool> corruption_mask(CorruptionKind kind, double ratio, std::size_t length, std::mt19937_64& rng) {
  if (!(ratio >= 0.0 && ratio <= 0.8)) throw InvalidInput("corruption ratio must lie in [0, 0.8]");
  const std::size_t count = std::min(corrupted_count(ratio, length), length);
  std::vector<bool> mask(length, false);
  switch (kind) {
    case CorruptionKind::kGap: {
      const std::size_t start = (length - count) / 2;
      for (std::size_t t = start; t < start + count; ++t) mask[t] = true;
      break;
    }
    case CorruptionKind::kTruncate:
      for (std::size_t t = length - count; t < length; ++t) mask[t] = true;
      break;
    case CorruptionKind::kRandomSegments:
    case CorruptionKind::kNoiseOverlay:
      for (std::size_t t : sample_without_replacement(length, count, rng)) mask[t] = true;
      break;
  }
  return mask;
}

Dataset inject_corruption(const Dataset& dataset, const CorruptionSpec& spec, std::optional<double> replacement_std) {
  if (!(spec.ratio >= 0.0 && spec.ratio <= 0.8)) throw InvalidInput("corruption ratio must lie in [0, 0.8]");
  if (!(spec.action_fraction >= 0.0 && spec.action_fraction <= 1.0)) {
    throw InvalidInput("corruption action_fraction must lie in [0, 1]");
  }
  if (!(spec.noise_std >= 0.0)) throw InvalidInput("corruption noise_std must be >= 0");
  validate(dataset);
  const double fill_std = replacement_std.value_or(feature_std(dataset));

  std::vector<bool> selected(dataset.size(), true);
  if (spec.action_fraction < 1.0) {
    std::fill(selected.begin(), selected.end(), false);
    auto rng = stream_for(spec.seed, 0xAC710, 0);
    const auto count = static_cast<std::size_t>(std::lround(spec.action_fraction * static_cast<double>(dataset.size())));
    for (std::size_t i : sample_without_replacement(dataset.size(), count, rng)) selected[i] = true;
  }

  Dataset out = dataset;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& action = out.actions[i];
    auto rng = stream_for(spec.seed, 0x5E6, i);
    std::vector<bool> mask(action.length(), false);
    if (selected[i]) mask = corruption_mask(spec.kind, spec.ratio, action.length(), rng);

    std::normal_distribution<double> unit(0.0, 1.0);
    for (std::size_t t = 0; t < action.length(); ++t) {
      if (!mask[t]) continue;
      for (double& v : action.segments[t]) {
        if (spec.kind == CorruptionKind::kNoiseOverlay) {
          v += spec.noise_std * unit(rng);
        } else {
          v = fill_std * unit(rng);
        }
      }
    }

    std::vector<bool> truth = mask;
    if (action.truth_mask) {
      for (std::size_t t = 0; t < truth.size(); ++t) truth[t] = truth[t] || (*action.truth_mask)[t];
    }
    action.truth_mask = truth;
    if (spec.known) {
      std::vector<bool> known = mask;
      if (action.known_outlier_mask) {
        for (std::size_t t = 0; t < known.size(); ++t) known[t] = known[t] || (*action.known_outlier_mask)[t];
      }
      action.known_outlier_mask = std::move(known);
    }
  }
  return out;
}

}  // namespace ahcrf
