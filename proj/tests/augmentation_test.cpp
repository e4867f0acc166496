#include <gtest/gtest.h>
#include <map>

#include <cmath>
#include <limits>
#include <random>

#include "ahcrf/augmentation.hpp"
#include "ahcrf/error.hpp"
#include "ahcrf/features.hpp"

namespace ahcrf {
namespace {

Dataset random_dataset(std::mt19937_64& rng, std::size_t actions, std::size_t length, std::size_t dim,
                       const std::string& prefix = "a") {
  std::normal_distribution<double> n(0.0, 1.0);
  Dataset data;
  for (std::size_t i = 0; i < actions; ++i) {
    ActionSequence a;
    a.id = prefix + std::to_string(i);
    a.label = "c" + std::to_string(i % 3);
    for (std::size_t t = 0; t < length; ++t) {
      FeatureVector v(dim);
      for (double& x : v) x = n(rng);
      a.segments.push_back(std::move(v));
    }
    data.actions.push_back(std::move(a));
  }
  return data;
}

// Exhaustive argmin with ties to the lowest index.
Neighbor scan(const Dataset& data, std::span<const double> query, std::size_t position,
              std::optional<std::string> exclude = std::nullopt) {
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (exclude && data.actions[i].id == *exclude) continue;
    double sq = 0.0;
    for (std::size_t k = 0; k < query.size(); ++k) {
      const double diff = query[k] - data.actions[i].segments[position][k];
      sq += diff * diff;
    }
    if (sq < best_sq) {
      best_sq = sq;
      best = {i, std::sqrt(sq)};
    }
  }
  return best;
}

class Backends : public ::testing::TestWithParam<IndexBackend> {};

TEST_P(Backends, SingletonAlwaysWins) {
  std::mt19937_64 rng(1);
  const auto data = random_dataset(rng, 1, 3, 4);
  const auto index = RetrievalIndex::build(data, GetParam());
  const auto queries = random_dataset(rng, 5, 3, 4, "q");
  for (const auto& q : queries.actions) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(index.nearest(q.segments[j], j).action, 0u);
  }
}

TEST_P(Backends, SelfMatchHasZeroDistance) {
  std::mt19937_64 rng(2);
  const auto data = random_dataset(rng, 30, 4, 5);
  const auto index = RetrievalIndex::build(data, GetParam());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const auto hit = index.nearest(data.actions[i].segments[j], j);
      EXPECT_EQ(hit.action, i);
      EXPECT_EQ(hit.distance, 0.0);
    }
  }
}

TEST_P(Backends, MatchesExhaustiveScanWithTies) {
  std::mt19937_64 rng(3);
  auto data = random_dataset(rng, 20, 2, 5);
  // Duplicated vectors create exact ties.
  data.actions[7].segments = data.actions[3].segments;
  data.actions[15].segments = data.actions[3].segments;
  const auto index = RetrievalIndex::build(data, GetParam());
  const auto queries = random_dataset(rng, 50, 2, 5, "q");
  for (const auto& q : queries.actions) {
    for (std::size_t j = 0; j < 2; ++j) {
      const auto got = index.nearest(q.segments[j], j);
      const auto want = scan(data, q.segments[j], j);
      EXPECT_EQ(got.action, want.action);
      EXPECT_NEAR(got.distance, want.distance, 1e-12);
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(index.nearest(data.actions[15].segments[j], j).action, 3u);
    EXPECT_EQ(index.nearest(data.actions[3].segments[j], j, "a3").action, 7u);
  }
}

TEST_P(Backends, NearerOfTwo) {
  Dataset data;
  data.actions.push_back({"far", {{2.0, 0.0}}, "x", {}, {}});
  data.actions.push_back({"near", {{1.0, 0.0}}, "y", {}, {}});
  const auto index = RetrievalIndex::build(data, GetParam());
  EXPECT_EQ(nearest_training_action(index, std::vector<double>{0.0, 0.0}, 0), "near");
  EXPECT_EQ(nearest_training_action(index, std::vector<double>{0.0, 0.0}, 0, "near"), "far");
}

TEST_P(Backends, ErrorsAreReported) {
  EXPECT_THROW(RetrievalIndex::build(Dataset{}, GetParam()), InvalidInput);
  Dataset one;
  one.actions.push_back({"only", {{1.0}}, "x", {}, {}});
  const auto index = RetrievalIndex::build(one, GetParam());
  EXPECT_THROW(index.nearest(std::vector<double>{0.0}, 0, "only"), InvalidInput);
}

INSTANTIATE_TEST_SUITE_P(Exact, Backends, ::testing::Values(IndexBackend::kLinearScan, IndexBackend::kKdTree));

TEST(RetrievalIndex, KdTreeEqualsLinearScanOnThousandQueries) {
  std::mt19937_64 rng(4);
  const auto data = random_dataset(rng, 300, 3, 6);
  const auto linear = RetrievalIndex::build(data, IndexBackend::kLinearScan);
  const auto tree = RetrievalIndex::build(data, IndexBackend::kKdTree);
  const auto queries = random_dataset(rng, 1000, 3, 6, "q");
  std::size_t checked = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const std::size_t j = q % 3;
    const auto& v = queries.actions[q].segments[j];
    const std::optional<std::string_view> exclude =
        q % 5 == 0 ? std::optional<std::string_view>(data.actions[q % 300].id) : std::nullopt;
    EXPECT_EQ(tree.nearest(v, j, exclude), linear.nearest(v, j, exclude));
    ++checked;
  }
  EXPECT_EQ(checked, 1000u);
}

TEST(RetrievalIndex, MovedIndexStillAnswers) {
  std::mt19937_64 rng(5);
  const auto data = random_dataset(rng, 50, 2, 3);
  auto index = RetrievalIndex::build(data, IndexBackend::kKdTree);
  RetrievalIndex moved = std::move(index);
  EXPECT_EQ(moved.nearest(data.actions[17].segments[1], 1).action, 17u);
}

// ---------------------------------------------------------------------------

TEST(Recommend, HarvestsWinnerSegmentsWithOneQuery) {
  std::mt19937_64 rng(6);
  const auto data = random_dataset(rng, 10, 4, 3);
  const auto index = RetrievalIndex::build(data);
  const auto query = random_dataset(rng, 1, 4, 3, "q").actions[0];
  index.reset_query_count();
  const auto alts = recommend(index, query, 2);
  EXPECT_EQ(index.query_count(), 1u);
  const auto winner = scan(data, query.segments[2], 2).action;
  ASSERT_EQ(alts.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(alts[t].vector, data.actions[winner].segments[t]);
    EXPECT_EQ(alts[t].source_id, data.actions[winner].id);
    EXPECT_EQ(alts[t].source_position, t);
    EXPECT_EQ(alts[t].recommender, 2u);
    EXPECT_EQ(alts[t].source_label, data.actions[winner].label);
  }
}

TEST(Augment, ExactlyTQueriesPerActionForAnyTrainingSize) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 17u, 200u}) {
    for (std::size_t T : {1u, 5u, 12u}) {
      const auto data = random_dataset(rng, n, T, 3);
      const auto index = RetrievalIndex::build(data, n > 10 ? IndexBackend::kKdTree : IndexBackend::kLinearScan);
      const auto query = random_dataset(rng, 1, T, 3, "q").actions[0];
      index.reset_query_count();
      const auto augmented = augment_action(index, query, {});
      EXPECT_EQ(index.query_count(), T);
      for (const auto& segment : augmented.segments) EXPECT_EQ(segment.alternatives.size(), T);
    }
  }
}

TEST(Augment, AlternativeJOfSegmentTComesFromQueryJ) {
  std::mt19937_64 rng(8);
  const auto data = random_dataset(rng, 25, 5, 3);
  const auto index = RetrievalIndex::build(data);
  const auto query = random_dataset(rng, 1, 5, 3, "q").actions[0];
  const auto augmented = augment_action(index, query, {});
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(augmented.segments[t].original, query.segments[t]);
    EXPECT_TRUE(augmented.segments[t].original_allowed);
    for (std::size_t j = 0; j < 5; ++j) {
      const auto& alt = augmented.segments[t].alternatives[j];
      EXPECT_EQ(alt.recommender, j);
      EXPECT_EQ(alt.source_position, t);
      EXPECT_EQ(alt.source_id, data.actions[scan(data, query.segments[j], j).action].id);
    }
  }
}

TEST(Augment, ProvenanceClosure) {
  std::mt19937_64 rng(9);
  const auto train = random_dataset(rng, 15, 4, 3);
  const auto test = random_dataset(rng, 5, 4, 3, "q");
  const auto split = augment_dataset(train, test, {});
  std::map<std::string, const ActionSequence*> by_id;
  for (const auto& a : train.actions) by_id[a.id] = &a;
  for (const auto* set : {&split.train, &split.test}) {
    for (const auto& action : set->actions) {
      for (const auto& segment : action.segments) {
        for (const auto& alt : segment.alternatives) {
          ASSERT_TRUE(by_id.count(alt.source_id));
          EXPECT_EQ(alt.vector, by_id[alt.source_id]->segments[alt.source_position]);
        }
      }
    }
  }
}

TEST(Augment, ExcludeSelfAndPairExclusion) {
  std::mt19937_64 rng(10);
  const auto train = random_dataset(rng, 2, 3, 2);
  const auto split = augment_dataset(train, Dataset{}, {});
  for (std::size_t i = 0; i < 2; ++i) {
    for (const auto& segment : split.train.actions[i].segments) {
      for (const auto& alt : segment.alternatives) EXPECT_EQ(alt.source_id, train.actions[1 - i].id);
    }
  }
  EXPECT_EQ(split.nns_queries, 2u * 3u);
}

TEST(Augment, QueryCountForWholeSplit) {
  std::mt19937_64 rng(11);
  const auto train = random_dataset(rng, 13, 6, 2);
  const auto test = random_dataset(rng, 4, 6, 2, "q");
  EXPECT_EQ(augment_dataset(train, test, {}, IndexBackend::kKdTree).nns_queries, (13u + 4u) * 6u);
}

TEST(Augment, DuplicateWindowAppendsNeighbours) {
  std::mt19937_64 rng(12);
  const auto data = random_dataset(rng, 9, 5, 2);
  const auto index = RetrievalIndex::build(data);
  const auto query = random_dataset(rng, 1, 5, 2, "q").actions[0];
  AugmentOptions options;
  options.duplicate_window = 1;
  const auto plain = augment_action(index, query, {});
  const auto wide = augment_action(index, query, options);
  index.reset_query_count();
  augment_action(index, query, options);
  EXPECT_EQ(index.query_count(), 5u);
  for (std::size_t t = 0; t < 5; ++t) {
    const std::size_t neighbours = (t > 0) + (t + 1 < 5);
    ASSERT_EQ(wide.segments[t].alternatives.size(), 5u * (1 + neighbours));
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(wide.segments[t].alternatives[j], plain.segments[t].alternatives[j]);
    std::size_t k = 5;
    for (std::size_t j = 0; j < 5; ++j) {
      if (t > 0) EXPECT_EQ(wide.segments[t].alternatives[k++], plain.segments[t - 1].alternatives[j]);
      if (t + 1 < 5) EXPECT_EQ(wide.segments[t].alternatives[k++], plain.segments[t + 1].alternatives[j]);
    }
  }
}

TEST(Augment, KnownMaskRestrictsAlternatives) {
  std::mt19937_64 rng(13);
  const auto data = random_dataset(rng, 9, 4, 2);
  const auto index = RetrievalIndex::build(data);
  auto query = random_dataset(rng, 1, 4, 2, "q").actions[0];
  AugmentOptions options;
  options.known_mask_mode = true;

  query.known_outlier_mask = std::vector<bool>(4, false);
  EXPECT_EQ(augment_action(index, query, options), without_alternatives(query));

  query.known_outlier_mask = std::vector<bool>{false, true, false, true};
  auto masked = augment_action(index, query, options);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(masked.segments[t].alternatives.size(), t % 2 == 1 ? 4u : 0u);
    EXPECT_TRUE(masked.segments[t].original_allowed);
  }
  options.drop_masked_original = true;
  masked = augment_action(index, query, options);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(masked.segments[t].original_allowed, t % 2 == 0);
}

TEST(Augment, NoiseFreeSyntheticAlternativesComeFromTheSameClass) {
  SyntheticSpec spec;
  spec.noise_std = 0.0;
  spec.actions_per_class = 6;
  const auto data = generate_synthetic_dataset(spec);
  const auto split = augment_dataset(data, data, {});
  for (const auto* set : {&split.train, &split.test}) {
    for (const auto& action : set->actions) {
      for (const auto& segment : action.segments) {
        for (const auto& alt : segment.alternatives) {
          EXPECT_EQ(alt.source_label, action.label);
          EXPECT_NE(alt.source_id, set == &split.train ? action.id : std::string());
        }
      }
    }
  }
}

TEST(Augment, Deterministic) {
  std::mt19937_64 rng(14);
  const auto train = random_dataset(rng, 20, 4, 3);
  const auto test = random_dataset(rng, 5, 4, 3, "q");
  AugmentOptions options;
  options.duplicate_window = 2;
  const auto a = augment_dataset(train, test, options, IndexBackend::kKdTree);
  const auto b = augment_dataset(train, test, options, IndexBackend::kLinearScan);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
}

}  // namespace
}  // namespace ahcrf
