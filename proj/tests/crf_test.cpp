#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ahcrf/crf.hpp"
#include "ahcrf/error.hpp"
#include "oracle.hpp"

namespace ahcrf {
namespace {

using oracle::close;

struct Instance {
  AugmentedAction action;
  ModelParameters params;
};

Instance random_instance(std::mt19937_64& rng) {
  const std::size_t classes = oracle::draw(rng, 1, 3);
  const std::size_t length = oracle::draw(rng, 1, 4);
  const std::size_t poses = oracle::draw(rng, 1, 3);
  const std::size_t dim = oracle::draw(rng, 1, 5);
  return {oracle::random_action(rng, length, dim, 3), oracle::random_parameters(rng, classes, poses, dim)};
}

TEST(Crf, LogPartitionMatchesEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto [action, params] = random_instance(rng);
    const double got = log_partition(make_chain(action), params);
    EXPECT_TRUE(close(got, oracle::log_partition(action, params, true), 1e-9)) << "trial " << trial;
  }
}

TEST(Crf, PosteriorsMatchEnumerationAndNormalize) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto [action, params] = random_instance(rng);
    const auto got = class_posterior(make_chain(action), params);
    const auto want = oracle::log_posterior(action, params, true);
    double total = 0.0;
    for (std::size_t y = 0; y < want.size(); ++y) {
      EXPECT_TRUE(close(std::exp(got.log_posterior[y]), std::exp(want[y]), 1e-9));
      total += std::exp(got.log_posterior[y]);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Crf, MarginalsMatchEnumeration) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    auto [action, params] = random_instance(rng);
    const auto chain = make_chain(action);
    for (std::size_t y = 0; y < params.num_classes(); ++y) {
      const auto got = posterior_marginals(chain, y, params);
      const auto want = oracle::marginals(action, y, params, true);
      ASSERT_EQ(got.unary.size(), want.unary.size());
      for (std::size_t t = 0; t < want.unary.size(); ++t) {
        double sum = 0.0;
        for (std::size_t s = 0; s < want.unary[t].size(); ++s) {
          EXPECT_TRUE(close(got.unary[t][s], want.unary[t][s], 1e-9));
          sum += got.unary[t][s];
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
      for (std::size_t t = 0; t < want.pairwise.size(); ++t) {
        for (std::size_t s = 0; s < want.pairwise[t].size(); ++s) {
          EXPECT_TRUE(close(got.pairwise[t][s], want.pairwise[t][s], 1e-9));
        }
      }
    }
  }
}

TEST(Crf, MapDecodeMatchesEnumeration) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    auto [action, params] = random_instance(rng);
    const auto chain = make_chain(action);
    for (std::size_t y = 0; y < params.num_classes(); ++y) {
      const auto got = map_decode(chain, y, params);
      const auto want = oracle::argmax(action, y, params, true);
      EXPECT_TRUE(got.states == want.states) << "trial " << trial;
      EXPECT_TRUE(close(got.potential, want.potential, 1e-12));
    }
  }
}

TEST(Crf, PotentialMatchesDefinition) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    auto [action, params] = random_instance(rng);
    const auto chain = make_chain(action);
    for (const auto& h : oracle::configurations(action, params.num_poses())) {
      const double want = oracle::potential(action, 0, h, params, true);
      EXPECT_TRUE(close(potential(0, h, chain, params), want, 1e-12));
    }
  }
}

TEST(Crf, CompositeUnaryEqualsMaterializedTemplate) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    auto params = oracle::random_parameters(rng, 2, 3, 4);
    const auto action = oracle::random_action(rng, 2, 4, 3, false);
    for (const auto& segment : action.segments) {
      for (std::size_t o = 0; o <= segment.alternatives.size(); ++o) {
        for (std::size_t p = 0; p < 3; ++p) {
          const CompositeState s{o, p};
          EXPECT_TRUE(close(unary_composite(segment, s, params), unary_composite_materialized(segment, s, params), 1e-12));
        }
      }
    }
  }
}

ActionSequence plain_action(const AugmentedAction& action) {
  ActionSequence a;
  a.id = action.id;
  a.label = action.label;
  for (const auto& segment : action.segments) a.segments.push_back(segment.original);
  return a;
}

TEST(Crf, ZeroAlternativesReduceToPlainModel) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto params = oracle::random_parameters(rng, 3, 3, 4);
    params.epsilon = 0.0;
    const auto action = without_alternatives(plain_action(oracle::random_action(rng, 4, 4, 0)));
    const auto aug = class_posterior(make_chain(action), params);
    const auto plain = class_posterior(make_chain(plain_action(action)), params);
    for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(aug.log_posterior[y], plain.log_posterior[y], 1e-12);
  }
}

TEST(Crf, IdenticalAlternativesCancel) {
  std::mt19937_64 rng(18);
  for (double eps : {0.0, 1.0, 10.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      auto params = oracle::random_parameters(rng, 3, 3, 4);
      params.epsilon = eps;
      auto action = oracle::random_action(rng, 4, 4, 3, false);
      for (auto& segment : action.segments) {
        for (auto& alt : segment.alternatives) alt.vector = segment.original;
      }
      const auto aug = class_posterior(make_chain(action), params);
      const auto plain = class_posterior(make_chain(plain_action(action)), params);
      for (std::size_t y = 0; y < 3; ++y) {
        EXPECT_NEAR(std::exp(aug.log_posterior[y]), std::exp(plain.log_posterior[y]), 1e-9);
      }
    }
  }
}

TEST(Crf, HugeBiasKeepsEveryOriginal) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    auto params = oracle::random_parameters(rng, 2, 3, 4);
    params.epsilon = 1e6;
    const auto action = oracle::random_action(rng, 4, 4, 3, false);
    for (std::size_t y = 0; y < 2; ++y) {
      for (const auto& s : map_decode(make_chain(action), y, params).states) EXPECT_EQ(s.observation, 0u);
    }
  }
}

TEST(Crf, KeptOriginalsNonDecreasingInBias) {
  std::mt19937_64 rng(20);
  const std::vector<double> grid{0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0};
  for (int trial = 0; trial < 50; ++trial) {
    auto params = oracle::random_parameters(rng, 2, 3, 4);
    const auto action = oracle::random_action(rng, 6, 4, 3, false);
    std::size_t previous = 0;
    for (double eps : grid) {
      params.epsilon = eps;
      std::size_t kept = 0;
      for (const auto& s : map_decode(make_chain(action), 1, params).states) kept += s.observation == 0;
      EXPECT_GE(kept, previous);
      previous = kept;
    }
  }
}

TEST(Crf, ZeroModelCounts) {
  ModelParameters params(2, 2, 3);
  params.class_names = {"a", "b"};
  ActionSequence plain{"p", {{1, 2, 3}, {4, 5, 6}}, {}, {}, {}};
  EXPECT_NEAR(log_partition(make_chain(plain), params), std::log(8.0), 1e-15);

  AugmentedAction aug = without_alternatives(plain);
  for (auto& segment : aug.segments) segment.alternatives.assign(3, Alternative{{0, 0, 0}, "s", 0, 0, {}});
  EXPECT_NEAR(log_partition(make_chain(aug), params), std::log(128.0), 1e-14);

  const auto post = class_posterior(make_chain(aug), params, true);
  EXPECT_NEAR(std::exp(post.log_posterior[0]), 0.5, 1e-15);
  EXPECT_EQ(post.predicted, 0u);
  EXPECT_EQ(predict(make_chain(plain), params), 0u);
  for (const auto& row : posterior_marginals(make_chain(aug), 1, params).unary) {
    for (double m : row) EXPECT_NEAR(m, 1.0 / 8.0, 1e-15);
  }
  EXPECT_EQ(potential(0, std::vector<CompositeState>{{2, 1}, {0, 0}}, make_chain(aug), params), 0.0);
}

TEST(Crf, UnaryExamples) {
  ModelParameters params(1, 2, 2);
  params.pose(1)[0] = params.pose(1)[1] = 1.0 / std::sqrt(2.0);
  const std::vector<double> x{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  EXPECT_NEAR(unary_plain(x, 1, params), 1.0, 1e-15);
  EXPECT_EQ(unary_plain(std::vector<double>{0, 0}, 1, params), 0.0);
  EXPECT_THROW(unary_plain(std::vector<double>{1, 2, 3}, 0, params), InvalidInput);

  params.epsilon = 0.25;
  AugmentedSegment segment{{0, 0}, {Alternative{{1, 1}, "s", 0, 0, {}}}, true};
  EXPECT_EQ(unary_composite(segment, {0, 1}, params), 0.25);
  EXPECT_THROW(unary_composite(segment, {2, 0}, params), InvalidInput);
  segment.original_allowed = false;
  EXPECT_THROW(unary_composite(segment, {0, 0}, params), InvalidInput);
}

TEST(Crf, DominantClassPose) {
  std::mt19937_64 rng(21);
  ModelParameters params(3, 2, 2);
  params.class_names = {"a", "b", "c"};
  for (std::size_t p = 0; p < 2; ++p) params.class_pose(2, p) = 10.0;
  const auto action = oracle::random_action(rng, 3, 2, 0);
  const auto post = class_posterior(make_chain(action), params);
  EXPECT_GE(std::exp(post.log_posterior[2]), 1.0 - 3.0 * std::exp(-30.0));
  EXPECT_EQ(post.predicted, 2u);
}

TEST(Crf, SingleSegmentClosedForm) {
  std::mt19937_64 rng(22);
  auto params = oracle::random_parameters(rng, 2, 3, 2);
  const auto action = oracle::random_action(rng, 1, 2, 2, false);
  const auto got = posterior_marginals(make_chain(action), 1, params);
  std::vector<double> w;
  double z = 0.0;
  const auto& seg = action.segments[0];
  for (std::size_t o = 0; o <= seg.alternatives.size(); ++o) {
    for (std::size_t p = 0; p < 3; ++p) {
      w.push_back(std::exp(unary_composite(seg, {o, p}, params) + params.class_pose(1, p)));
      z += w.back();
    }
  }
  for (std::size_t s = 0; s < w.size(); ++s) EXPECT_NEAR(got.unary[0][s], w[s] / z, 1e-14);
  EXPECT_TRUE(got.pairwise.empty());
}

TEST(Crf, ZeroedOriginalReplacedByMatchingAlternative) {
  ModelParameters params(1, 2, 2);
  params.class_names = {"a"};
  params.pose(1)[0] = 3.0;
  params.class_pose(0, 1) = 2.0;
  AugmentedAction action;
  action.id = "z";
  action.segments.push_back({{1.0, 0.0}, {Alternative{{1.0, 0.0}, "s", 0, 0, {}}}, true});
  action.segments.push_back({{0.0, 0.0}, {Alternative{{1.0, 0.0}, "s", 1, 0, {}}}, true});
  const auto got = map_decode(make_chain(action), 0, params);
  EXPECT_NE(got.states[1].observation, 0u);
  EXPECT_EQ(got.states, oracle::argmax(action, 0, params, true).states);
}

TEST(Crf, PairwiseMarginalsAreConsistent) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto [action, params] = random_instance(rng);
    const auto m = posterior_marginals(make_chain(action), 0, params);
    for (std::size_t t = 0; t + 1 < m.states.size(); ++t) {
      for (std::size_t a = 0; a < m.states[t]; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < m.states[t + 1]; ++b) row += m.pairwise[t][a * m.states[t + 1] + b];
        EXPECT_NEAR(row, m.unary[t][a], 1e-9);
      }
    }
  }
}

TEST(Crf, LargeValuesStayFinite) {
  ModelParameters params(2, 2, 1);
  params.class_names = {"a", "b"};
  params.pose(0)[0] = 600.0;
  ActionSequence action{"big", {{1.0}, {1.0}, {1.0}}, {}, {}, {}};
  const double z = log_partition(make_chain(action), params);
  EXPECT_TRUE(std::isfinite(z));
  EXPECT_NEAR(z, 1800.0 + std::log(2.0), 1e-9);
}

TEST(Crf, RejectsMalformedChains) {
  ModelParameters params(1, 1, 2);
  ActionSequence wrong{"w", {{1.0, 2.0, 3.0}}, {}, {}, {}};
  EXPECT_THROW(log_partition(make_chain(wrong), params), InvalidInput);
  EXPECT_THROW(log_partition(ObservationChain{}, params), InvalidInput);
}

}  // namespace
}  // namespace ahcrf
