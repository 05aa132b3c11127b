#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spotkit/error.hpp"
#include "spotkit/eval.hpp"

namespace spotkit {
namespace {

MatchResult from_flags(std::vector<bool> flags, std::size_t num_gt) {
  MatchResult m;
  m.num_ground_truth = num_gt;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    m.confidences.push_back(1.0 - 0.01 * static_cast<double>(k));
    m.times.push_back(static_cast<double>(k));
    m.matched += flags[k] ? 1 : 0;
  }
  m.true_positive = std::move(flags);
  return m;
}

// One game per call unless ids are given; every detection lives in class 0.
std::vector<GameDetections> one_class_game(std::vector<Detection> dets, std::string id = "g") {
  return {GameDetections{id, {"c"}, {std::move(dets)}}};
}

std::vector<AnnotationSet> one_class_labels(const std::vector<double>& times,
                                            std::string id = "g") {
  AnnotationSet set{id, {}, std::nullopt};
  for (const double t : times) set.events.push_back({0, t});
  return {set};
}

TEST(MatchDetections, GreedyExample) {
  const std::vector<Detection> dets{{0, 9.0, 0.9}, {0, 10.2, 0.8}};
  const std::vector<double> gt{10.0};
  const auto m = match_detections(dets, gt, 2.0);
  EXPECT_EQ(m.true_positive, (std::vector<bool>{true, false}));
  EXPECT_EQ(m.matched, 1u);
  EXPECT_EQ(m.num_ground_truth, 1u);
}

TEST(MatchDetections, EmptyAndExact) {
  const std::vector<double> gt{1.0, 5.0};
  const auto none = match_detections({}, gt, 1.0);
  EXPECT_TRUE(none.true_positive.empty());
  EXPECT_EQ(none.matched, 0u);
  const std::vector<Detection> exact{{0, 1.0, 1.0}, {0, 5.0, 1.0}};
  EXPECT_EQ(match_detections(exact, gt, 0.01).true_positive, (std::vector<bool>{true, true}));
}

TEST(MatchDetections, NearestUnmatchedAndEarlierOnTie) {
  const std::vector<double> gt{9.0, 11.0};
  const std::vector<Detection> mid{{0, 10.0, 0.5}};
  auto m = match_detections(mid, gt, 4.0);
  EXPECT_EQ(m.matched, 1u);
  // The remaining GT at 11 is still free for a second detection near 11.
  const std::vector<Detection> two{{0, 10.0, 0.9}, {0, 11.5, 0.8}};
  m = match_detections(two, gt, 2.0);
  EXPECT_EQ(m.true_positive, (std::vector<bool>{true, true}));
}

TEST(MatchDetections, NonPositiveDeltaRejected) {
  EXPECT_THROW(match_detections({}, {}, -1.0), Error);
  EXPECT_THROW(match_detections({}, {}, 0.0), Error);
}

TEST(AveragePrecision, Examples) {
  EXPECT_NEAR(average_precision(from_flags({true, false, true}, 2)), 0.5 + 0.5 * 2.0 / 3.0, 1e-12);
  EXPECT_EQ(average_precision(from_flags({true, true, true}, 3)), 1.0);
  EXPECT_EQ(average_precision(from_flags({false, false}, 3)), 0.0);
  EXPECT_EQ(average_precision(from_flags({}, 3)), 0.0);
  EXPECT_EQ(average_precision(from_flags({true}, 0)), 0.0);
}

TEST(AveragePrecision, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_det(0, 20);
  std::uniform_int_distribution<int> n_gt(0, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> when(0.0, 30.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Detection> dets(n_det(rng));
    for (auto& d : dets) d = {0, when(rng), std::round(unit(rng) * 10.0) / 10.0};
    std::vector<double> gt(n_gt(rng));
    for (auto& t : gt) t = when(rng);
    const auto m = match_detections(dets, gt, 1.0 + trial % 5);
    ASSERT_EQ(m.true_positive.size(), dets.size());
    ASSERT_NEAR(average_precision(m), testing::brute_force_ap(m.true_positive, gt.size()), 1e-9);
  }
}

TEST(MapAtTolerance, Examples) {
  const auto perfect = map_at_tolerance(one_class_game({{0, 10.0, 1.0}}), one_class_labels({10.0}),
                                        1, 1.0);
  EXPECT_EQ(perfect.map, 1.0);

  std::vector<GameDetections> dets{{"g", {"a", "b"}, {{{0, 5.0, 0.9}}, {{1, 50.0, 0.9}}}}};
  std::vector<AnnotationSet> labels{{"g", {{0, 5.0}, {1, 20.0}}, std::nullopt}};
  const auto half = map_at_tolerance(dets, labels, 2, 2.0);
  EXPECT_EQ(half.map, 0.5);
  EXPECT_EQ(half.ap[0], 1.0);
  EXPECT_EQ(half.ap[1], 0.0);
}

TEST(MapAtTolerance, ZeroGroundTruthClassExcluded) {
  // Class 1 has no ground truth; class 0 reproduces flags [TP, FP, TP] over 2 GT.
  std::vector<GameDetections> dets{
      {"g", {"a", "b"}, {{{0, 10.0, 0.9}, {0, 30.0, 0.8}, {0, 20.0, 0.7}}, {}}}};
  std::vector<AnnotationSet> labels{{"g", {{0, 10.0}, {0, 20.0}}, std::nullopt}};
  const auto r = map_at_tolerance(dets, labels, 2, 2.0);
  EXPECT_FALSE(r.ap[1].has_value());
  EXPECT_NEAR(r.map, 0.5 + 0.5 * 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.map, 0.8333, 1e-4);
}

TEST(MapAtTolerance, Errors) {
  EXPECT_THROW(map_at_tolerance(one_class_game({}), one_class_labels({}), 1, 1.0), Error);
  EXPECT_THROW(map_at_tolerance(one_class_game({}, "x"), one_class_labels({1.0}), 1, 1.0), Error);
}

TEST(AverageMap, Examples) {
  const std::vector<std::string> names{"c"};
  const auto perfect = one_class_game({{0, 10.0, 1.0}, {0, 40.0, 1.0}});
  for (const auto& schedule : {ToleranceSchedule::tight(), ToleranceSchedule::loose()}) {
    EXPECT_EQ(average_map(perfect, one_class_labels({10.0, 40.0}), names, schedule).average_map,
              1.0);
  }
  EXPECT_EQ(average_map({}, one_class_labels({10.0}), names, ToleranceSchedule::tight()).average_map,
            0.0);
  const auto report = average_map(one_class_game({{0, 11.4, 0.9}}), one_class_labels({10.0}), names,
                                  ToleranceSchedule::tight());
  EXPECT_NEAR(report.average_map, 0.6, 1e-12);
  ASSERT_EQ(report.tolerances.size(), 5u);
  EXPECT_EQ(report.tolerances[1].map, 0.0);
  EXPECT_EQ(report.tolerances[2].map, 1.0);
}

TEST(AverageMap, ReportBookkeeping) {
  std::vector<GameDetections> dets{{"g", {"a", "b"}, {{{0, 5.0, 0.9}}, {}}}};
  std::vector<AnnotationSet> labels{{"g", {{0, 5.0}}, std::nullopt}};
  const auto r = average_map(dets, labels, {"a", "b"}, ToleranceSchedule::tight());
  EXPECT_EQ(r.excluded_classes, (std::vector<int>{1}));
  EXPECT_EQ(r.num_games, 1u);
  EXPECT_EQ(r.num_detections, 1u);
  EXPECT_EQ(r.num_ground_truth, 1u);
  double mean = 0.0;
  for (const auto& t : r.tolerances) mean += t.map;
  EXPECT_NEAR(r.average_map, mean / 5.0, 1e-15);
}

// ------------------------------------------------------------- properties

struct Instance {
  std::vector<GameDetections> dets;
  std::vector<AnnotationSet> labels;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> when(0.0, 60.0);
  std::uniform_int_distribution<int> count(0, 12);
  Instance inst;
  for (int g = 0; g < 3; ++g) {
    const std::string id = "game" + std::to_string(g);
    GameDetections gd{id, {"a", "b"}, {{}, {}}};
    AnnotationSet set{id, {}, std::nullopt};
    for (int c = 0; c < 2; ++c) {
      for (int k = count(rng); k > 0; --k) set.events.push_back({c, std::round(when(rng))});
      for (int k = count(rng); k > 0; --k) {
        gd.per_class[c].push_back({c, std::round(when(rng) * 2.0) / 2.0, std::round(unit(rng) * 8) / 8});
      }
    }
    inst.dets.push_back(gd);
    inst.labels.push_back(set);
  }
  // Guarantee at least one ground truth.
  inst.labels[0].events.push_back({0, 3.0});
  return inst;
}

TEST(EvalProperty, MatchingIsInjective) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> when(0.0, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> dets(trial % 15);
    for (auto& d : dets) d = {0, std::round(when(rng)), 0.5};
    std::vector<double> gt(trial % 7);
    for (auto& t : gt) t = std::round(when(rng));
    const auto m = match_detections(dets, gt, 3.0);
    const auto tp = static_cast<std::size_t>(std::count(m.true_positive.begin(), m.true_positive.end(), true));
    ASSERT_EQ(tp, m.matched);
    ASSERT_LE(tp, std::min(dets.size(), gt.size()));
  }
}

TEST(EvalProperty, DuplicatesMatchOnce) {
  const std::vector<Detection> dets(5, Detection{0, 10.0, 0.7});
  const std::vector<double> gt{10.0};
  const auto m = match_detections(dets, gt, 1.0);
  EXPECT_EQ(m.matched, 1u);
  EXPECT_TRUE(m.true_positive[0]);
}

TEST(EvalProperty, MonotoneTransformInvariance) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names{"a", "b"};
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_instance(rng);
    const auto before = average_map(inst.dets, inst.labels, names, ToleranceSchedule::tight());
    for (auto& g : inst.dets) {
      for (auto& cls : g.per_class) {
        for (auto& d : cls) d.confidence = std::sqrt(d.confidence) * 0.5;
      }
    }
    const auto after = average_map(inst.dets, inst.labels, names, ToleranceSchedule::tight());
    ASSERT_EQ(before.average_map, after.average_map);
    for (std::size_t k = 0; k < before.tolerances.size(); ++k) {
      ASSERT_EQ(before.tolerances[k].ap, after.tolerances[k].ap);
    }
  }
}

TEST(EvalProperty, SingleDeltaScheduleEqualsMapAtTolerance) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    const double delta = 1.0 + trial % 9;
    const auto single =
        average_map(inst.dets, inst.labels, {"a", "b"}, ToleranceSchedule({delta}));
    ASSERT_EQ(single.average_map, map_at_tolerance(inst.dets, inst.labels, 2, delta).map);
  }
}

TEST(EvalProperty, DeterministicUnderPermutation) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = random_instance(rng);
    const auto before = average_map(inst.dets, inst.labels, {"a", "b"}, ToleranceSchedule::loose());
    std::shuffle(inst.dets.begin(), inst.dets.end(), rng);
    std::shuffle(inst.labels.begin(), inst.labels.end(), rng);
    for (auto& g : inst.dets) {
      for (auto& cls : g.per_class) std::shuffle(cls.begin(), cls.end(), rng);
    }
    const auto after = average_map(inst.dets, inst.labels, {"a", "b"}, ToleranceSchedule::loose());
    ASSERT_EQ(before.average_map, after.average_map);
  }
}

TEST(EvalProperty, SerialAndParallelAgree) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng);
    const auto s = average_map(inst.dets, inst.labels, {"a", "b"}, ToleranceSchedule::tight(),
                               Execution::serial);
    const auto p = average_map(inst.dets, inst.labels, {"a", "b"}, ToleranceSchedule::tight(),
                               Execution::parallel);
    ASSERT_EQ(s.average_map, p.average_map);
  }
}

}  // namespace
}  // namespace spotkit
