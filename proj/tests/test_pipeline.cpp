#include <algorithm>

#include <gtest/gtest.h>

#include "spotkit/error.hpp"
#include "spotkit/pipeline.hpp"
#include "spotkit/spotting.hpp"
#include "spotkit/synth.hpp"

namespace spotkit {
namespace {

SynthConfig side_lobe_fixture() {
  SynthConfig cfg;
  cfg.seed = 5;
  cfg.num_games = 4;
  cfg.duration = 900;
  cfg.events_per_class = 8;
  cfg.min_separation = 40;
  cfg.noise = 0.1;
  cfg.jitter = 0.6;
  cfg.displacement_noise = 1.2;
  cfg.side_lobe_width = 10;
  return cfg;
}

TEST(SweepWindow, SingleCandidateIsBest) {
  const auto data = synth_generate(side_lobe_fixture());
  const auto raw = spot_all(data.streams, 0.0);
  const std::vector<double> windows{3.0};
  const auto sweep =
      sweep_window(raw, data.labels, windows, SuppressionMethod::hard, ToleranceSchedule::tight());
  ASSERT_EQ(sweep.table.size(), 1u);
  EXPECT_EQ(sweep.best_window, 3.0);
  EXPECT_EQ(sweep.best_score, sweep.table[0].score);
}

TEST(SweepWindow, TableIsSelfConsistentAndTightPrefersSmallWindows) {
  const auto data = synth_generate(side_lobe_fixture());
  const auto raw = spot_all(data.streams, 0.0);
  const std::vector<double> windows{1.0, 3.0, 8.0, 20.0};
  const auto sweep =
      sweep_window(raw, data.labels, windows, SuppressionMethod::hard, ToleranceSchedule::tight());
  ASSERT_EQ(sweep.table.size(), windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) EXPECT_EQ(sweep.table[k].value, windows[k]);
  const auto best = std::max_element(sweep.table.begin(), sweep.table.end(),
                                     [](auto& a, auto& b) { return a.score < b.score; });
  EXPECT_EQ(sweep.best_score, best->score);
  EXPECT_LE(sweep.best_window, 8.0);
}

TEST(SweepWindow, MatchesDirectEvaluation) {
  const auto data = synth_generate(side_lobe_fixture());
  const auto raw = spot_all(data.streams, 0.0);
  const std::vector<double> windows{2.0, 6.0};
  const auto sweep =
      sweep_window(raw, data.labels, windows, SuppressionMethod::soft, ToleranceSchedule::loose());
  for (const auto& row : sweep.table) {
    PipelineConfig cfg{0.0, {SuppressionMethod::soft, row.value, 0.0}, ToleranceSchedule::loose()};
    EXPECT_EQ(row.score, evaluate_streams(data.streams, data.labels, cfg).average_map);
  }
}

TEST(SweepWindow, Errors) {
  const auto data = synth_generate(side_lobe_fixture());
  const auto raw = spot_all(data.streams, 0.0);
  EXPECT_THROW(sweep_window(raw, data.labels, {}, SuppressionMethod::hard, ToleranceSchedule::tight()),
               Error);
  const std::vector<double> bad{-1.0};
  EXPECT_THROW(sweep_window(raw, data.labels, bad, SuppressionMethod::hard, ToleranceSchedule::tight()),
               Error);
}

TEST(FusionGrid, Construction) {
  EXPECT_EQ(fusion_grid(0.5), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(fusion_grid(0.05).size(), 21u);
  EXPECT_EQ(fusion_grid(0.3), (std::vector<double>{0.0, 0.3, 0.6, 0.8999999999999999, 1.0}));
  EXPECT_THROW(fusion_grid(0.0), Error);
  EXPECT_THROW(fusion_grid(0.6), Error);
}

std::vector<StreamPair> pair_up(const SynthData& a, const SynthData& b) {
  std::vector<StreamPair> pairs;
  for (std::size_t g = 0; g < a.streams.size(); ++g) pairs.push_back({a.streams[g], b.streams[g]});
  return pairs;
}

TEST(SearchFusionWeight, IdenticalStreamsGiveConstantTable) {
  auto cfg = side_lobe_fixture();
  cfg.num_games = 2;
  const auto data = synth_generate(cfg);
  const auto search = search_fusion_weight(pair_up(data, data), data.labels, PipelineConfig{}, 0.25);
  ASSERT_EQ(search.table.size(), 5u);
  for (const auto& row : search.table) EXPECT_NEAR(row.score, search.table[0].score, 1e-12);
  EXPECT_EQ(search.best.weight_a, 0.0);
}

TEST(SearchFusionWeight, PrefersStrongStreamOverNoise) {
  SynthConfig strong;
  strong.seed = 17;
  strong.num_games = 4;
  strong.noise = 0.05;
  strong.jitter = 0.3;
  SynthConfig noise = strong;
  noise.noise = 1.0;
  noise.noise_seed = 99;
  const auto a = synth_generate(strong);
  const auto b = synth_generate(noise);
  ASSERT_EQ(a.labels, b.labels);
  const auto search = search_fusion_weight(pair_up(a, b), a.labels, PipelineConfig{}, 0.1);
  EXPECT_GE(search.best.weight_a, 0.8);
  const auto best = std::max_element(search.table.begin(), search.table.end(),
                                     [](auto& x, auto& y) { return x.score < y.score; });
  EXPECT_EQ(search.best_score, best->score);
}

TEST(SearchFusionWeight, EmptyValidationSetRejected) {
  EXPECT_THROW(search_fusion_weight({}, {}, PipelineConfig{}), Error);
}

TEST(Pipeline, SerialAndParallelAgree) {
  const auto data = synth_generate(side_lobe_fixture());
  const auto raw = spot_all(data.streams, 0.0);
  const std::vector<double> windows{1.0, 4.0, 12.0};
  const auto s = sweep_window(raw, data.labels, windows, SuppressionMethod::soft,
                              ToleranceSchedule::tight(), 0.0, Execution::serial);
  const auto p = sweep_window(raw, data.labels, windows, SuppressionMethod::soft,
                              ToleranceSchedule::tight(), 0.0, Execution::parallel);
  for (std::size_t k = 0; k < windows.size(); ++k) EXPECT_EQ(s.table[k].score, p.table[k].score);
}

}  // namespace
}  // namespace spotkit
