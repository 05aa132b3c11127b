#include <cstdio>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "spotkit/io.hpp"
#include "spotkit/synth.hpp"

namespace spotkit {
namespace {

namespace fs = std::filesystem;
using io::Json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Writes a synth config and generates the fixture through the CLI.
fs::path make_fixture(const std::string& name, const SynthConfig& cfg) {
  const auto dir = testing::scratch_dir(name);
  io::write_text_atomic(dir / "cfg.json", io::canonical_dump(synth_config_to_json(cfg)));
  const auto r = run({"synth", "--config", (dir / "cfg.json").string(), "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir;
}

fs::path three_detections(const fs::path& dir) {
  GameDetections g{"g", {"c"}, {{{0, 10.0, 0.9}, {0, 12.0, 0.8}, {0, 14.0, 0.7}}}};
  const auto path = dir / "three.json";
  io::write_detections(g, path);
  return path;
}

TEST(Cli, PerfectFixtureEvaluatesToOne) {
  SynthConfig cfg;
  cfg.num_games = 2;
  const auto dir = make_fixture("cli_perfect", cfg);
  ASSERT_EQ(run({"spot", "--in", (dir / "streams").string(), "--out", (dir / "raw").string()}).code, 0);
  ASSERT_EQ(run({"suppress", "--in", (dir / "raw").string(), "--out", (dir / "dets").string(),
                 "--method", "soft", "--window", "8"})
                .code,
            0);
  for (const std::string schedule : {"tight", "loose"}) {
    const auto r = run({"evaluate", "--dets", (dir / "dets").string(), "--labels",
                        (dir / "labels").string(), "--schedule", schedule, "--json-out",
                        (dir / ("report_" + schedule + ".json")).string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("average-mAP (" + schedule + "): 1.0000"), std::string::npos) << r.out;
    const auto report = io::read_json(dir / ("report_" + schedule + ".json"));
    EXPECT_EQ(report["average_map"], 1.0);
  }
}

TEST(Cli, SoftSuppressionOfThreeDetections) {
  const auto dir = testing::scratch_dir("cli_three");
  const auto in = three_detections(dir);
  const auto r = run({"suppress", "--in", in.string(), "--out", (dir / "out.json").string(),
                      "--method", "soft", "--window", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = io::read_detections(dir / "out.json");
  ASSERT_EQ(out.per_class[0].size(), 3u);
  EXPECT_EQ(out.per_class[0][0].confidence, 0.9);
  EXPECT_EQ(out.per_class[0][1].confidence, 0.7);
  EXPECT_EQ(out.per_class[0][2].confidence, 0.2);
  ASSERT_EQ(run({"suppress", "--in", in.string(), "--out", (dir / "hard.json").string(),
                 "--method", "hard", "--window", "8"})
                .code,
            0);
  EXPECT_EQ(io::read_detections(dir / "hard.json").per_class[0].size(), 2u);
}

TEST(Cli, SweepSingleWindow) {
  SynthConfig cfg;
  cfg.num_games = 2;
  cfg.noise = 0.2;
  const auto dir = make_fixture("cli_sweep", cfg);
  const auto r = run({"sweep", "--in", (dir / "streams").string(), "--labels",
                      (dir / "labels").string(), "--windows", "3", "--json-out",
                      (dir / "sweep.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("best window: 3"), std::string::npos) << r.out;
  const auto doc = io::read_json(dir / "sweep.json");
  EXPECT_EQ(doc["table"].size(), 1u);
  EXPECT_EQ(doc["best_window"], 3.0);
}

TEST(Cli, FuseAndResample) {
  SynthConfig cfg;
  cfg.num_games = 2;
  cfg.noise = 0.2;
  const auto dir = make_fixture("cli_fuse", cfg);
  const auto streams = (dir / "streams").string();
  auto r = run({"fuse", "--a", streams, "--b", streams, "--weight-a", "0.5", "--out",
                (dir / "fused").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "fused" / "game_0000.json"));
  r = run({"fuse", "--a", streams, "--b", streams, "--search", "--labels",
           (dir / "labels").string(), "--grid-step", "0.5", "--json-out",
           (dir / "fusion.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_json(dir / "fusion.json")["table"].size(), 3u);
  r = run({"resample", "--in", streams, "--out", (dir / "2hz").string(), "--fps", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_stream(dir / "2hz" / "game_0001.json").fps, 2.0);
}

TEST(Cli, ImportLabels) {
  const auto dir = testing::scratch_dir("cli_import");
  const Json doc = {{"annotations",
                     {{{"label", "Goal"}, {"gameTime", "1 - 12:34"}},
                      {{"label", "Other"}, {"gameTime", "2 - 00:10"}}}}};
  io::write_text_atomic(dir / "Labels.json", doc.dump());
  const auto r = run({"import-labels", "--in", (dir / "Labels.json").string(), "--out",
                      (dir / "out").string(), "--game-id", "m", "--classes", "Goal",
                      "--half-offsets", "1:0,2:2700"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("Other"), std::string::npos);
  EXPECT_EQ(io::read_labels(dir / "out" / "m.json").events[0].time, 754.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"suppress", "--in", "x.json"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"evaluate", "--dets", "/nonexistent/d", "--labels", "/nonexistent/l",
                 "--schedule", "tight"})
                .code,
            cli::kExitData);
  const auto dir = testing::scratch_dir("cli_codes");
  const auto in = three_detections(dir);
  EXPECT_EQ(run({"suppress", "--in", in.string(), "--out", (dir / "o.json").string(), "--method",
                 "gaussian"})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run({"evaluate", "--dets", in.string(), "--labels", in.string(), "--schedule", "1,x"})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, JsonErrors) {
  const auto dir = testing::scratch_dir("cli_json_errors");
  ScoreStream s{"g", {"a", "b"}, 1.0, Matrix(4, 2, 0.5), std::nullopt};
  auto doc = io::stream_to_json(s);
  doc["confidences"][3][1] = 1.3;
  io::write_text_atomic(dir / "bad.json", doc.dump());
  const auto r = run({"spot", "--in", (dir / "bad.json").string(), "--out",
                      (dir / "o.json").string(), "--json-errors"});
  EXPECT_EQ(r.code, cli::kExitData);
  const auto err = Json::parse(r.err);
  EXPECT_EQ(err["error"]["exit_code"], 2);
  EXPECT_EQ(err["error"]["kind"], "data");
  EXPECT_NE(err["error"]["message"].get<std::string>().find("/confidences/3/1"), std::string::npos);

  const auto usage = run({"--json-errors", "spot"});
  EXPECT_EQ(usage.code, cli::kExitUsage);
  EXPECT_EQ(Json::parse(usage.err)["error"]["kind"], "usage");
}

TEST(Cli, BinaryMatchesLibraryEntryPoint) {
  const auto dir = testing::scratch_dir("cli_binary");
  const auto in = three_detections(dir);
  const std::string cmd = std::string(SPOTKIT_CLI_PATH) + " suppress --in " + in.string() +
                          " --out " + (dir / "bin.json").string() + " --method soft --window 8";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  ASSERT_EQ(run({"suppress", "--in", in.string(), "--out", (dir / "lib.json").string(), "--method",
                 "soft", "--window", "8"})
                .code,
            0);
  EXPECT_EQ(testing::slurp(dir / "bin.json"), testing::slurp(dir / "lib.json"));
  const std::string bad = std::string(SPOTKIT_CLI_PATH) + " evaluate --dets " + in.string() +
                          " > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}

}  // namespace
}  // namespace spotkit
