#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "spotkit/error.hpp"
#include "spotkit/fuse.hpp"
#include "spotkit/io.hpp"
#include "spotkit/pipeline.hpp"
#include "spotkit/resample.hpp"
#include "spotkit/soccernet.hpp"
#include "spotkit/spotting.hpp"
#include "spotkit/suppress.hpp"
#include "spotkit/synth.hpp"

namespace spotkit::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    try {
      values.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (values.empty()) throw UsageError(flag + ": expected a comma separated list");
  return values;
}

std::vector<std::string> parse_names(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return names;
}

// A directory input maps file-by-file onto an output directory.
struct Job {
  fs::path in;
  fs::path out;
};

std::vector<Job> plan_jobs(const fs::path& in, const fs::path& out) {
  if (!fs::is_directory(in)) return {{in, out}};
  std::vector<Job> jobs;
  for (const auto& file : io::expand_inputs(in)) jobs.push_back({file, out / file.filename()});
  if (jobs.empty()) throw Error("no .json files in " + in.string());
  return jobs;
}

std::vector<ScoreStream> load_streams(const fs::path& path) {
  const auto files = io::expand_inputs(path);
  std::vector<ScoreStream> streams(files.size());
  for_each_index(files.size(), Execution::parallel,
                 [&](std::size_t i) { streams[i] = io::read_stream(files[i]); });
  if (streams.empty()) throw Error("no streams found in " + path.string());
  return streams;
}

std::vector<GameDetections> load_detections(const fs::path& path) {
  const auto files = io::expand_inputs(path);
  std::vector<GameDetections> games(files.size());
  for_each_index(files.size(), Execution::parallel,
                 [&](std::size_t i) { games[i] = io::read_detections(files[i]); });
  if (games.empty()) throw Error("no detection files found in " + path.string());
  return games;
}

std::vector<AnnotationSet> load_labels(const fs::path& path,
                                       const std::vector<std::string>& class_names) {
  std::vector<AnnotationSet> sets;
  for (const auto& file : io::expand_inputs(path)) {
    try {
      sets.push_back(io::resolve_labels(io::read_labels(file), class_names));
    } catch (const Error& e) {
      const std::string what = e.what();
      throw Error(what.rfind(file.string(), 0) == 0 ? what : file.string() + ": " + what);
    }
  }
  if (sets.empty()) throw Error("no label files found in " + path.string());
  return sets;
}

const std::vector<std::string>& common_classes(const std::vector<GameDetections>& games) {
  for (const auto& g : games) {
    if (g.class_names != games.front().class_names) {
      throw Error("game '" + g.game_id + "' uses a different class list than '" +
                  games.front().game_id + "'");
    }
  }
  return games.front().class_names;
}

fs::path output_for(const fs::path& out, const std::string& game_id, bool many) {
  return many || fs::is_directory(out) ? out / (game_id + ".json") : out;
}

Json sweep_to_json(const std::vector<SweepRow>& table, const char* key, double best_value,
                   double best_score) {
  Json rows = Json::array();
  for (const auto& row : table) rows.push_back({{key, row.value}, {"score", row.score}});
  return {{"table", std::move(rows)},
          {std::string("best_") + key, best_value},
          {"best_score", best_score}};
}

std::string format_table(const std::vector<SweepRow>& table, const char* label) {
  std::ostringstream out;
  out << label << "  average-mAP\n";
  for (const auto& row : table) {
    std::ostringstream value;
    value << row.value;
    out << std::left << std::setw(static_cast<int>(std::string(label).size())) << value.str()
        << "  " << std::fixed << std::setprecision(4) << row.score << "\n";
    out.unsetf(std::ios::floatfield);
    out << std::right;
  }
  return out.str();
}

// --------------------------------------------------------------- commands

struct ResampleArgs {
  std::string in, out;
  double fps = 2.0;
};

void cmd_resample(const ResampleArgs& a) {
  const auto jobs = plan_jobs(a.in, a.out);
  for_each_index(jobs.size(), Execution::parallel, [&](std::size_t i) {
    io::write_stream(resample_stream(io::read_stream(jobs[i].in), a.fps), jobs[i].out);
  });
}

struct SpotArgs {
  std::string in, out;
  double threshold = 0.0;
};

void cmd_spot(const SpotArgs& a) {
  if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  const auto jobs = plan_jobs(a.in, a.out);
  for_each_index(jobs.size(), Execution::parallel, [&](std::size_t i) {
    const auto dets = displace(io::read_stream(jobs[i].in));
    io::write_detections(threshold_detections(dets, a.threshold), jobs[i].out);
  });
}

struct SuppressArgs {
  std::string in, out, method = "soft";
  std::optional<double> window;
  double floor = 0.0;
};

SuppressionConfig make_suppression(const std::string& method, std::optional<double> window,
                                   double floor) {
  SuppressionConfig cfg;
  try {
    cfg.method = parse_suppression_method(method);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg = cfg.method == SuppressionMethod::hard ? SuppressionConfig::hard_default()
                                              : SuppressionConfig::soft_default();
  if (window) cfg.window = *window;
  cfg.floor = floor;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void cmd_suppress(const SuppressArgs& a) {
  const auto cfg = make_suppression(a.method, a.window, a.floor);
  const auto jobs = plan_jobs(a.in, a.out);
  for_each_index(jobs.size(), Execution::parallel, [&](std::size_t i) {
    const GameDetections game = io::read_detections(jobs[i].in);
    io::write_detections(suppress_all(std::span(&game, 1), cfg, Execution::serial).front(),
                         jobs[i].out);
  });
}

ToleranceSchedule make_schedule(const std::string& text) {
  try {
    return ToleranceSchedule::parse(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct EvaluateArgs {
  std::string dets, labels, schedule = "tight", json_out;
};

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto schedule = make_schedule(a.schedule);
  const auto games = load_detections(a.dets);
  const auto& classes = common_classes(games);
  const auto labels = load_labels(a.labels, classes);
  auto report = average_map(games, labels, classes, schedule);
  report.config["schedule"] = schedule.name();
  out << io::format_report(report);
  if (!a.json_out.empty()) io::write_text_atomic(a.json_out, io::canonical_dump(io::report_to_json(report)));
}

struct SweepArgs {
  std::string in, labels, method = "hard", windows, schedule = "tight", json_out;
  double floor = 0.0;
  double threshold = 0.0;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto schedule = make_schedule(a.schedule);
  const auto windows = parse_numbers(a.windows, "--windows");
  const auto cfg = make_suppression(a.method, windows.front(), a.floor);

  // Accepts score streams (spotted here) or raw detection files.
  std::vector<GameDetections> raw;
  const auto files = io::expand_inputs(a.in);
  if (files.empty()) throw Error("no inputs found in " + a.in);
  if (io::document_format(io::read_json(files.front())) == io::kStreamFormat) {
    raw = spot_all(load_streams(a.in), a.threshold);
  } else {
    raw = load_detections(a.in);
    if (a.threshold > 0.0) {
      for (auto& game : raw) game = threshold_detections(game, a.threshold);
    }
  }
  const auto& classes = common_classes(raw);
  const auto labels = load_labels(a.labels, classes);
  const auto sweep = sweep_window(raw, labels, windows, cfg.method, schedule, cfg.floor);

  out << "method: " << to_string(cfg.method) << ", schedule: " << schedule.name() << "\n";
  out << format_table(sweep.table, "window");
  out << "best window: " << sweep.best_window << " (average-mAP " << std::fixed
      << std::setprecision(4) << sweep.best_score << ")\n";
  out.unsetf(std::ios::floatfield);
  if (!a.json_out.empty()) {
    Json doc = sweep_to_json(sweep.table, "window", sweep.best_window, sweep.best_score);
    doc["format"] = "spotkit.window_sweep";
    doc["version"] = io::kFormatVersion;
    doc["method"] = to_string(cfg.method);
    doc["floor"] = cfg.floor;
    doc["schedule"] = {{"name", schedule.name()},
                       {"deltas", std::vector<double>(schedule.deltas().begin(), schedule.deltas().end())}};
    io::write_text_atomic(a.json_out, io::canonical_dump(doc));
  }
}

struct FuseArgs {
  std::string a, b, out, labels, json_out;
  std::optional<double> weight_a;
  bool search = false;
  double grid_step = 0.05;
  std::string method = "soft", schedule = "tight";
  std::optional<double> window;
  double floor = 0.0;
  double threshold = 0.0;
};

std::vector<StreamPair> pair_streams(std::vector<ScoreStream> as, std::vector<ScoreStream> bs) {
  std::map<std::string, ScoreStream> by_id;
  for (auto& s : bs) {
    const std::string id = s.game_id;
    if (!by_id.emplace(id, std::move(s)).second) throw Error("duplicate game '" + id + "' in --b");
  }
  std::vector<StreamPair> pairs;
  for (auto& s : as) {
    const auto it = by_id.find(s.game_id);
    if (it == by_id.end()) throw Error("game '" + s.game_id + "' missing from --b");
    pairs.push_back({std::move(s), std::move(it->second)});
    by_id.erase(it);
  }
  if (!by_id.empty()) throw Error("game '" + by_id.begin()->first + "' missing from --a");
  return pairs;
}

void cmd_fuse(const FuseArgs& a, std::ostream& out) {
  if (a.search == a.weight_a.has_value()) {
    throw UsageError("fuse needs exactly one of --weight-a or --search");
  }
  if (!a.search && a.out.empty()) throw UsageError("fuse --weight-a needs --out");
  if (a.search && a.labels.empty()) throw UsageError("fuse --search needs --labels");
  const auto pairs = pair_streams(load_streams(a.a), load_streams(a.b));

  FusionWeights weights;
  if (a.search) {
    PipelineConfig cfg;
    cfg.threshold = a.threshold;
    cfg.suppression = make_suppression(a.method, a.window, a.floor);
    cfg.schedule = make_schedule(a.schedule);
    if (!(a.grid_step > 0.0 && a.grid_step <= 0.5)) throw UsageError("--grid-step must lie in (0, 0.5]");
    const auto labels = load_labels(a.labels, pairs.front().a.class_names);
    const auto result = search_fusion_weight(pairs, labels, cfg, a.grid_step);
    weights = result.best;
    out << format_table(result.table, "weight_a");
    out << "best weight_a: " << result.best.weight_a << " (average-mAP " << std::fixed
        << std::setprecision(4) << result.best_score << ")\n";
    out.unsetf(std::ios::floatfield);
    if (!a.json_out.empty()) {
      Json doc = sweep_to_json(result.table, "weight_a", result.best.weight_a, result.best_score);
      doc["format"] = "spotkit.fusion_search";
      doc["version"] = io::kFormatVersion;
      doc["grid_step"] = a.grid_step;
      io::write_text_atomic(a.json_out, io::canonical_dump(doc));
    }
  } else {
    weights.weight_a = *a.weight_a;
    if (!(weights.weight_a >= 0.0 && weights.weight_a <= 1.0)) {
      throw UsageError("--weight-a must lie in [0, 1]");
    }
  }
  if (a.out.empty()) return;
  const bool many = pairs.size() > 1 || fs::is_directory(a.a);
  for_each_index(pairs.size(), Execution::parallel, [&](std::size_t i) {
    const auto fused = fuse_streams(pairs[i].a, pairs[i].b, weights);
    io::write_stream(fused, output_for(a.out, fused.game_id, many));
  });
}

struct SynthArgs {
  std::string config, out_dir;
};

void cmd_synth(const SynthArgs& a) {
  const SynthConfig cfg = synth_config_from_json(io::read_json(a.config));
  const SynthData data = synth_generate(cfg);
  const fs::path root(a.out_dir);
  for_each_index(data.streams.size(), Execution::parallel, [&](std::size_t g) {
    const auto& stream = data.streams[g];
    io::write_stream(stream, root / "streams" / (stream.game_id + ".json"));
    io::write_labels(io::to_label_document(data.labels[g], cfg.classes),
                     root / "labels" / (stream.game_id + ".json"));
  });
  io::write_text_atomic(root / "synth_config.json", io::canonical_dump(synth_config_to_json(cfg)));
}

struct ImportArgs {
  std::string in, out, game_id, classes, class_map, half_offsets;
};

void cmd_import(const ImportArgs& a, std::ostream& err) {
  SoccerNetImportOptions options;
  options.game_id = a.game_id.empty() ? fs::path(a.in).parent_path().filename().string() : a.game_id;
  if (options.game_id.empty()) options.game_id = fs::path(a.in).stem().string();
  if (a.classes.empty() == a.class_map.empty()) {
    throw UsageError("import-labels needs exactly one of --classes or --class-map");
  }
  if (!a.classes.empty()) {
    for (const auto& name : parse_names(a.classes)) options.class_dictionary[name] = name;
  } else {
    const Json map = io::read_json(a.class_map);
    if (!map.is_object()) throw Error(a.class_map + ": expected an object of label -> class");
    for (const auto& [label, cls] : map.items()) {
      if (!cls.is_string()) throw Error(a.class_map + ": class for '" + label + "' must be a string");
      options.class_dictionary[label] = cls.get<std::string>();
    }
  }
  if (!a.half_offsets.empty()) {
    std::map<int, double> offsets;
    for (const auto& item : parse_names(a.half_offsets)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw UsageError("--half-offsets expects half:seconds pairs");
      try {
        offsets[std::stoi(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("--half-offsets: cannot parse '" + item + "'");
      }
    }
    options.half_offsets = std::move(offsets);
  }
  const auto result = import_soccernet_labels(fs::path(a.in), options);
  for (const auto& warning : result.warnings) err << "warning: " << warning << "\n";
  for (const auto& doc : result.games) io::write_labels(doc, fs::path(a.out) / (doc.game_id + ".json"));
}

void report_error(std::ostream& err, bool json, int code, const std::string& message) {
  if (json) {
    const Json doc{{"error",
                    {{"exit_code", code},
                     {"kind", code == kExitUsage ? "usage" : "data"},
                     {"message", message}}}};
    err << doc.dump() << "\n";
  } else {
    err << "error: " << message << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dense-anchor action spotting: resample, spot, suppress, fuse and evaluate"};
  app.name("spotkit");
  app.require_subcommand(1);
  app.fallthrough();
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "Report errors as JSON on stderr");

  ResampleArgs resample;
  auto* c_resample = app.add_subcommand("resample", "Linearly resample score streams");
  c_resample->add_option("--in", resample.in, "Stream file or directory")->required();
  c_resample->add_option("--out", resample.out, "Output file or directory")->required();
  c_resample->add_option("--fps", resample.fps, "Target anchors per second")->required();

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "Late fusion of two streams in logit space");
  c_fuse->add_option("--a", fuse.a, "Stream(s) supplying displacements")->required();
  c_fuse->add_option("--b", fuse.b, "Second stream(s)")->required();
  c_fuse->add_option("--out", fuse.out, "Fused stream file or directory");
  c_fuse->add_option("--weight-a", fuse.weight_a, "Weight of stream a in [0, 1]");
  c_fuse->add_flag("--search", fuse.search, "Search the weight on labelled data");
  c_fuse->add_option("--labels", fuse.labels, "Label file or directory (with --search)");
  c_fuse->add_option("--grid-step", fuse.grid_step, "Weight grid step");
  c_fuse->add_option("--method", fuse.method, "Suppression method for the search");
  c_fuse->add_option("--window", fuse.window, "Suppression window for the search");
  c_fuse->add_option("--floor", fuse.floor, "Suppression floor for the search");
  c_fuse->add_option("--threshold", fuse.threshold, "Detection threshold for the search");
  c_fuse->add_option("--schedule", fuse.schedule, "tight, loose or comma separated deltas");
  c_fuse->add_option("--json-out", fuse.json_out, "Write the search table as JSON");

  SpotArgs spot;
  auto* c_spot = app.add_subcommand("spot", "Displace anchors into detections");
  c_spot->add_option("--in", spot.in, "Stream file or directory")->required();
  c_spot->add_option("--out", spot.out, "Detections file or directory")->required();
  c_spot->add_option("--threshold", spot.threshold, "Drop detections below this confidence");

  SuppressArgs suppress;
  auto* c_suppress = app.add_subcommand("suppress", "Per-class NMS or Soft-NMS");
  c_suppress->add_option("--in", suppress.in, "Detections file or directory")->required();
  c_suppress->add_option("--out", suppress.out, "Output file or directory")->required();
  c_suppress->add_option("--method", suppress.method, "hard or soft");
  c_suppress->add_option("--window", suppress.window, "Window size in seconds");
  c_suppress->add_option("--floor", suppress.floor, "Drop confidences below this");

  EvaluateArgs evaluate;
  auto* c_evaluate = app.add_subcommand("evaluate", "Average-mAP of detections against labels");
  c_evaluate->add_option("--dets", evaluate.dets, "Detections file or directory")->required();
  c_evaluate->add_option("--labels", evaluate.labels, "Label file or directory")->required();
  c_evaluate->add_option("--schedule", evaluate.schedule, "tight, loose or comma separated deltas");
  c_evaluate->add_option("--json-out", evaluate.json_out, "Write the report as JSON");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Choose the suppression window by average-mAP");
  c_sweep->add_option("--in", sweep.in, "Streams or raw detections")->required();
  c_sweep->add_option("--labels", sweep.labels, "Label file or directory")->required();
  c_sweep->add_option("--method", sweep.method, "hard or soft");
  c_sweep->add_option("--windows", sweep.windows, "Comma separated candidate windows")->required();
  c_sweep->add_option("--schedule", sweep.schedule, "tight, loose or comma separated deltas");
  c_sweep->add_option("--floor", sweep.floor, "Suppression floor");
  c_sweep->add_option("--threshold", sweep.threshold, "Detection threshold");
  c_sweep->add_option("--json-out", sweep.json_out, "Write the sweep table as JSON");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic labelled fixture");
  c_synth->add_option("--config", synth.config, "Synth configuration JSON")->required();
  c_synth->add_option("--out-dir", synth.out_dir, "Output directory")->required();

  ImportArgs import;
  auto* c_import = app.add_subcommand("import-labels", "Convert SoccerNet-style annotations");
  c_import->add_option("--in", import.in, "Annotation JSON")->required();
  c_import->add_option("--out", import.out, "Output directory")->required();
  c_import->add_option("--game-id", import.game_id, "Game id (default: parent directory name)");
  c_import->add_option("--classes", import.classes, "Comma separated class names");
  c_import->add_option("--class-map", import.class_map, "JSON object mapping label -> class");
  c_import->add_option("--half-offsets", import.half_offsets, "e.g. 1:0,2:2700 to merge halves");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    json_errors = json_errors || std::find(args.begin(), args.end(), "--json-errors") != args.end();
    report_error(err, json_errors, kExitUsage, e.what());
    return kExitUsage;
  }

  try {
    if (c_resample->parsed()) cmd_resample(resample);
    if (c_fuse->parsed()) cmd_fuse(fuse, out);
    if (c_spot->parsed()) cmd_spot(spot);
    if (c_suppress->parsed()) cmd_suppress(suppress);
    if (c_evaluate->parsed()) cmd_evaluate(evaluate, out);
    if (c_sweep->parsed()) cmd_sweep(sweep, out);
    if (c_synth->parsed()) cmd_synth(synth);
    if (c_import->parsed()) cmd_import(import, err);
  } catch (const UsageError& e) {
    report_error(err, json_errors, kExitUsage, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    report_error(err, json_errors, kExitData, e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace spotkit::cli
