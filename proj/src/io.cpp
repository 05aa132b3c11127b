#include "spotkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

#include "spotkit/error.hpp"

namespace spotkit::io {

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw Error((pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }
std::string child(const std::string& pointer, std::size_t index) {
  return pointer + "/" + std::to_string(index);
}

const Json& require(const Json& obj, const std::string& pointer, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(child(pointer, key), "missing required key");
  return *it;
}

double as_number(const Json& v, const std::string& pointer) {
  if (!v.is_number()) fail(pointer, "expected a number, got " + std::string(v.type_name()));
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(pointer, "expected a finite number");
  return x;
}

std::string as_string(const Json& v, const std::string& pointer) {
  if (!v.is_string()) fail(pointer, "expected a string, got " + std::string(v.type_name()));
  return v.get<std::string>();
}

long long as_integer(const Json& v, const std::string& pointer) {
  if (!v.is_number_integer()) fail(pointer, "expected an integer");
  return v.get<long long>();
}

void check_header(const Json& doc, const char* format) {
  if (!doc.is_object()) fail("", "expected a JSON object");
  const std::string got = as_string(require(doc, "", "format"), "/format");
  if (got != format) fail("/format", "expected \"" + std::string(format) + "\", got \"" + got + "\"");
  const long long version = as_integer(require(doc, "", "version"), "/version");
  if (version != kFormatVersion) {
    fail("/version", "unsupported version " + std::to_string(version) + " (expected 1)");
  }
}

std::vector<std::string> read_names(const Json& doc, const char* key) {
  const std::string pointer = child("", key);
  const Json& names = require(doc, "", key);
  if (!names.is_array()) fail(pointer, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back(as_string(names[i], child(pointer, i)));
  return out;
}

Matrix read_matrix(const Json& v, const std::string& pointer, std::size_t cols,
                   std::optional<std::size_t> rows, bool probabilities) {
  if (!v.is_array()) fail(pointer, "expected an array of rows");
  if (rows && v.size() != *rows) {
    fail(pointer, "shape mismatch: expected " + std::to_string(*rows) + " rows, got " +
                      std::to_string(v.size()));
  }
  std::vector<double> values;
  values.reserve(v.size() * cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row_ptr = child(pointer, i);
    const Json& row = v[i];
    if (!row.is_array()) fail(row_ptr, "expected a row array");
    if (row.size() != cols) {
      fail(row_ptr, "shape mismatch: expected " + std::to_string(cols) + " values, got " +
                        std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const auto ptr = child(row_ptr, c);
      const double x = as_number(row[c], ptr);
      if (probabilities && (x < 0.0 || x > 1.0)) {
        std::ostringstream msg;
        msg << "confidence " << x << " outside [0, 1]";
        fail(ptr, msg.str());
      }
      values.push_back(x);
    }
  }
  return Matrix(v.size(), cols, std::move(values));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

bool is_scalar(const Json& v) { return !v.is_structured(); }

bool is_flat(const Json& v) {
  if (is_scalar(v)) return true;
  return std::all_of(v.begin(), v.end(), [](const Json& e) { return is_scalar(e); });
}

void emit(const Json& v, std::string& out, int indent) {
  if (is_flat(v)) {
    out += v.dump();
    return;
  }
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const bool object = v.is_object();
  out += object ? "{\n" : "[\n";
  bool first = true;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!first) out += ",\n";
    first = false;
    out += pad;
    if (object) out += Json(it.key()).dump() + ": ";
    emit(*it, out, indent + 2);
  }
  out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + (object ? "}" : "]");
}

std::string fixed4(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << x;
  return s.str();
}

}  // namespace

std::string document_format(const Json& doc) {
  if (!doc.is_object()) return {};
  const auto it = doc.find("format");
  return it != doc.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

// ---------------------------------------------------------------- streams

Json stream_to_json(const ScoreStream& stream) {
  Json doc;
  doc["format"] = kStreamFormat;
  doc["version"] = kFormatVersion;
  doc["game_id"] = stream.game_id;
  doc["fps"] = stream.fps;
  doc["class_names"] = stream.class_names;
  doc["confidences"] = matrix_to_json(stream.confidences);
  if (stream.displacements) doc["displacements"] = matrix_to_json(*stream.displacements);
  return doc;
}

ScoreStream stream_from_json(const Json& doc) {
  check_header(doc, kStreamFormat);
  ScoreStream stream;
  stream.game_id = as_string(require(doc, "", "game_id"), "/game_id");
  stream.fps = as_number(require(doc, "", "fps"), "/fps");
  if (!(stream.fps > 0.0)) fail("/fps", "must be positive");
  stream.class_names = read_names(doc, "class_names");
  if (stream.class_names.empty()) fail("/class_names", "must not be empty");
  const std::size_t cols = stream.class_names.size();
  stream.confidences = read_matrix(require(doc, "", "confidences"), "/confidences", cols, {}, true);
  if (stream.confidences.rows() == 0) fail("/confidences", "must contain at least one anchor");
  if (const auto it = doc.find("displacements"); it != doc.end() && !it->is_null()) {
    stream.displacements =
        read_matrix(*it, "/displacements", cols, stream.confidences.rows(), false);
  }
  validate(stream);
  return stream;
}

ScoreStream read_stream(const std::filesystem::path& path) {
  try {
    return stream_from_json(read_json(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_stream(const ScoreStream& stream, const std::filesystem::path& path) {
  write_text_atomic(path, canonical_dump(stream_to_json(stream)));
}

// ------------------------------------------------------------- detections

Json detections_to_json(const GameDetections& detections) {
  Json doc;
  doc["format"] = kDetectionsFormat;
  doc["version"] = kFormatVersion;
  doc["game_id"] = detections.game_id;
  doc["class_names"] = detections.class_names;
  Json list = Json::array();
  for (const auto& dets : detections.per_class) {
    for (const auto& d : dets) {
      list.push_back({{"class", d.class_index}, {"time", d.time}, {"confidence", d.confidence}});
    }
  }
  doc["detections"] = std::move(list);
  return doc;
}

GameDetections detections_from_json(const Json& doc) {
  check_header(doc, kDetectionsFormat);
  GameDetections out;
  out.game_id = as_string(require(doc, "", "game_id"), "/game_id");
  out.class_names = read_names(doc, "class_names");
  out.per_class.resize(out.class_names.size());
  const Json& list = require(doc, "", "detections");
  if (!list.is_array()) fail("/detections", "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto ptr = child("/detections", i);
    const Json& item = list[i];
    if (!item.is_object()) fail(ptr, "expected an object");
    const long long cls = as_integer(require(item, ptr, "class"), child(ptr, "class"));
    if (cls < 0 || static_cast<std::size_t>(cls) >= out.class_names.size()) {
      fail(child(ptr, "class"), "class index " + std::to_string(cls) + " out of range");
    }
    const double time = as_number(require(item, ptr, "time"), child(ptr, "time"));
    if (time < 0.0) fail(child(ptr, "time"), "must be >= 0");
    const double conf = as_number(require(item, ptr, "confidence"), child(ptr, "confidence"));
    if (conf < 0.0 || conf > 1.0) fail(child(ptr, "confidence"), "outside [0, 1]");
    out.per_class[static_cast<std::size_t>(cls)].push_back({static_cast<int>(cls), time, conf});
  }
  return out;
}

GameDetections read_detections(const std::filesystem::path& path) {
  try {
    return detections_from_json(read_json(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_detections(const GameDetections& detections, const std::filesystem::path& path) {
  write_text_atomic(path, canonical_dump(detections_to_json(detections)));
}

// ----------------------------------------------------------------- labels

Json labels_to_json(const LabelDocument& labels) {
  Json doc;
  doc["format"] = kLabelsFormat;
  doc["version"] = kFormatVersion;
  doc["game_id"] = labels.game_id;
  if (labels.duration) doc["duration"] = *labels.duration;
  Json events = Json::array();
  for (const auto& ev : labels.events) {
    Json item{{"label", ev.label}, {"time", ev.time}};
    if (ev.half) item["half"] = *ev.half;
    if (ev.clock) item["clock"] = *ev.clock;
    events.push_back(std::move(item));
  }
  doc["events"] = std::move(events);
  return doc;
}

LabelDocument labels_from_json(const Json& doc) {
  check_header(doc, kLabelsFormat);
  LabelDocument out;
  out.game_id = as_string(require(doc, "", "game_id"), "/game_id");
  if (const auto it = doc.find("duration"); it != doc.end() && !it->is_null()) {
    out.duration = as_number(*it, "/duration");
  }
  const Json& events = require(doc, "", "events");
  if (!events.is_array()) fail("/events", "expected an array");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto ptr = child("/events", i);
    const Json& item = events[i];
    if (!item.is_object()) fail(ptr, "expected an object");
    LabelEvent ev;
    ev.label = as_string(require(item, ptr, "label"), child(ptr, "label"));
    ev.time = as_number(require(item, ptr, "time"), child(ptr, "time"));
    if (ev.time < 0.0) fail(child(ptr, "time"), "must be >= 0");
    if (const auto h = item.find("half"); h != item.end()) {
      ev.half = static_cast<int>(as_integer(*h, child(ptr, "half")));
    }
    if (const auto c = item.find("clock"); c != item.end()) {
      ev.clock = as_string(*c, child(ptr, "clock"));
    }
    out.events.push_back(std::move(ev));
  }
  return out;
}

LabelDocument read_labels(const std::filesystem::path& path) {
  try {
    return labels_from_json(read_json(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_labels(const LabelDocument& labels, const std::filesystem::path& path) {
  write_text_atomic(path, canonical_dump(labels_to_json(labels)));
}

AnnotationSet resolve_labels(const LabelDocument& labels,
                             const std::vector<std::string>& class_names) {
  AnnotationSet set{labels.game_id, {}, labels.duration};
  for (std::size_t i = 0; i < labels.events.size(); ++i) {
    const auto& ev = labels.events[i];
    const auto it = std::find(class_names.begin(), class_names.end(), ev.label);
    if (it == class_names.end()) {
      fail("/events/" + std::to_string(i) + "/label",
           "game '" + labels.game_id + "': unknown class \"" + ev.label + "\"");
    }
    set.events.push_back({static_cast<int>(it - class_names.begin()), ev.time});
  }
  return set;
}

LabelDocument to_label_document(const AnnotationSet& labels,
                                const std::vector<std::string>& class_names) {
  LabelDocument doc{labels.game_id, labels.duration, {}};
  for (const auto& ev : labels.events) {
    if (ev.class_index < 0 || static_cast<std::size_t>(ev.class_index) >= class_names.size()) {
      throw Error("event class index out of range");
    }
    doc.events.push_back({class_names[static_cast<std::size_t>(ev.class_index)], ev.time, {}, {}});
  }
  return doc;
}

// ----------------------------------------------------------------- report

Json report_to_json(const EvalReport& report) {
  Json doc;
  doc["format"] = kReportFormat;
  doc["version"] = kFormatVersion;
  doc["average_map"] = report.average_map;
  doc["class_names"] = report.class_names;
  Json excluded = Json::array();
  for (const int c : report.excluded_classes) excluded.push_back(report.class_names[c]);
  doc["excluded_classes"] = std::move(excluded);
  Json deltas = Json::array();
  Json tolerances = Json::array();
  for (const auto& tol : report.tolerances) {
    deltas.push_back(tol.delta);
    Json ap = Json::array();
    for (const auto& v : tol.ap) ap.push_back(v ? Json(*v) : Json(nullptr));
    tolerances.push_back({{"delta", tol.delta}, {"map", tol.map}, {"ap", std::move(ap)}});
  }
  doc["schedule"] = {{"name", report.schedule_name}, {"deltas", std::move(deltas)}};
  doc["tolerances"] = std::move(tolerances);
  Json config = Json::object();
  for (const auto& [key, value] : report.config) config[key] = value;
  config["games"] = report.num_games;
  config["detections"] = report.num_detections;
  config["ground_truth"] = report.num_ground_truth;
  doc["config"] = std::move(config);
  return doc;
}

std::string format_report(const EvalReport& report) {
  std::vector<std::string> header{"delta", "mAP"};
  for (const auto& name : report.class_names) header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  for (const auto& tol : report.tolerances) {
    std::ostringstream delta;
    delta << tol.delta;
    std::vector<std::string> row{delta.str(), fixed4(tol.map)};
    for (const auto& v : tol.ap) row.push_back(v ? fixed4(*v) : "-");
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  out << "average-mAP (" << report.schedule_name << "): " << fixed4(report.average_map) << "\n";
  const auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c == 0 ? "" : "  ") << std::setw(static_cast<int>(width[c]))
          << (c == 0 ? std::left : std::right) << row[c];
    }
    out << "\n";
  };
  print_row(header);
  for (const auto& row : rows) print_row(row);
  if (!report.excluded_classes.empty()) {
    out << "excluded (no ground truth):";
    for (const int c : report.excluded_classes) out << " " << report.class_names[c];
    out << "\n";
  }
  return out.str();
}

// ------------------------------------------------------------------ files

std::string canonical_dump(const Json& doc) {
  std::string out;
  emit(doc, out, 0);
  out += "\n";
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::vector<std::filesystem::path> expand_inputs(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    return files;
  }
  if (!std::filesystem::exists(path)) throw Error("no such file or directory: " + path.string());
  return {path};
}

}  // namespace spotkit::io
