#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spotkit/eval.hpp"
#include "spotkit/types.hpp"

// On-disk formats. Every document is a JSON object with "format" and
// "version" keys; see docs/formats.md. Emission is canonical: sorted keys,
// shortest round-trip number formatting, fixed layout.
namespace spotkit::io {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kStreamFormat = "spotkit.stream";
inline constexpr const char* kDetectionsFormat = "spotkit.detections";
inline constexpr const char* kLabelsFormat = "spotkit.labels";
inline constexpr const char* kReportFormat = "spotkit.eval_report";

/// Value of the "format" key, or an empty string.
std::string document_format(const Json& doc);

Json stream_to_json(const ScoreStream& stream);
/// Errors name the JSON pointer of the offending value.
ScoreStream stream_from_json(const Json& doc);
ScoreStream read_stream(const std::filesystem::path& path);
void write_stream(const ScoreStream& stream, const std::filesystem::path& path);

Json detections_to_json(const GameDetections& detections);
GameDetections detections_from_json(const Json& doc);
GameDetections read_detections(const std::filesystem::path& path);
void write_detections(const GameDetections& detections, const std::filesystem::path& path);

/// Ground-truth event as stored on disk: class by name, plus optional
/// provenance from the source annotation.
struct LabelEvent {
  std::string label;
  double time = 0.0;
  std::optional<int> half;
  std::optional<std::string> clock;

  bool operator==(const LabelEvent&) const = default;
};

struct LabelDocument {
  std::string game_id;
  std::optional<double> duration;
  std::vector<LabelEvent> events;

  bool operator==(const LabelDocument&) const = default;
};

Json labels_to_json(const LabelDocument& labels);
LabelDocument labels_from_json(const Json& doc);
LabelDocument read_labels(const std::filesystem::path& path);
void write_labels(const LabelDocument& labels, const std::filesystem::path& path);

/// Maps label names onto class indices; unknown names are an error.
AnnotationSet resolve_labels(const LabelDocument& labels, const std::vector<std::string>& class_names);
LabelDocument to_label_document(const AnnotationSet& labels,
                                const std::vector<std::string>& class_names);

Json report_to_json(const EvalReport& report);
/// Aligned plain-text table, 4 decimals.
std::string format_report(const EvalReport& report);

/// Nested containers are indented; arrays and objects holding only scalars
/// stay on one line (one matrix row or one detection per line).
std::string canonical_dump(const Json& doc);

Json read_json(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// A file yields itself; a directory yields its *.json files sorted by name.
std::vector<std::filesystem::path> expand_inputs(const std::filesystem::path& path);

}  // namespace spotkit::io
