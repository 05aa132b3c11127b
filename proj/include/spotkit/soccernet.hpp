#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spotkit/io.hpp"

namespace spotkit {

struct SoccerNetImportOptions {
  std::string game_id;
  /// Source label -> class name. Labels missing here are skipped with a warning.
  std::map<std::string, std::string> class_dictionary;
  /// When set, both halves go into one document with time = offset[half] + t.
  /// Otherwise each half becomes its own game "<game_id>_half<h>".
  std::optional<std::map<int, double>> half_offsets;
};

struct SoccerNetImport {
  std::vector<io::LabelDocument> games;
  std::vector<std::string> warnings;
};

/// Reads a SoccerNet-style {"annotations": [...]} document. Each entry needs a
/// "label", a half (from "half" or a "H - MM:SS" gameTime) and a clock time;
/// a millisecond "position" field takes precedence over the clock string.
SoccerNetImport import_soccernet_labels(const io::Json& doc, const SoccerNetImportOptions& options);
SoccerNetImport import_soccernet_labels(const std::filesystem::path& path,
                                        const SoccerNetImportOptions& options);

}  // namespace spotkit
