#include "spotkit/soccernet.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "spotkit/error.hpp"

namespace spotkit {

namespace {

[[noreturn]] void fail_entry(std::size_t index, const std::string& what) {
  throw Error("annotation " + std::to_string(index) + ": " + what);
}

bool all_digits(const std::string& s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// "MM:SS" -> seconds. Minutes may exceed 59 (stoppage time).
double parse_clock(const std::string& clock, std::size_t index) {
  const auto colon = clock.find(':');
  if (colon == std::string::npos) fail_entry(index, "malformed clock '" + clock + "'");
  const std::string mm = clock.substr(0, colon);
  const std::string ss = clock.substr(colon + 1);
  if (!all_digits(mm) || ss.size() != 2 || !all_digits(ss) || std::stoi(ss) > 59) {
    fail_entry(index, "malformed clock '" + clock + "'");
  }
  return 60.0 * std::stod(mm) + std::stod(ss);
}

int parse_half(const io::Json& v, std::size_t index) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string() && all_digits(trim(v.get<std::string>()))) {
    return std::stoi(trim(v.get<std::string>()));
  }
  fail_entry(index, "malformed half indicator");
}

struct Entry {
  std::string label;
  int half = 1;
  std::string clock;
  double time_in_half = 0.0;
};

Entry parse_entry(const io::Json& item, std::size_t index) {
  if (!item.is_object()) fail_entry(index, "expected an object");
  Entry e;
  const auto label = item.find("label");
  if (label == item.end() || !label->is_string()) fail_entry(index, "missing label");
  e.label = label->get<std::string>();

  std::optional<int> half;
  if (const auto h = item.find("half"); h != item.end()) half = parse_half(*h, index);

  std::string clock;
  if (const auto gt = item.find("gameTime"); gt != item.end()) {
    if (!gt->is_string()) fail_entry(index, "gameTime must be a string");
    const std::string text = gt->get<std::string>();
    const auto dash = text.find(" - ");
    if (dash != std::string::npos) {
      const std::string h = trim(text.substr(0, dash));
      if (!all_digits(h)) fail_entry(index, "malformed gameTime '" + text + "'");
      if (!half) half = std::stoi(h);
      clock = trim(text.substr(dash + 3));
    } else {
      clock = trim(text);
    }
  } else if (const auto c = item.find("clock"); c != item.end()) {
    if (!c->is_string()) fail_entry(index, "clock must be a string");
    clock = trim(c->get<std::string>());
  }

  std::optional<double> position_ms;
  if (const auto p = item.find("position"); p != item.end()) {
    if (p->is_number()) {
      position_ms = p->get<double>();
    } else if (p->is_string() && all_digits(p->get<std::string>())) {
      position_ms = std::stod(p->get<std::string>());
    } else {
      fail_entry(index, "malformed position");
    }
  }
  if (!half) fail_entry(index, "missing half indicator");
  if (clock.empty() && !position_ms) fail_entry(index, "needs a clock time or a position");

  e.half = *half;
  e.clock = clock;
  const double clock_time = clock.empty() ? 0.0 : parse_clock(clock, index);
  e.time_in_half = position_ms ? *position_ms / 1000.0 : clock_time;
  return e;
}

}  // namespace

SoccerNetImport import_soccernet_labels(const io::Json& doc, const SoccerNetImportOptions& options) {
  if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array()) {
    throw Error("expected an object with an \"annotations\" array");
  }
  const auto& list = doc["annotations"];

  SoccerNetImport result;
  std::map<int, io::LabelDocument> halves;
  io::LabelDocument merged{options.game_id, std::nullopt, {}};
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Entry e = parse_entry(list[i], i);
    const auto mapped = options.class_dictionary.find(e.label);
    if (mapped == options.class_dictionary.end()) {
      result.warnings.push_back("annotation " + std::to_string(i) + ": label '" + e.label +
                                "' not in class dictionary, skipped");
      continue;
    }
    io::LabelEvent ev{mapped->second, e.time_in_half, e.half,
                      e.clock.empty() ? std::nullopt : std::optional<std::string>(e.clock)};
    if (options.half_offsets) {
      const auto offset = options.half_offsets->find(e.half);
      if (offset == options.half_offsets->end()) {
        fail_entry(i, "no offset configured for half " + std::to_string(e.half));
      }
      ev.time += offset->second;
      merged.events.push_back(std::move(ev));
    } else {
      auto& half_doc = halves[e.half];
      half_doc.game_id = options.game_id + "_half" + std::to_string(e.half);
      half_doc.events.push_back(std::move(ev));
    }
  }
  if (options.half_offsets) {
    result.games.push_back(std::move(merged));
  } else {
    for (auto& [half, half_doc] : halves) result.games.push_back(std::move(half_doc));
  }
  return result;
}

SoccerNetImport import_soccernet_labels(const std::filesystem::path& path,
                                        const SoccerNetImportOptions& options) {
  try {
    return import_soccernet_labels(io::read_json(path), options);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace spotkit
