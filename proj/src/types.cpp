#include "spotkit/types.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "spotkit/error.hpp"

namespace spotkit {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    std::ostringstream msg;
    msg << "matrix shape " << rows << "x" << cols << " needs " << rows * cols << " values, got "
        << values_.size();
    throw Error(msg.str());
  }
}

void validate(const ScoreStream& stream) {
  const auto where = [&](const char* field, std::size_t i, std::size_t c) {
    std::ostringstream msg;
    msg << "stream '" << stream.game_id << "': " << field << "[" << i << "][" << c << "]";
    return msg.str();
  };
  if (!(stream.fps > 0.0) || !std::isfinite(stream.fps)) {
    throw Error("stream '" + stream.game_id + "': fps must be positive and finite");
  }
  const std::size_t rows = stream.confidences.rows();
  const std::size_t cols = stream.confidences.cols();
  if (rows == 0) throw Error("stream '" + stream.game_id + "': no anchors");
  if (cols == 0) throw Error("stream '" + stream.game_id + "': no classes");
  if (stream.class_names.size() != cols) {
    std::ostringstream msg;
    msg << "stream '" << stream.game_id << "': " << stream.class_names.size()
        << " class names for " << cols << " confidence columns";
    throw Error(msg.str());
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double p = stream.confidences(i, c);
      if (!std::isfinite(p)) throw Error(where("confidences", i, c) + " is not finite");
      if (p < 0.0 || p > 1.0) {
        throw Error(where("confidences", i, c) + " = " + std::to_string(p) + " outside [0, 1]");
      }
    }
  }
  if (stream.displacements) {
    const Matrix& d = *stream.displacements;
    if (d.rows() != rows || d.cols() != cols) {
      std::ostringstream msg;
      msg << "stream '" << stream.game_id << "': displacements are " << d.rows() << "x"
          << d.cols() << ", expected " << rows << "x" << cols;
      throw Error(msg.str());
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (!std::isfinite(d(i, c))) throw Error(where("displacements", i, c) + " is not finite");
      }
    }
  }
}

std::size_t GameDetections::size() const {
  std::size_t n = 0;
  for (const auto& dets : per_class) n += dets.size();
  return n;
}

ToleranceSchedule::ToleranceSchedule(std::vector<double> deltas, std::string name)
    : deltas_(std::move(deltas)), name_(std::move(name)) {
  if (deltas_.empty()) throw Error("tolerance schedule is empty");
  for (std::size_t i = 0; i < deltas_.size(); ++i) {
    if (!(deltas_[i] > 0.0) || !std::isfinite(deltas_[i])) {
      throw Error("tolerance schedule: delta " + std::to_string(deltas_[i]) + " must be positive");
    }
    if (i > 0 && !(deltas_[i] > deltas_[i - 1])) {
      throw Error("tolerance schedule must be strictly increasing");
    }
  }
}

ToleranceSchedule ToleranceSchedule::tight() { return ToleranceSchedule({1, 2, 3, 4, 5}, "tight"); }

ToleranceSchedule ToleranceSchedule::loose() {
  std::vector<double> deltas;
  for (int d = 5; d <= 60; d += 5) deltas.push_back(d);
  return ToleranceSchedule(std::move(deltas), "loose");
}

ToleranceSchedule ToleranceSchedule::parse(const std::string& text) {
  if (text == "tight") return tight();
  if (text == "loose" || text == "standard") return loose();
  std::vector<double> deltas;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error("cannot parse tolerance '" + item + "' in schedule '" + text + "'");
    }
    deltas.push_back(value);
  }
  return ToleranceSchedule(std::move(deltas), "custom");
}

}  // namespace spotkit
