#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spotkit {

/// Dense row-major matrix; rows are anchors, columns are classes.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  double operator()(std::size_t row, std::size_t col) const {
    return values_[row * cols_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return values_[row * cols_ + col];
  }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Per-game, per-anchor, per-class model outputs sampled at `fps`.
/// Anchor i sits at i / fps seconds from the stream start.
struct ScoreStream {
  std::string game_id;
  std::vector<std::string> class_names;
  double fps = 1.0;
  Matrix confidences;                    // T x C probabilities
  std::optional<Matrix> displacements;   // T x C seconds, signed

  std::size_t num_anchors() const { return confidences.rows(); }
  std::size_t num_classes() const { return confidences.cols(); }
  double anchor_time(std::size_t i) const { return static_cast<double>(i) / fps; }
  /// Time of the last anchor.
  double duration() const {
    return num_anchors() == 0 ? 0.0 : anchor_time(num_anchors() - 1);
  }

  bool operator==(const ScoreStream&) const = default;
};

/// Throws spotkit::Error naming the first broken invariant.
void validate(const ScoreStream& stream);

struct Detection {
  int class_index = 0;
  double time = 0.0;
  double confidence = 0.0;

  bool operator==(const Detection&) const = default;
};

/// Detections of one game, partitioned by class index.
struct GameDetections {
  std::string game_id;
  std::vector<std::string> class_names;
  std::vector<std::vector<Detection>> per_class;

  std::size_t size() const;
  bool operator==(const GameDetections&) const = default;
};

struct Event {
  int class_index = 0;
  double time = 0.0;

  bool operator==(const Event&) const = default;
};

/// Ground-truth events of one game.
struct AnnotationSet {
  std::string game_id;
  std::vector<Event> events;
  std::optional<double> duration;

  bool operator==(const AnnotationSet&) const = default;
};

/// Tolerance window sizes (seconds) over which mAP is averaged. A detection
/// matches a ground truth when it lies within delta / 2 of it.
class ToleranceSchedule {
 public:
  explicit ToleranceSchedule(std::vector<double> deltas, std::string name = "custom");

  /// delta in {1, 2, 3, 4, 5}
  static ToleranceSchedule tight();
  /// delta in {5, 10, ..., 60}
  static ToleranceSchedule loose();
  /// "tight", "loose", or a comma separated list of deltas.
  static ToleranceSchedule parse(const std::string& text);

  std::span<const double> deltas() const { return deltas_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return deltas_.size(); }

 private:
  std::vector<double> deltas_;
  std::string name_;
};

}  // namespace spotkit
