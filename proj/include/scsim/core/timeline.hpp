#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scsim/core/dataset.hpp"

namespace scsim {

/// One timestamp of world state: the edge snapshot plus every firm's features.
struct Frame {
  std::string label;
  Snapshot edges;
  Eigen::MatrixXd features;  // N x F, rows in Dataset company order
  bool simulated = false;
};

/// Observed frames followed by any simulated ones. Frames are shared, never
/// mutated, so copying a Timeline is cheap.
class Timeline {
 public:
  /// All historical frames of the dataset.
  explicit Timeline(std::shared_ptr<const Dataset> ds);
  Timeline(std::shared_ptr<const Dataset> ds, std::vector<std::shared_ptr<const Frame>> frames);

  const Dataset& dataset() const noexcept { return *ds_; }
  const std::shared_ptr<const Dataset>& dataset_ptr() const noexcept { return ds_; }

  int size() const noexcept { return static_cast<int>(frames_.size()); }
  /// Throws Errc::TimestampOutOfRange.
  const Frame& frame(int t) const;
  const std::shared_ptr<const Frame>& frame_ptr(int t) const;
  const Frame& back() const { return frame(size() - 1); }

  void push_back(Frame f);
  void push_back(std::shared_ptr<const Frame> f);

  /// Frames [first, first + count).
  Timeline slice(int first, int count) const;

  TemporalNetwork network() const;

  /// Feature series of one firm/feature over frames [0, upto].
  std::vector<double> series(std::size_t company, std::size_t feature, int upto) const;

 private:
  std::shared_ptr<const Dataset> ds_;
  std::vector<std::shared_ptr<const Frame>> frames_;
};

/// Label of the frame after `label`: a trailing integer is incremented
/// ("Q8" -> "Q9", "7" -> "8"); otherwise "+1" is appended.
std::string next_label(const std::string& label);

}  // namespace scsim
