#include "scsim/core/timeline.hpp"

#include <cctype>

#include "scsim/error.hpp"

namespace scsim {

Timeline::Timeline(std::shared_ptr<const Dataset> ds) : ds_(std::move(ds)) {
  for (int t = 0; t < ds_->horizon(); ++t) {
    Frame f;
    f.label = ds_->timestampLabels[static_cast<std::size_t>(t)];
    f.edges = ds_->network.at(t);
    f.features = ds_->feature_matrix(t);
    frames_.push_back(std::make_shared<const Frame>(std::move(f)));
  }
}

Timeline::Timeline(std::shared_ptr<const Dataset> ds, std::vector<std::shared_ptr<const Frame>> frames)
    : ds_(std::move(ds)), frames_(std::move(frames)) {}

const Frame& Timeline::frame(int t) const { return *frame_ptr(t); }

const std::shared_ptr<const Frame>& Timeline::frame_ptr(int t) const {
  if (t < 0 || t >= size()) {
    throw Error(Errc::TimestampOutOfRange, "t=" + std::to_string(t) + " of " + std::to_string(size()));
  }
  return frames_[static_cast<std::size_t>(t)];
}

void Timeline::push_back(Frame f) { frames_.push_back(std::make_shared<const Frame>(std::move(f))); }

void Timeline::push_back(std::shared_ptr<const Frame> f) { frames_.push_back(std::move(f)); }

Timeline Timeline::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > size()) {
    throw Error(Errc::TimestampOutOfRange, "slice [" + std::to_string(first) + "," +
                                               std::to_string(first + count) + ") of " + std::to_string(size()));
  }
  return Timeline(ds_, {frames_.begin() + first, frames_.begin() + first + count});
}

TemporalNetwork Timeline::network() const {
  std::vector<Snapshot> snaps;
  snaps.reserve(frames_.size());
  for (const auto& f : frames_) snaps.push_back(f->edges);
  return TemporalNetwork(std::move(snaps));
}

std::vector<double> Timeline::series(std::size_t company, std::size_t feature, int upto) const {
  std::vector<double> out;
  for (int t = 0; t <= upto; ++t) {
    out.push_back(frame(t).features(static_cast<Eigen::Index>(company), static_cast<Eigen::Index>(feature)));
  }
  return out;
}

std::string next_label(const std::string& label) {
  std::size_t digits = label.size();
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(label[digits - 1]))) --digits;
  if (digits == label.size() || label.size() - digits > 15) return label + "+1";
  const auto value = std::stoll(label.substr(digits));
  return label.substr(0, digits) + std::to_string(value + 1);
}

}  // namespace scsim
