#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trailmap/event_model.hpp"
#include "trailmap/heatmap.hpp"

namespace trailmap {

// A positional sample with its session-normalized time.
struct TimedPoint {
  double x = 0.0;
  double y = 0.0;
  EventType type = EventType::kMove;
  double t_norm = 0.0;
};

// Flattens the positional events of `sessions` into TimedPoints.
std::vector<TimedPoint> positional_points(std::span<const Session> sessions);

struct RoiParams {
  // Keep cells at or above tau * max(grid). In (0, 1].
  double tau = 0.25;
  // Components whose centroids are within this normalized distance merge.
  // This is the user-facing "ROI size".
  double merge_radius = 0.05;
  // Components with fewer assigned events are discarded before merging.
  int min_events = 5;
  int time_bins = 5;

  void validate() const;
};

struct Roi {
  int roi_id = 0;
  std::vector<std::size_t> cells;  // sorted grid indices
  std::array<double, 2> centroid{};
  std::array<double, 4> bbox{};  // x_min, y_min, x_max, y_max
  int event_count = 0;
  std::map<EventType, int> type_counts;
  std::vector<int> time_hist;
};

// Extracted ROIs plus the cell -> roi_id lookup used to assign events.
class RoiSet {
 public:
  RoiSet() = default;
  RoiSet(int width, int height, std::vector<Roi> rois, std::vector<int> cell_labels);

  const std::vector<Roi>& rois() const { return rois_; }
  bool empty() const { return rois_.empty(); }
  std::size_t size() const { return rois_.size(); }
  int width() const { return width_; }
  int height() const { return height_; }

  // roi_id of the cell containing (x, y), or nullopt outside every ROI.
  std::optional<int> roi_at(double x, double y) const;
  const Roi* find(int roi_id) const;

  // Same geometry, with event_count / type_counts / time_hist recounted over
  // `points`. Used to describe a cohort on ROIs extracted from everyone.
  RoiSet recounted(std::span<const TimedPoint> points, int time_bins) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Roi> rois_;
  std::vector<int> cell_labels_;  // -1 = no ROI
};

// Threshold, 8-connected labeling, event-count filter, agglomerative
// centroid merge within merge_radius, event assignment and time histograms.
// ROI ids are ordered by descending event_count, then centroid x, then y.
RoiSet extract_rois(const HeatGrid& grid, std::span<const TimedPoint> points,
                    const RoiParams& params);

// ROI count per merge radius. Radii must be ascending.
std::vector<std::pair<double, int>> roi_count_curve(const HeatGrid& grid,
                                                    std::span<const TimedPoint> points,
                                                    double tau, int min_events,
                                                    std::span<const double> radii);

// Component labeling step on its own: 8-connected components of cells with
// value >= threshold, labeled 0.. in row-major scan order (-1 elsewhere).
std::vector<int> label_components(const HeatGrid& grid, double threshold, int* count = nullptr);

}  // namespace trailmap
