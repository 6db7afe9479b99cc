#include "trailmap/roi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trailmap/error.hpp"

namespace trailmap {
namespace {

struct Cluster {
  int id = 0;  // smallest component id absorbed so far
  std::vector<std::size_t> cells;
  double mass = 0.0;
  double wx = 0.0;
  double wy = 0.0;
  int events = 0;

  double cx() const { return wx / mass; }
  double cy() const { return wy / mass; }
};

int time_bin(double t_norm, int bins) {
  const int k = static_cast<int>(std::floor(t_norm * bins));
  return std::clamp(k, 0, bins - 1);
}

void add_point(Roi& roi, const TimedPoint& p, int bins) {
  ++roi.event_count;
  ++roi.type_counts[p.type];
  ++roi.time_hist[static_cast<std::size_t>(time_bin(p.t_norm, bins))];
}

// Repeatedly merges the closest pair of clusters while their centroid
// distance is within `radius`. Exact distance ties go to the pair with the
// lexicographically smallest (id, id).
void merge_clusters(std::vector<Cluster>& clusters, double radius) {
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    // `clusters` stays sorted by id, so scan order is lexicographic.
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = std::hypot(clusters[a].cx() - clusters[b].cx(),
                                    clusters[a].cy() - clusters[b].cy());
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (!(best <= radius)) return;
    Cluster& keep = clusters[best_a];
    Cluster& gone = clusters[best_b];
    keep.cells.insert(keep.cells.end(), gone.cells.begin(), gone.cells.end());
    keep.mass += gone.mass;
    keep.wx += gone.wx;
    keep.wy += gone.wy;
    keep.events += gone.events;
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
}

}  // namespace

std::vector<TimedPoint> positional_points(std::span<const Session> sessions) {
  std::vector<TimedPoint> points;
  for (const auto& s : sessions) {
    for (std::size_t k = 0; k < s.events.size(); ++k) {
      const auto& e = s.events[k];
      if (!e.positional()) continue;
      points.push_back({*e.x, *e.y, e.type, k < s.t_norm.size() ? s.t_norm[k] : 0.0});
    }
  }
  return points;
}

void RoiParams::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw invalid_argument("tau must be in (0, 1]");
  if (!(merge_radius >= 0.0)) throw invalid_argument("roi size (merge radius) must be >= 0");
  if (min_events < 0) throw invalid_argument("min_events must be >= 0");
  if (time_bins < 1) throw invalid_argument("time bins must be >= 1");
}

RoiSet::RoiSet(int width, int height, std::vector<Roi> rois, std::vector<int> cell_labels)
    : width_(width), height_(height), rois_(std::move(rois)), cell_labels_(std::move(cell_labels)) {}

std::optional<int> RoiSet::roi_at(double x, double y) const {
  if (cell_labels_.empty()) return std::nullopt;
  const int i = std::clamp(static_cast<int>(std::floor(x * width_)), 0, width_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(y * height_)), 0, height_ - 1);
  const int label = cell_labels_[static_cast<std::size_t>(j) * static_cast<std::size_t>(width_) +
                                 static_cast<std::size_t>(i)];
  if (label < 0) return std::nullopt;
  return label;
}

const Roi* RoiSet::find(int roi_id) const {
  if (roi_id < 0 || static_cast<std::size_t>(roi_id) >= rois_.size()) return nullptr;
  return &rois_[static_cast<std::size_t>(roi_id)];
}

RoiSet RoiSet::recounted(std::span<const TimedPoint> points, int time_bins) const {
  if (time_bins < 1) throw invalid_argument("time bins must be >= 1");
  std::vector<Roi> rois = rois_;
  for (auto& r : rois) {
    r.event_count = 0;
    r.type_counts.clear();
    r.time_hist.assign(static_cast<std::size_t>(time_bins), 0);
  }
  for (const auto& p : points) {
    if (auto id = roi_at(p.x, p.y)) add_point(rois[static_cast<std::size_t>(*id)], p, time_bins);
  }
  return RoiSet(width_, height_, std::move(rois), cell_labels_);
}

std::vector<int> label_components(const HeatGrid& grid, double threshold, int* count) {
  const int w = grid.width();
  const int h = grid.height();
  std::vector<int> labels(grid.size(), -1);
  std::vector<std::pair<int, int>> stack;
  int next = 0;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const std::size_t start = grid.index(i, j);
      if (labels[start] >= 0 || !(grid.cells()[start] >= threshold)) continue;
      labels[start] = next;
      stack.emplace_back(i, j);
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int ni = ci + di;
            const int nj = cj + dj;
            if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
            const std::size_t n = grid.index(ni, nj);
            if (labels[n] >= 0 || !(grid.cells()[n] >= threshold)) continue;
            labels[n] = next;
            stack.emplace_back(ni, nj);
          }
        }
      }
      ++next;
    }
  }
  if (count != nullptr) *count = next;
  return labels;
}

RoiSet extract_rois(const HeatGrid& grid, std::span<const TimedPoint> points,
                    const RoiParams& params) {
  params.validate();
  const int w = grid.width();
  const int h = grid.height();
  const double peak = grid.max_value();
  if (!(peak > 0.0)) return RoiSet(w, h, {}, std::vector<int>(grid.size(), -1));

  int n_components = 0;
  const std::vector<int> components = label_components(grid, params.tau * peak, &n_components);

  std::vector<Cluster> clusters(static_cast<std::size_t>(n_components));
  for (int c = 0; c < n_components; ++c) clusters[static_cast<std::size_t>(c)].id = c;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const std::size_t k = grid.index(i, j);
      if (components[k] < 0) continue;
      Cluster& c = clusters[static_cast<std::size_t>(components[k])];
      const double v = grid.cells()[k];
      c.cells.push_back(k);
      c.mass += v;
      c.wx += v * grid.center_x(i);
      c.wy += v * grid.center_y(j);
    }
  }
  for (const auto& p : points) {
    const int c = components[grid.cell_of(p.x, p.y)];
    if (c >= 0) ++clusters[static_cast<std::size_t>(c)].events;
  }

  // The event filter runs on components, before merging, which keeps the ROI
  // count non-increasing in the merge radius.
  std::erase_if(clusters, [&](const Cluster& c) { return c.events < params.min_events; });
  merge_clusters(clusters, params.merge_radius);

  std::vector<Roi> rois;
  rois.reserve(clusters.size());
  for (auto& c : clusters) {
    Roi r;
    std::sort(c.cells.begin(), c.cells.end());
    r.cells = std::move(c.cells);
    r.centroid = {c.cx(), c.cy()};
    int i_min = w, j_min = h, i_max = -1, j_max = -1;
    for (std::size_t k : r.cells) {
      const int i = static_cast<int>(k % static_cast<std::size_t>(w));
      const int j = static_cast<int>(k / static_cast<std::size_t>(w));
      i_min = std::min(i_min, i);
      i_max = std::max(i_max, i);
      j_min = std::min(j_min, j);
      j_max = std::max(j_max, j);
    }
    r.bbox = {static_cast<double>(i_min) / w, static_cast<double>(j_min) / h,
              static_cast<double>(i_max + 1) / w, static_cast<double>(j_max + 1) / h};
    r.time_hist.assign(static_cast<std::size_t>(params.time_bins), 0);
    rois.push_back(std::move(r));
  }

  std::vector<int> labels(grid.size(), -1);
  for (std::size_t r = 0; r < rois.size(); ++r) {
    for (std::size_t k : rois[r].cells) labels[k] = static_cast<int>(r);
  }
  for (const auto& p : points) {
    const int r = labels[grid.cell_of(p.x, p.y)];
    if (r >= 0) add_point(rois[static_cast<std::size_t>(r)], p, params.time_bins);
  }

  std::vector<std::size_t> order(rois.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Roi& ra = rois[a];
    const Roi& rb = rois[b];
    if (ra.event_count != rb.event_count) return ra.event_count > rb.event_count;
    if (ra.centroid[0] != rb.centroid[0]) return ra.centroid[0] < rb.centroid[0];
    if (ra.centroid[1] != rb.centroid[1]) return ra.centroid[1] < rb.centroid[1];
    return ra.cells.front() < rb.cells.front();
  });
  std::vector<Roi> ordered;
  ordered.reserve(rois.size());
  std::vector<int> remap(rois.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = static_cast<int>(k);
    ordered.push_back(std::move(rois[order[k]]));
    ordered.back().roi_id = static_cast<int>(k);
  }
  for (int& l : labels) {
    if (l >= 0) l = remap[static_cast<std::size_t>(l)];
  }
  return RoiSet(w, h, std::move(ordered), std::move(labels));
}

std::vector<std::pair<double, int>> roi_count_curve(const HeatGrid& grid,
                                                    std::span<const TimedPoint> points,
                                                    double tau, int min_events,
                                                    std::span<const double> radii) {
  if (!std::is_sorted(radii.begin(), radii.end())) {
    throw invalid_argument("radii must be sorted ascending");
  }
  std::vector<std::pair<double, int>> curve;
  curve.reserve(radii.size());
  for (double r : radii) {
    RoiParams params;
    params.tau = tau;
    params.min_events = min_events;
    params.merge_radius = r;
    params.time_bins = 1;
    curve.emplace_back(r, static_cast<int>(extract_rois(grid, points, params).size()));
  }
  return curve;
}

}  // namespace trailmap
