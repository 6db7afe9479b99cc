#include "trailmap/pipeline.hpp"

namespace trailmap {

std::vector<Session> filter_cohort(std::span<const Session> sessions, const CohortSpec& cohort,
                                   double max_score) {
  std::vector<Session> out;
  for (const auto& s : sessions) {
    if (cohort.matches(normalized_outcome(s, max_score))) out.push_back(s);
  }
  return out;
}

HeatGrid question_heatmap(std::span<const Session> sessions, double max_score,
                          const HeatmapQuery& query) {
  const auto members = filter_cohort(sessions, query.cohort, max_score);
  HeatGrid grid = [&] {
    if (query.dwell_weighted) {
      return accumulate_grid_dwell(members, query.resolution, query.resolution);
    }
    std::vector<RawEvent> events;
    for (const auto& s : members) events.insert(events.end(), s.events.begin(), s.events.end());
    return accumulate_grid(events, query.resolution, query.resolution);
  }();
  return smooth_grid(grid, query.sigma);
}

TransitionResult question_transitions(std::span<const Session> sessions, double max_score,
                                      const TransitionQuery& query) {
  query.roi.validate();
  std::vector<RawEvent> events;
  for (const auto& s : sessions) events.insert(events.end(), s.events.begin(), s.events.end());
  const HeatGrid grid =
      smooth_grid(accumulate_grid(events, query.resolution, query.resolution), query.sigma);
  const auto points = positional_points(sessions);
  RoiSet rois = extract_rois(grid, points, query.roi);
  TransitionMap map = build_transition_map(sessions, rois, query.cohort, max_score,
                                           query.min_edge_count, query.roi.time_bins);
  return {std::move(rois), std::move(map)};
}

}  // namespace trailmap
