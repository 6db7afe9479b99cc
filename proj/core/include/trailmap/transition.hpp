#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trailmap/event_model.hpp"
#include "trailmap/roi.hpp"

namespace trailmap {

struct TransitionEdge {
  int from_roi = 0;
  int to_roi = 0;
  int count = 0;
  // Mean t_norm at entry into the destination ROI.
  double mean_time = 0.0;
};

struct TransitionMap {
  CohortSpec cohort;
  std::vector<Roi> rois;
  std::vector<TransitionEdge> edges;  // sorted by (from_roi, to_roi)
  int session_count = 0;
  // Mean over visiting sessions of the t_norm at first arrival.
  std::map<int, double> roi_first_visit;
};

inline constexpr int kDefaultMinEdgeCount = 2;

// Sessions outside the cohort are skipped; outcomes are normalized by
// `max_score`. The map's ROIs are `rois` recounted over the cohort's events.
TransitionMap build_transition_map(std::span<const Session> sessions, const RoiSet& rois,
                                   const CohortSpec& cohort, double max_score,
                                   int min_edge_count = kDefaultMinEdgeCount,
                                   int time_bins = 5);

// Collapsed ROI run sequence of one session: (roi_id, t_norm at run entry).
struct RoiRun {
  int roi_id = 0;
  double entry_time = 0.0;
};
std::vector<RoiRun> roi_runs(const Session& session, const RoiSet& rois);

// Spearman correlation between ROI centroid x and mean first-visit time over
// visited ROIs: +1 is strict left-to-right, -1 right-to-left. Throws
// kFailedPrecondition with fewer than two visited ROIs or a degenerate
// ranking (all x or all times tied).
double ordering_score(const TransitionMap& map);

// ordering_score, or the reason it is undefined.
struct OrderingResult {
  std::optional<double> score;
  std::string reason;
};
OrderingResult try_ordering_score(const TransitionMap& map);

enum class SignRelation { kSame, kOpposite, kUndetermined };

struct RoiVisitDiff {
  int roi_id = 0;
  std::optional<double> first_visit_a;
  std::optional<double> first_visit_b;
  // a - b, only when both cohorts visit the ROI.
  std::optional<double> difference;
  std::string note;  // "a: unvisited", "b: unvisited", "unvisited" or empty
};

struct CohortDiff {
  std::vector<RoiVisitDiff> rois;
  OrderingResult score_a;
  OrderingResult score_b;
  SignRelation relation = SignRelation::kUndetermined;
};

// Both maps must share ROI ids; disjoint ROI lists throw kInvalidArgument.
CohortDiff compare_cohorts(const TransitionMap& a, const TransitionMap& b);

std::string_view sign_relation_name(SignRelation relation);

}  // namespace trailmap
