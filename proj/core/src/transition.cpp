#include "trailmap/transition.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "trailmap/analytics.hpp"
#include "trailmap/error.hpp"

namespace trailmap {
namespace {

// Summing sorted samples keeps the mean independent of session order.
double order_free_mean(std::vector<double>& samples) {
  std::sort(samples.begin(), samples.end());
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

}  // namespace

std::vector<RoiRun> roi_runs(const Session& session, const RoiSet& rois) {
  std::vector<RoiRun> runs;
  for (std::size_t k = 0; k < session.events.size(); ++k) {
    const auto& e = session.events[k];
    if (!e.positional()) continue;
    const auto roi = rois.roi_at(*e.x, *e.y);
    if (!roi) continue;
    if (!runs.empty() && runs.back().roi_id == *roi) continue;
    runs.push_back({*roi, k < session.t_norm.size() ? session.t_norm[k] : 0.0});
  }
  return runs;
}

TransitionMap build_transition_map(std::span<const Session> sessions, const RoiSet& rois,
                                   const CohortSpec& cohort, double max_score,
                                   int min_edge_count, int time_bins) {
  if (cohort.kind == CohortKind::kScoreRange && !(cohort.lo <= cohort.hi)) {
    throw invalid_argument("cohort score range has lo > hi");
  }
  if (!(max_score > 0.0)) throw invalid_argument("max_score must be > 0");

  std::map<std::pair<int, int>, std::vector<double>> arrivals;
  std::map<int, std::vector<double>> first_visits;
  std::vector<TimedPoint> cohort_points;

  TransitionMap map;
  map.cohort = cohort;
  for (const auto& s : sessions) {
    if (!cohort.matches(normalized_outcome(s, max_score))) continue;
    ++map.session_count;
    const auto pts = positional_points(std::span(&s, 1));
    cohort_points.insert(cohort_points.end(), pts.begin(), pts.end());

    const auto runs = roi_runs(s, rois);
    std::set<int> seen;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (seen.insert(runs[k].roi_id).second) {
        first_visits[runs[k].roi_id].push_back(runs[k].entry_time);
      }
      if (k > 0) {
        arrivals[{runs[k - 1].roi_id, runs[k].roi_id}].push_back(runs[k].entry_time);
      }
    }
  }

  for (auto& [key, times] : arrivals) {
    const int count = static_cast<int>(times.size());
    if (count < min_edge_count) continue;
    map.edges.push_back({key.first, key.second, count, order_free_mean(times)});
  }
  for (auto& [roi, times] : first_visits) map.roi_first_visit[roi] = order_free_mean(times);
  map.rois = rois.recounted(cohort_points, time_bins).rois();
  return map;
}

OrderingResult try_ordering_score(const TransitionMap& map) {
  std::vector<double> xs;
  std::vector<double> times;
  for (const auto& roi : map.rois) {
    auto it = map.roi_first_visit.find(roi.roi_id);
    if (it == map.roi_first_visit.end()) continue;
    xs.push_back(roi.centroid[0]);
    times.push_back(it->second);
  }
  if (xs.size() < 2) {
    return {std::nullopt, "fewer than 2 visited ROIs (" + std::to_string(xs.size()) + ")"};
  }
  try {
    return {spearman(xs, times, 2), {}};
  } catch (const Error&) {
    return {std::nullopt, "ROI positions or first-visit times are all tied"};
  }
}

double ordering_score(const TransitionMap& map) {
  auto r = try_ordering_score(map);
  if (!r.score) throw failed_precondition("ordering score undefined: " + r.reason);
  return *r.score;
}

std::string_view sign_relation_name(SignRelation relation) {
  switch (relation) {
    case SignRelation::kSame: return "same";
    case SignRelation::kOpposite: return "opposite";
    case SignRelation::kUndetermined: return "undetermined";
  }
  return "undetermined";
}

CohortDiff compare_cohorts(const TransitionMap& a, const TransitionMap& b) {
  std::set<int> ids_a;
  std::set<int> ids_b;
  for (const auto& r : a.rois) ids_a.insert(r.roi_id);
  for (const auto& r : b.rois) ids_b.insert(r.roi_id);
  std::vector<int> shared;
  std::set_intersection(ids_a.begin(), ids_a.end(), ids_b.begin(), ids_b.end(),
                        std::back_inserter(shared));
  if (shared.empty() && !(ids_a.empty() && ids_b.empty())) {
    throw invalid_argument("transition maps share no ROIs");
  }

  CohortDiff diff;
  for (int id : shared) {
    RoiVisitDiff d;
    d.roi_id = id;
    if (auto it = a.roi_first_visit.find(id); it != a.roi_first_visit.end()) {
      d.first_visit_a = it->second;
    }
    if (auto it = b.roi_first_visit.find(id); it != b.roi_first_visit.end()) {
      d.first_visit_b = it->second;
    }
    if (d.first_visit_a && d.first_visit_b) {
      d.difference = *d.first_visit_a - *d.first_visit_b;
    } else if (d.first_visit_a) {
      d.note = "b: unvisited";
    } else if (d.first_visit_b) {
      d.note = "a: unvisited";
    } else {
      d.note = "unvisited";
    }
    diff.rois.push_back(std::move(d));
  }

  diff.score_a = try_ordering_score(a);
  diff.score_b = try_ordering_score(b);
  if (diff.score_a.score && diff.score_b.score && *diff.score_a.score != 0.0 &&
      *diff.score_b.score != 0.0) {
    diff.relation = (*diff.score_a.score > 0) == (*diff.score_b.score > 0)
                        ? SignRelation::kSame
                        : SignRelation::kOpposite;
  }
  return diff;
}

}  // namespace trailmap
