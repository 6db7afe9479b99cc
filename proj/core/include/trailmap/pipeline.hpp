#pragma once

#include <span>
#include <vector>

#include "trailmap/event_model.hpp"
#include "trailmap/heatmap.hpp"
#include "trailmap/roi.hpp"
#include "trailmap/transition.hpp"

// End-to-end per-question pipelines shared by the CLI and the HTTP API.
namespace trailmap {

std::vector<Session> filter_cohort(std::span<const Session> sessions, const CohortSpec& cohort,
                                   double max_score);

struct HeatmapQuery {
  int resolution = kDefaultGridSize;
  double sigma = kDefaultSigma;
  CohortSpec cohort;
  bool dwell_weighted = false;
};

// accumulate -> smooth over the cohort's positional events.
HeatGrid question_heatmap(std::span<const Session> sessions, double max_score,
                          const HeatmapQuery& query);

struct TransitionQuery {
  int resolution = kDefaultGridSize;
  double sigma = kDefaultSigma;
  RoiParams roi;
  int min_edge_count = kDefaultMinEdgeCount;
  CohortSpec cohort;
};

struct TransitionResult {
  RoiSet rois;
  TransitionMap map;
};

// ROIs come from every session of the question so that cohorts share ROI
// ids; the map itself only covers the cohort.
TransitionResult question_transitions(std::span<const Session> sessions, double max_score,
                                      const TransitionQuery& query);

}  // namespace trailmap
