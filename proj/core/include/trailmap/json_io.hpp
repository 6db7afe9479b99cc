#pragma once

#include <iosfwd>

#include <nlohmann/json.hpp>

#include "trailmap/analytics.hpp"
#include "trailmap/heatmap.hpp"
#include "trailmap/roi.hpp"
#include "trailmap/transition.hpp"

// JSON shapes for every exported artifact. Keys are emitted in a fixed
// order so identical inputs serialize to identical bytes.
namespace trailmap {

using ojson = nlohmann::ordered_json;

// {width, height, sigma, total_mass, cells}
ojson grid_to_json(const HeatGrid& grid);

// {roi_id, centroid, bbox, event_count, type_counts, time_hist}
ojson roi_to_json(const Roi& roi);
ojson rois_to_json(const std::vector<Roi>& rois);

// {cohort, session_count, rois, edges, roi_first_visit, ordering_score,
//  ordering_reason, roi_details}
ojson transition_map_to_json(const TransitionMap& map);

ojson cohort_diff_to_json(const CohortDiff& diff);

ojson report_to_json(const CorrelationReport& report);

// Graphviz DOT: one node per ROI (event count, centroid) and one weighted
// directed edge per transition.
void write_transition_dot(std::ostream& out, const TransitionMap& map);

}  // namespace trailmap
