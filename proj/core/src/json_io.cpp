#include "trailmap/json_io.hpp"

#include <ostream>

namespace trailmap {
namespace {

ojson optional_number(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

}  // namespace

ojson grid_to_json(const HeatGrid& grid) {
  ojson j;
  j["width"] = grid.width();
  j["height"] = grid.height();
  j["sigma"] = grid.sigma();
  j["total_mass"] = grid.total_mass();
  j["cells"] = std::vector<double>(grid.cells().begin(), grid.cells().end());
  return j;
}

ojson roi_to_json(const Roi& roi) {
  ojson j;
  j["roi_id"] = roi.roi_id;
  j["centroid"] = {roi.centroid[0], roi.centroid[1]};
  j["bbox"] = {roi.bbox[0], roi.bbox[1], roi.bbox[2], roi.bbox[3]};
  j["event_count"] = roi.event_count;
  ojson types = ojson::object();
  for (const auto& [type, count] : roi.type_counts) types[std::string(event_type_name(type))] = count;
  j["type_counts"] = std::move(types);
  j["time_hist"] = roi.time_hist;
  return j;
}

ojson rois_to_json(const std::vector<Roi>& rois) {
  ojson arr = ojson::array();
  for (const auto& r : rois) arr.push_back(roi_to_json(r));
  return arr;
}

ojson transition_map_to_json(const TransitionMap& map) {
  ojson j;
  j["cohort"] = cohort_to_string(map.cohort);
  j["session_count"] = map.session_count;
  ojson ids = ojson::array();
  for (const auto& r : map.rois) ids.push_back(r.roi_id);
  j["rois"] = std::move(ids);
  ojson edges = ojson::array();
  for (const auto& e : map.edges) {
    ojson ej;
    ej["from"] = e.from_roi;
    ej["to"] = e.to_roi;
    ej["count"] = e.count;
    ej["mean_time"] = e.mean_time;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  ojson visits = ojson::object();
  for (const auto& [roi, t] : map.roi_first_visit) visits[std::to_string(roi)] = t;
  j["roi_first_visit"] = std::move(visits);
  const auto ordering = try_ordering_score(map);
  j["ordering_score"] = optional_number(ordering.score);
  j["ordering_reason"] = ordering.score ? ojson(nullptr) : ojson(ordering.reason);
  j["roi_details"] = rois_to_json(map.rois);
  return j;
}

ojson cohort_diff_to_json(const CohortDiff& diff) {
  ojson j;
  ojson rois = ojson::array();
  for (const auto& d : diff.rois) {
    ojson r;
    r["roi_id"] = d.roi_id;
    r["first_visit_a"] = optional_number(d.first_visit_a);
    r["first_visit_b"] = optional_number(d.first_visit_b);
    r["difference"] = optional_number(d.difference);
    r["note"] = d.note;
    rois.push_back(std::move(r));
  }
  j["rois"] = std::move(rois);
  j["ordering_score_a"] = optional_number(diff.score_a.score);
  j["ordering_score_b"] = optional_number(diff.score_b.score);
  j["sign_relation"] = sign_relation_name(diff.relation);
  return j;
}

namespace {

ojson stats_to_json(const QuestionStats& q) {
  ojson j;
  j["question_id"] = q.question_id;
  j["difficulty"] = q.difficulty_label;
  j["n_sessions"] = q.n_sessions;
  j["n_scored"] = q.n_scored;
  j["mean_score_norm"] = q.mean_score_norm;
  return j;
}

}  // namespace

ojson report_to_json(const CorrelationReport& report) {
  ojson j;
  j["pearson_r"] = report.pearson_r;
  j["spearman_rho"] = report.spearman_rho;
  j["k_sigma"] = report.k_sigma;
  j["intercept"] = report.intercept;
  j["slope"] = report.slope;
  j["residual_sigma"] = report.residual_sigma;
  ojson per = ojson::array();
  for (std::size_t i = 0; i < report.per_question.size(); ++i) {
    ojson q = stats_to_json(report.per_question[i]);
    q["residual"] = report.residuals[i];
    per.push_back(std::move(q));
  }
  j["per_question"] = std::move(per);
  ojson excluded = ojson::array();
  for (const auto& q : report.excluded) excluded.push_back(stats_to_json(q));
  j["excluded"] = std::move(excluded);
  ojson flagged = ojson::array();
  for (const auto& f : report.flagged) {
    ojson fj;
    fj["question_id"] = f.question_id;
    fj["residual"] = f.residual;
    fj["direction"] = flag_direction_name(f.direction);
    flagged.push_back(std::move(fj));
  }
  j["flagged"] = std::move(flagged);
  return j;
}

void write_transition_dot(std::ostream& out, const TransitionMap& map) {
  const auto old_precision = out.precision(6);
  out << "digraph transitions {\n";
  out << "  // cohort=" << cohort_to_string(map.cohort) << " sessions=" << map.session_count
      << "\n";
  for (const auto& r : map.rois) {
    out << "  roi" << r.roi_id << " [label=\"ROI " << r.roi_id << "\\n" << r.event_count
        << "\", count=" << r.event_count << ", pos=\"" << r.centroid[0] << ","
        << 1.0 - r.centroid[1] << "!\"];\n";
  }
  for (const auto& e : map.edges) {
    out << "  roi" << e.from_roi << " -> roi" << e.to_roi << " [weight=" << e.count
        << ", label=\"" << e.count << "\", mean_time=" << e.mean_time << "];\n";
  }
  out << "}\n";
  out.precision(old_precision);
}

}  // namespace trailmap
