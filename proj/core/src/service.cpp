#include "trailmap/service.hpp"

#include <charconv>
#include <sstream>

#include "trailmap/analytics.hpp"
#include "trailmap/json_io.hpp"
#include "trailmap/pipeline.hpp"

namespace trailmap {
namespace {

constexpr int kMinResolution = 8;
constexpr int kMaxResolution = 512;

ApiResponse json_response(int status, const ojson& body) { return {status, body.dump()}; }

ApiResponse error_response(ErrorCode code, const std::string& message) {
  ojson err;
  err["error"]["code"] = error_code_name(code);
  err["error"]["message"] = message;
  return json_response(http_status_for(code), err);
}

ApiResponse method_not_allowed(const std::string& method) {
  ojson err;
  err["error"]["code"] = "method_not_allowed";
  err["error"]["message"] = "method not allowed: " + method;
  return json_response(405, err);
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const auto part = path.substr(0, slash);
    if (!part.empty()) parts.push_back(part);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

const std::string* find_param(const ApiRequest& req, const char* name) {
  auto it = req.params.find(name);
  return it == req.params.end() ? nullptr : &it->second;
}

int int_param(const ApiRequest& req, const char* name, int fallback) {
  const std::string* v = find_param(req, name);
  if (v == nullptr) return fallback;
  int out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty()) {
    throw invalid_argument(std::string("parameter '") + name + "' must be an integer");
  }
  return out;
}

double real_param(const ApiRequest& req, const char* name, double fallback) {
  const std::string* v = find_param(req, name);
  if (v == nullptr) return fallback;
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty()) {
    throw invalid_argument(std::string("parameter '") + name + "' must be a number");
  }
  return out;
}

CohortSpec cohort_param(const ApiRequest& req) {
  const std::string* v = find_param(req, "cohort");
  return v == nullptr ? CohortSpec::all() : parse_cohort(*v);
}

int resolution_param(const ApiRequest& req) {
  const int res = int_param(req, "res", kDefaultGridSize);
  if (res < kMinResolution || res > kMaxResolution) {
    throw invalid_argument("parameter 'res' must be in [" + std::to_string(kMinResolution) + ", " +
                           std::to_string(kMaxResolution) + "]");
  }
  return res;
}

double sigma_param(const ApiRequest& req) {
  const double sigma = real_param(req, "sigma", kDefaultSigma);
  if (!(sigma >= 0.0)) throw invalid_argument("parameter 'sigma' must be >= 0");
  return sigma;
}

ApiResponse list_questions(const DatasetSnapshot& snap) {
  const auto stats = compute_question_stats(snap.sessions(), snap.metadata());
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& meta = snap.metadata()[i];
    ojson q;
    q["question_id"] = meta.question_id;
    q["title"] = meta.title ? ojson(*meta.title) : ojson(nullptr);
    q["difficulty"] = meta.difficulty_label;
    q["n_sessions"] = stats[i].n_sessions;
    q["mean_score_norm"] = stats[i].n_scored > 0 ? ojson(stats[i].mean_score_norm) : ojson(nullptr);
    q["background_image"] = meta.background_image ? ojson(*meta.background_image) : ojson(nullptr);
    arr.push_back(std::move(q));
  }
  return json_response(200, arr);
}

const QuestionMeta& require_question(const DatasetSnapshot& snap, std::string_view id) {
  const QuestionMeta* meta = snap.question(id);
  if (meta == nullptr) throw not_found("unknown question '" + std::string(id) + "'");
  return *meta;
}

ApiResponse question_heatmap_route(const DatasetSnapshot& snap, std::string_view id,
                                   const ApiRequest& req) {
  const QuestionMeta& meta = require_question(snap, id);
  HeatmapQuery query;
  query.resolution = resolution_param(req);
  query.sigma = sigma_param(req);
  query.cohort = cohort_param(req);
  if (const std::string* w = find_param(req, "weight")) {
    if (*w == "dwell") {
      query.dwell_weighted = true;
    } else if (*w != "count") {
      throw invalid_argument("parameter 'weight' must be 'count' or 'dwell'");
    }
  }
  const auto sessions = snap.sessions_for(id);
  ojson body = grid_to_json(question_heatmap(sessions, meta.max_score, query));
  body["question_id"] = meta.question_id;
  body["res"] = query.resolution;
  body["cohort"] = cohort_to_string(query.cohort);
  body["weight"] = query.dwell_weighted ? "dwell" : "count";
  return json_response(200, body);
}

ApiResponse question_transitions_route(const DatasetSnapshot& snap, std::string_view id,
                                       const ApiRequest& req) {
  const QuestionMeta& meta = require_question(snap, id);
  TransitionQuery query;
  query.resolution = resolution_param(req);
  query.sigma = sigma_param(req);
  query.cohort = cohort_param(req);
  query.roi.merge_radius = real_param(req, "roi_size", query.roi.merge_radius);
  query.roi.tau = real_param(req, "tau", query.roi.tau);
  query.roi.min_events = int_param(req, "min_events", query.roi.min_events);
  query.roi.time_bins = int_param(req, "bins", query.roi.time_bins);
  query.min_edge_count = int_param(req, "min_edge", query.min_edge_count);
  if (query.min_edge_count < 0) throw invalid_argument("parameter 'min_edge' must be >= 0");

  const auto sessions = snap.sessions_for(id);
  const auto result = question_transitions(sessions, meta.max_score, query);
  ojson body = transition_map_to_json(result.map);
  ojson params;
  params["question_id"] = meta.question_id;
  params["res"] = query.resolution;
  params["sigma"] = query.sigma;
  params["roi_size"] = query.roi.merge_radius;
  params["tau"] = query.roi.tau;
  params["min_events"] = query.roi.min_events;
  params["bins"] = query.roi.time_bins;
  params["min_edge"] = query.min_edge_count;
  body["params"] = std::move(params);
  return json_response(200, body);
}

ApiResponse correlation_route(const DatasetSnapshot& snap, const ApiRequest& req) {
  const double k = real_param(req, "k", kDefaultKSigma);
  if (!(k >= 0.0)) throw invalid_argument("parameter 'k' must be >= 0");
  const auto stats = compute_question_stats(snap.sessions(), snap.metadata());
  return json_response(200, report_to_json(difficulty_report(stats, k)));
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kFailedPrecondition: return 412;
    case ErrorCode::kUnavailable: return 503;
    case ErrorCode::kIo: return 500;
  }
  return 500;
}

DatasetSnapshot::DatasetSnapshot(std::uint64_t id, std::span<const RawEvent> events,
                                 std::vector<QuestionMeta> metadata)
    : id_(id), metadata_(std::move(metadata)), sessions_(group_sessions(events)),
      event_count_(events.size()) {
  for (std::size_t i = 0; i < sessions_.size(); ++i) {
    by_question_[sessions_[i].question_id].push_back(i);
  }
  for (const auto& [qid, idx] : by_question_) {
    bool known = false;
    for (const auto& m : metadata_) known = known || m.question_id == qid;
    if (!known) {
      QuestionMeta m;
      m.question_id = qid;
      event_only_questions_.emplace(qid, std::move(m));
    }
  }
}

const QuestionMeta* DatasetSnapshot::question(std::string_view question_id) const {
  for (const auto& m : metadata_) {
    if (m.question_id == question_id) return &m;
  }
  auto it = event_only_questions_.find(question_id);
  return it == event_only_questions_.end() ? nullptr : &it->second;
}

std::vector<Session> DatasetSnapshot::sessions_for(std::string_view question_id) const {
  std::vector<Session> out;
  auto it = by_question_.find(question_id);
  if (it == by_question_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t i : it->second) out.push_back(sessions_[i]);
  return out;
}

std::uint64_t AnalyticsService::load(std::span<const RawEvent> events,
                                     std::vector<QuestionMeta> metadata) {
  std::uint64_t id = 0;
  {
    std::lock_guard lock(mu_);
    id = next_id_++;
  }
  // Built outside the lock; publication is a single pointer swap.
  auto snap = std::make_shared<const DatasetSnapshot>(id, events, std::move(metadata));
  std::lock_guard lock(mu_);
  if (!current_ || current_->id() < id) current_ = std::move(snap);
  return id;
}

std::shared_ptr<const DatasetSnapshot> AnalyticsService::snapshot() const {
  std::lock_guard lock(mu_);
  return current_;
}

ApiResponse AnalyticsService::ingest(const ApiRequest& request) {
  std::istringstream in(request.body);
  ParseResult parsed = parse_event_log(in);
  std::vector<QuestionMeta> metadata;
  if (auto snap = snapshot()) metadata = snap->metadata();
  const std::uint64_t id = load(parsed.events, std::move(metadata));
  ojson body;
  body["snapshot_id"] = id;
  body["events"] = parsed.events.size();
  body["sessions"] = snapshot()->sessions().size();
  ojson errors = ojson::array();
  for (const auto& e : parsed.errors) errors.push_back({{"line", e.line}, {"reason", e.reason}});
  body["errors"] = std::move(errors);
  body["warnings"] = parsed.warnings.size();
  return json_response(200, body);
}

ApiResponse AnalyticsService::handle(const ApiRequest& request) {
  try {
    const auto parts = split_path(request.path);
    if (parts.size() < 2 || parts[0] != "api") {
      throw not_found("no route for '" + request.path + "'");
    }
    if (parts.size() == 2 && parts[1] == "ingest") {
      if (request.method != "POST") return method_not_allowed(request.method);
      return ingest(request);
    }

    const bool questions_route = parts[1] == "questions" && (parts.size() == 2 || parts.size() == 4);
    const bool correlation_route_match = parts[1] == "correlation" && parts.size() == 2;
    const bool heatmap = questions_route && parts.size() == 4 && parts[3] == "heatmap";
    const bool transitions = questions_route && parts.size() == 4 && parts[3] == "transitions";
    if (!(correlation_route_match || (questions_route && parts.size() == 2) || heatmap ||
          transitions)) {
      throw not_found("no route for '" + request.path + "'");
    }
    if (request.method != "GET") {
      return method_not_allowed(request.method);
    }

    const auto snap = snapshot();
    if (!snap) throw Error(ErrorCode::kUnavailable, "no dataset loaded");
    if (correlation_route_match) return correlation_route(*snap, request);
    if (parts.size() == 2) return list_questions(*snap);
    if (heatmap) return question_heatmap_route(*snap, parts[2], request);
    return question_transitions_route(*snap, parts[2], request);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  }
}

}  // namespace trailmap
