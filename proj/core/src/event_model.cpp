#include "trailmap/event_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "trailmap/error.hpp"

namespace trailmap {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kEventTypeCount> kEventTypeNames = {
    "move", "click", "drag_start", "drag", "drag_end", "answer_change", "submit",
};

// Full marks tolerate rounding in outcome / max_score.
constexpr double kFullMarksEpsilon = 1e-9;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

const json* find_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

// Returns an error reason, or empty on success.
std::string read_id(const json& obj, const char* key, std::string& out) {
  const json* v = find_field(obj, key);
  if (v == nullptr) return std::string("missing field '") + key + "'";
  if (!v->is_string()) return std::string("field '") + key + "' must be a string";
  out = v->get<std::string>();
  if (out.empty()) return std::string("field '") + key + "' must be non-empty";
  return {};
}

struct CoordResult {
  std::optional<double> value;
  std::string error;
  bool clamped = false;
};

CoordResult read_coord(const json& obj, const char* key, double scale) {
  CoordResult r;
  const json* v = find_field(obj, key);
  if (v == nullptr || v->is_null()) return r;
  if (!v->is_number()) {
    r.error = std::string("field '") + key + "' must be a number";
    return r;
  }
  double value = v->get<double>() / scale;
  if (value < 0.0 || value > 1.0) {
    value = std::clamp(value, 0.0, 1.0);
    r.clamped = true;
  }
  r.value = value;
  return r;
}

std::string parse_line(const json& obj, const ParseOptions& options, RawEvent& ev,
                       std::vector<std::string>& warnings) {
  if (!obj.is_object()) return "line is not a JSON object";
  if (auto e = read_id(obj, "session_id", ev.session_id); !e.empty()) return e;
  if (auto e = read_id(obj, "student_id", ev.student_id); !e.empty()) return e;
  if (auto e = read_id(obj, "question_id", ev.question_id); !e.empty()) return e;

  const json* type = find_field(obj, "type");
  if (type == nullptr) return "missing field 'type'";
  if (!type->is_string()) return "field 'type' must be a string";
  const auto parsed_type = parse_event_type(type->get_ref<const std::string&>());
  if (!parsed_type) return "unknown event type '" + type->get<std::string>() + "'";
  ev.type = *parsed_type;

  const json* t = find_field(obj, "t");
  if (t == nullptr) return "missing field 't'";
  if (!t->is_number_integer()) return "field 't' must be an integer";
  if (t->is_number_unsigned()) {
    const auto u = t->get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) return "field 't' out of range";
    ev.t_ms = static_cast<std::int64_t>(u);
  } else {
    ev.t_ms = t->get<std::int64_t>();
  }
  if (ev.t_ms < 0) return "field 't' must be non-negative";

  const double sx = options.canvas ? options.canvas->width : 1.0;
  const double sy = options.canvas ? options.canvas->height : 1.0;
  auto x = read_coord(obj, "x", sx);
  if (!x.error.empty()) return x.error;
  auto y = read_coord(obj, "y", sy);
  if (!y.error.empty()) return y.error;
  if (is_positional(ev.type) && (!x.value || !y.value)) {
    return "positional event '" + std::string(event_type_name(ev.type)) +
           "' requires x and y";
  }
  ev.x = x.value;
  ev.y = y.value;
  if (x.clamped) warnings.emplace_back("x clamped to [0,1]");
  if (y.clamped) warnings.emplace_back("y clamped to [0,1]");

  const json* score = find_field(obj, "score");
  const bool has_score = score != nullptr && !score->is_null();
  if (ev.type == EventType::kSubmit) {
    if (!has_score) return "submit event requires 'score'";
    if (!score->is_number()) return "field 'score' must be a number";
    const double s = score->get<double>();
    if (s < 0.0) return "field 'score' must be non-negative";
    ev.score = s;
  } else if (has_score) {
    return "field 'score' is only allowed on submit events";
  }
  return {};
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kFailedPrecondition: return "failed_precondition";
    case ErrorCode::kUnavailable: return "unavailable";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

std::string_view event_type_name(EventType type) {
  return kEventTypeNames[static_cast<std::size_t>(type)];
}

std::optional<EventType> parse_event_type(std::string_view name) {
  for (std::size_t i = 0; i < kEventTypeNames.size(); ++i) {
    if (kEventTypeNames[i] == name) return static_cast<EventType>(i);
  }
  return std::nullopt;
}

std::size_t Session::positional_count() const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [](const RawEvent& e) { return e.positional(); }));
}

std::map<EventType, std::size_t> Session::type_counts() const {
  std::map<EventType, std::size_t> counts;
  for (const auto& e : events) ++counts[e.type];
  return counts;
}

ParseResult parse_event_log(std::istream& in, const ParseOptions& options) {
  if (options.canvas && (options.canvas->width <= 0 || options.canvas->height <= 0)) {
    throw invalid_argument("canvas dimensions must be positive");
  }
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> warnings;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    json obj = json::parse(body.begin(), body.end(), nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) {
      result.errors.push_back({line_no, "invalid JSON"});
      continue;
    }
    RawEvent ev;
    warnings.clear();
    if (auto reason = parse_line(obj, options, ev, warnings); !reason.empty()) {
      result.errors.push_back({line_no, std::move(reason)});
      continue;
    }
    for (auto& w : warnings) result.warnings.push_back({line_no, std::move(w)});
    result.events.push_back(std::move(ev));
  }
  if (in.bad()) throw io_error("failed reading event stream at line " + std::to_string(line_no));
  return result;
}

ParseResult parse_event_log_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open event log '" + path + "'");
  return parse_event_log(in, options);
}

std::string serialize_event(const RawEvent& event) {
  nlohmann::ordered_json j;
  j["session_id"] = event.session_id;
  j["student_id"] = event.student_id;
  j["question_id"] = event.question_id;
  j["type"] = event_type_name(event.type);
  j["t"] = event.t_ms;
  if (event.x) j["x"] = *event.x;
  if (event.y) j["y"] = *event.y;
  if (event.score) j["score"] = *event.score;
  return j.dump();
}

void write_event_log(std::ostream& out, std::span<const RawEvent> events) {
  for (const auto& e : events) out << serialize_event(e) << '\n';
}

std::vector<Session> group_sessions(std::span<const RawEvent> events) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Session> sessions;
  for (const auto& e : events) {
    auto [it, inserted] = index.try_emplace(e.session_id, sessions.size());
    if (inserted) {
      Session s;
      s.session_id = e.session_id;
      sessions.push_back(std::move(s));
    }
    sessions[it->second].events.push_back(e);
  }

  for (auto& s : sessions) {
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.t_ms < b.t_ms; });
    s.student_id = s.events.front().student_id;
    s.question_id = s.events.front().question_id;
    for (const auto& e : s.events) {
      if (e.type == EventType::kSubmit) s.outcome = e.score;
    }
    s = normalize_time(std::move(s));
  }

  // Sessions are still in first-appearance order, so a stable sort on start
  // time gives the documented tie-break.
  std::stable_sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    return a.events.front().t_ms < b.events.front().t_ms;
  });
  return sessions;
}

Session normalize_time(Session session) {
  if (session.events.empty()) {
    throw invalid_argument("cannot normalize time of empty session '" +
                           session.session_id + "'");
  }
  const std::int64_t t0 = session.events.front().t_ms;
  const std::int64_t span = session.events.back().t_ms - t0;
  session.t_norm.assign(session.events.size(), 0.0);
  if (span > 0) {
    for (std::size_t i = 0; i < session.events.size(); ++i) {
      session.t_norm[i] = static_cast<double>(session.events[i].t_ms - t0) /
                          static_cast<double>(span);
    }
  }
  return session;
}

std::vector<QuestionMeta> parse_question_meta(std::istream& in) {
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (in.bad()) throw io_error("failed reading question metadata");
  if (doc.is_discarded()) throw invalid_argument("question metadata is not valid JSON");
  if (!doc.is_array()) throw invalid_argument("question metadata must be a JSON array");

  std::vector<QuestionMeta> metas;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& obj = doc[i];
    const std::string where = "question metadata entry " + std::to_string(i);
    if (!obj.is_object()) throw invalid_argument(where + " is not an object");
    QuestionMeta m;
    if (auto e = read_id(obj, "question_id", m.question_id); !e.empty()) {
      throw invalid_argument(where + ": " + e);
    }
    const json* d = find_field(obj, "difficulty");
    if (d == nullptr || !d->is_number_integer() || d->get<std::int64_t>() < 1) {
      throw invalid_argument(where + ": 'difficulty' must be an integer >= 1");
    }
    m.difficulty_label = d->get<int>();
    const json* ms = find_field(obj, "max_score");
    if (ms == nullptr || !ms->is_number() || !(ms->get<double>() > 0.0)) {
      throw invalid_argument(where + ": 'max_score' must be a number > 0");
    }
    m.max_score = ms->get<double>();
    if (const json* t = find_field(obj, "title"); t != nullptr && t->is_string()) {
      m.title = t->get<std::string>();
    }
    if (const json* b = find_field(obj, "background_image"); b != nullptr && b->is_string()) {
      m.background_image = b->get<std::string>();
    }
    for (const auto& prev : metas) {
      if (prev.question_id == m.question_id) {
        throw invalid_argument(where + ": duplicate question_id '" + m.question_id + "'");
      }
    }
    metas.push_back(std::move(m));
  }
  return metas;
}

std::vector<QuestionMeta> parse_question_meta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open question metadata '" + path + "'");
  return parse_question_meta(in);
}

void write_question_meta(std::ostream& out, std::span<const QuestionMeta> metas) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& m : metas) {
    nlohmann::ordered_json j;
    j["question_id"] = m.question_id;
    j["difficulty"] = m.difficulty_label;
    j["max_score"] = m.max_score;
    if (m.title) j["title"] = *m.title;
    if (m.background_image) j["background_image"] = *m.background_image;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

CohortSpec CohortSpec::score_range(double lo, double hi) {
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
    std::ostringstream msg;
    msg << "score range requires 0 <= lo <= hi <= 1, got " << lo << "-" << hi;
    throw invalid_argument(msg.str());
  }
  return {CohortKind::kScoreRange, lo, hi};
}

bool CohortSpec::matches(std::optional<double> normalized_score) const {
  if (kind == CohortKind::kAll) return true;
  if (!normalized_score) return false;
  const double s = *normalized_score;
  switch (kind) {
    case CohortKind::kFullMarks: return s >= 1.0 - kFullMarksEpsilon;
    case CohortKind::kWrong: return s < 1.0 - kFullMarksEpsilon;
    case CohortKind::kScoreRange: return s >= lo && s <= hi;
    case CohortKind::kAll: break;
  }
  return true;
}

namespace {

std::optional<double> parse_unit_real(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

}  // namespace

CohortSpec parse_cohort(std::string_view text) {
  if (text == "all") return CohortSpec::all();
  if (text == "full") return CohortSpec::full_marks();
  if (text == "wrong") return CohortSpec::wrong();
  constexpr std::string_view kRange = "range:";
  if (text.starts_with(kRange)) {
    const auto body = text.substr(kRange.size());
    // Bounds are non-negative, so the first '-' separates them.
    const auto dash = body.find('-');
    if (dash != std::string_view::npos) {
      const auto lo = parse_unit_real(body.substr(0, dash));
      const auto hi = parse_unit_real(body.substr(dash + 1));
      if (lo && hi) return CohortSpec::score_range(*lo, *hi);
    }
  }
  throw invalid_argument("invalid cohort '" + std::string(text) +
                         "' (expected all | full | wrong | range:LO-HI)");
}

std::string cohort_to_string(const CohortSpec& cohort) {
  switch (cohort.kind) {
    case CohortKind::kAll: return "all";
    case CohortKind::kFullMarks: return "full";
    case CohortKind::kWrong: return "wrong";
    case CohortKind::kScoreRange: {
      std::ostringstream s;
      s << "range:" << cohort.lo << "-" << cohort.hi;
      return s.str();
    }
  }
  return "all";
}

std::optional<double> normalized_outcome(const Session& session, double max_score) {
  if (!session.outcome) return std::nullopt;
  return std::clamp(*session.outcome / max_score, 0.0, 1.0);
}

}  // namespace trailmap
