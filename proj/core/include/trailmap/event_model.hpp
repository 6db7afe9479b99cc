#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trailmap {

enum class EventType : std::uint8_t {
  kMove,
  kClick,
  kDragStart,
  kDrag,
  kDragEnd,
  kAnswerChange,
  kSubmit,
};

inline constexpr std::size_t kEventTypeCount = 7;

inline constexpr std::array<EventType, kEventTypeCount> kAllEventTypes = {
    EventType::kMove,    EventType::kClick,        EventType::kDragStart,
    EventType::kDrag,    EventType::kDragEnd,      EventType::kAnswerChange,
    EventType::kSubmit,
};

// Wire name as used in the event log ("move", "drag_start", ...).
std::string_view event_type_name(EventType type);
std::optional<EventType> parse_event_type(std::string_view name);

// Positional events carry x/y and contribute to heat grids and ROIs.
constexpr bool is_positional(EventType type) {
  return type == EventType::kMove || type == EventType::kClick ||
         type == EventType::kDragStart || type == EventType::kDrag ||
         type == EventType::kDragEnd;
}

struct RawEvent {
  std::string session_id;
  std::string student_id;
  std::string question_id;
  EventType type = EventType::kMove;
  std::int64_t t_ms = 0;
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> score;

  bool positional() const { return is_positional(type) && x && y; }

  friend bool operator==(const RawEvent&, const RawEvent&) = default;
};

struct Session {
  std::string session_id;
  std::string student_id;
  std::string question_id;
  std::vector<RawEvent> events;
  std::optional<double> outcome;
  // Normalized time order per event, parallel to `events`.
  std::vector<double> t_norm;

  std::size_t positional_count() const;
  std::map<EventType, std::size_t> type_counts() const;
};

struct QuestionMeta {
  std::string question_id;
  int difficulty_label = 1;
  double max_score = 1.0;
  std::optional<std::string> title;
  std::optional<std::string> background_image;

  friend bool operator==(const QuestionMeta&, const QuestionMeta&) = default;
};

struct LineError {
  std::size_t line = 0;
  std::string reason;
};

struct LineWarning {
  std::size_t line = 0;
  std::string message;
};

// Pixel canvas used to convert raw coordinates to the unit square.
struct CanvasSize {
  double width = 1.0;
  double height = 1.0;
};

struct ParseOptions {
  std::optional<CanvasSize> canvas;
};

struct ParseResult {
  std::vector<RawEvent> events;
  std::vector<LineError> errors;
  std::vector<LineWarning> warnings;
};

// Parses JSON-lines event records. Malformed lines are reported per line and
// skipped; only a failing stream throws (ErrorCode::kIo).
ParseResult parse_event_log(std::istream& in, const ParseOptions& options = {});
ParseResult parse_event_log_file(const std::string& path,
                                 const ParseOptions& options = {});

// One JSON object, no trailing newline. Re-parsing yields the same event.
std::string serialize_event(const RawEvent& event);
void write_event_log(std::ostream& out, std::span<const RawEvent> events);

// Partitions by session_id, stable-sorts each session by t_ms and annotates
// t_norm. Sessions are ordered by first event time, then first appearance.
std::vector<Session> group_sessions(std::span<const RawEvent> events);

// Recomputes t_norm from timestamps. Throws on an empty session.
Session normalize_time(Session session);

std::vector<QuestionMeta> parse_question_meta(std::istream& in);
std::vector<QuestionMeta> parse_question_meta_file(const std::string& path);
void write_question_meta(std::ostream& out, std::span<const QuestionMeta> metas);

// ---------------------------------------------------------------------------
// Cohorts

enum class CohortKind { kAll, kFullMarks, kWrong, kScoreRange };

struct CohortSpec {
  CohortKind kind = CohortKind::kAll;
  double lo = 0.0;
  double hi = 1.0;

  static CohortSpec all() { return {}; }
  static CohortSpec full_marks() { return {CohortKind::kFullMarks, 1.0, 1.0}; }
  static CohortSpec wrong() { return {CohortKind::kWrong, 0.0, 1.0}; }
  // Throws kInvalidArgument unless 0 <= lo <= hi <= 1.
  static CohortSpec score_range(double lo, double hi);

  // `normalized_score` is outcome / max_score; absent outcomes only match
  // the `all` cohort.
  bool matches(std::optional<double> normalized_score) const;

  friend bool operator==(const CohortSpec&, const CohortSpec&) = default;
};

// Grammar: all | full | wrong | range:LO-HI
CohortSpec parse_cohort(std::string_view text);
std::string cohort_to_string(const CohortSpec& cohort);

std::optional<double> normalized_outcome(const Session& session, double max_score);

}  // namespace trailmap
