#include "trailmap/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "trailmap/error.hpp"

namespace trailmap::synth {
namespace {

using nlohmann::json;

// Question-level draws use their own seed stream, disjoint from the
// per-session stream indexed by the global session serial.
constexpr std::uint64_t kQuestionStream = std::uint64_t{1} << 40;
constexpr std::int64_t kSessionSlotMs = 600'000;

double gaussian(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

void validate_pattern(const PatternSpec& spec, const std::vector<Point>& waypoints) {
  if (waypoints.empty()) throw invalid_argument("pattern has no waypoints");
  for (const auto& p : waypoints) {
    if (!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0)) {
      throw invalid_argument("waypoints must lie in the unit square");
    }
  }
  if (!(spec.jitter_sigma >= 0.0)) throw invalid_argument("jitter_sigma must be >= 0");
  if (spec.samples_per_leg < 1) throw invalid_argument("samples_per_leg must be >= 1");
  if (!(spec.dwell_ms > 0.0)) throw invalid_argument("dwell_ms must be > 0");
  if (spec.hold_samples < 0) throw invalid_argument("hold_samples must be >= 0");
  if (!is_positional(spec.event_type)) {
    throw invalid_argument("pattern event type must be positional");
  }
}

PatternKind parse_pattern_kind(const std::string& s) {
  if (s == "waypoint_path") return PatternKind::kWaypointPath;
  if (s == "additive_horizontal") return PatternKind::kAdditiveHorizontal;
  if (s == "additive_vertical") return PatternKind::kAdditiveVertical;
  if (s == "subtractive") return PatternKind::kSubtractive;
  throw invalid_argument("unknown pattern kind '" + s + "'");
}

template <typename T>
T value_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw invalid_argument(std::string("config field '") + key + "' has the wrong type");
  }
}

PatternSpec parse_pattern(const json& j) {
  PatternSpec p;
  if (!j.is_object()) throw invalid_argument("pattern must be an object");
  p.kind = parse_pattern_kind(value_or<std::string>(j, "kind", "waypoint_path"));
  if (auto it = j.find("waypoints"); it != j.end()) {
    if (!it->is_array()) throw invalid_argument("waypoints must be an array of [x, y]");
    for (const auto& w : *it) {
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
        throw invalid_argument("waypoints must be an array of [x, y]");
      }
      p.waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
    }
  }
  p.jitter_sigma = value_or(j, "jitter_sigma", p.jitter_sigma);
  p.samples_per_leg = value_or(j, "samples_per_leg", p.samples_per_leg);
  p.dwell_ms = value_or(j, "dwell_ms", p.dwell_ms);
  p.hold_samples = value_or(j, "hold_samples", p.hold_samples);
  const auto type_name = value_or<std::string>(j, "event_type", "move");
  const auto type = parse_event_type(type_name);
  if (!type) throw invalid_argument("unknown event type '" + type_name + "'");
  p.event_type = *type;
  return p;
}

OutcomeRule parse_outcome(const json& j) {
  OutcomeRule r;
  if (j.is_null()) return r;
  if (!j.is_object()) throw invalid_argument("outcome must be an object");
  const auto kind = value_or<std::string>(j, "kind", "model");
  if (kind == "model") {
    r.kind = OutcomeKind::kModel;
  } else if (kind == "constant") {
    r.kind = OutcomeKind::kConstant;
  } else if (kind == "bernoulli") {
    r.kind = OutcomeKind::kBernoulli;
  } else {
    throw invalid_argument("unknown outcome kind '" + kind + "'");
  }
  r.score = value_or(j, "score", r.score);
  r.p_full = value_or(j, "p_full", r.p_full);
  r.wrong_score = value_or(j, "wrong_score", r.wrong_score);
  return r;
}

double draw_outcome(const OutcomeRule& rule, double question_mean, const ScoreModel& model,
                    std::mt19937_64& rng) {
  switch (rule.kind) {
    case OutcomeKind::kModel:
      return std::clamp(question_mean + gaussian(rng, model.session_sigma), 0.0, 1.0);
    case OutcomeKind::kConstant:
      return std::clamp(rule.score, 0.0, 1.0);
    case OutcomeKind::kBernoulli: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      return u < rule.p_full ? 1.0 : std::clamp(rule.wrong_score, 0.0, 1.0);
    }
  }
  return 0.0;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<Point> preset_waypoints(PatternKind kind) {
  switch (kind) {
    case PatternKind::kAdditiveHorizontal: return {kDotStart, kHorizontalMid, kHorizontalTarget};
    case PatternKind::kAdditiveVertical: return {kDotStart, kVerticalMid, kVerticalTarget};
    case PatternKind::kSubtractive: return {kDotStart, kSubtractiveTarget};
    case PatternKind::kWaypointPath: break;
  }
  return {};
}

std::vector<Point> PatternSpec::resolved_waypoints() const {
  if (!waypoints.empty() || kind == PatternKind::kWaypointPath) return waypoints;
  return preset_waypoints(kind);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Session gen_session(const PatternSpec& spec, const SessionIds& ids, std::uint64_t seed,
                    double score, std::int64_t start_ms) {
  const auto waypoints = spec.resolved_waypoints();
  validate_pattern(spec, waypoints);
  if (!(score >= 0.0)) throw invalid_argument("score must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spacing(0.5, 1.5);
  std::int64_t t = start_ms;
  bool first = true;

  Session session;
  session.session_id = ids.session_id;
  session.student_id = ids.student_id;
  session.question_id = ids.question_id;

  auto next_time = [&] {
    if (!first) t += std::max<std::int64_t>(1, std::llround(spec.dwell_ms * spacing(rng)));
    first = false;
    return t;
  };
  auto emit = [&](double x, double y) {
    RawEvent e;
    e.session_id = ids.session_id;
    e.student_id = ids.student_id;
    e.question_id = ids.question_id;
    e.type = spec.event_type;
    e.t_ms = next_time();
    e.x = std::clamp(x + gaussian(rng, spec.jitter_sigma), 0.0, 1.0);
    e.y = std::clamp(y + gaussian(rng, spec.jitter_sigma), 0.0, 1.0);
    session.events.push_back(std::move(e));
  };
  auto emit_hold = [&](const Point& p) {
    for (int h = 0; h < spec.hold_samples; ++h) emit(p[0], p[1]);
  };

  for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
    const Point& a = waypoints[k];
    const Point& b = waypoints[k + 1];
    emit(a[0], a[1]);
    emit_hold(a);
    for (int s = 1; s < spec.samples_per_leg; ++s) {
      const double f = static_cast<double>(s) / spec.samples_per_leg;
      emit(a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]));
    }
  }
  emit(waypoints.back()[0], waypoints.back()[1]);
  emit_hold(waypoints.back());

  RawEvent submit;
  submit.session_id = ids.session_id;
  submit.student_id = ids.student_id;
  submit.question_id = ids.question_id;
  submit.type = EventType::kSubmit;
  submit.t_ms = next_time();
  submit.score = score;
  session.events.push_back(std::move(submit));
  session.outcome = score;
  return normalize_time(std::move(session));
}

Dataset gen_dataset(const DatasetConfig& config) {
  if (config.questions.empty() && !config.planted_mislabels.empty()) {
    throw invalid_argument("planted mislabels given without questions");
  }
  std::set<std::string> ids;
  int min_label = 0;
  int max_label = 0;
  for (std::size_t q = 0; q < config.questions.size(); ++q) {
    const auto& m = config.questions[q].meta;
    if (m.question_id.empty()) throw invalid_argument("question_id must be non-empty");
    if (!ids.insert(m.question_id).second) {
      throw invalid_argument("duplicate question_id '" + m.question_id + "'");
    }
    if (m.difficulty_label < 1) throw invalid_argument("difficulty must be >= 1");
    if (!(m.max_score > 0.0)) throw invalid_argument("max_score must be > 0");
    min_label = q == 0 ? m.difficulty_label : std::min(min_label, m.difficulty_label);
    max_label = q == 0 ? m.difficulty_label : std::max(max_label, m.difficulty_label);
    for (const auto& c : config.questions[q].cohorts) {
      if (c.session_count < 0) throw invalid_argument("session_count must be >= 0");
      validate_pattern(c.pattern, c.pattern.resolved_waypoints());
    }
  }
  const std::set<std::string> mislabels(config.planted_mislabels.begin(),
                                        config.planted_mislabels.end());
  for (const auto& id : mislabels) {
    if (!ids.contains(id)) throw invalid_argument("planted mislabel '" + id + "' is not a question");
  }

  Dataset out;
  std::uint64_t serial = 0;
  for (std::size_t q = 0; q < config.questions.size(); ++q) {
    const auto& qc = config.questions[q];
    std::mt19937_64 qrng(mix_seed(config.seed, kQuestionStream + q));
    const double mean = std::clamp(qc.score_model.intercept +
                                       qc.score_model.slope * qc.meta.difficulty_label +
                                       gaussian(qrng, qc.score_model.noise_sigma),
                                   0.0, 1.0);

    PlantedTruth truth;
    truth.question_id = qc.meta.question_id;
    truth.true_difficulty = qc.meta.difficulty_label;
    truth.published_difficulty = qc.meta.difficulty_label;
    truth.model_mean = mean;
    if (mislabels.contains(qc.meta.question_id)) {
      truth.mislabeled = true;
      truth.published_difficulty = min_label + max_label - qc.meta.difficulty_label;
      if (truth.published_difficulty == truth.true_difficulty) {
        throw invalid_argument("planted mislabel '" + qc.meta.question_id +
                               "' sits at the middle of the label range; mirroring is a no-op");
      }
    }
    QuestionMeta published = qc.meta;
    published.difficulty_label = truth.published_difficulty;
    out.metadata.push_back(published);
    out.truth.push_back(truth);

    for (std::size_t c = 0; c < qc.cohorts.size(); ++c) {
      const auto& cohort = qc.cohorts[c];
      const std::string tag = cohort.name.empty() ? "c" + std::to_string(c) : cohort.name;
      for (int s = 0; s < cohort.session_count; ++s) {
        const std::uint64_t session_seed = mix_seed(config.seed, serial);
        std::mt19937_64 orng(mix_seed(session_seed, 0));
        const double norm = draw_outcome(cohort.outcome, mean, qc.score_model, orng);
        SessionIds sid{qc.meta.question_id + "-" + tag + "-" + std::to_string(s),
                       tag + "-" + std::to_string(s), qc.meta.question_id};
        Session session = gen_session(cohort.pattern, sid, session_seed, norm * qc.meta.max_score,
                                      static_cast<std::int64_t>(serial) * kSessionSlotMs);
        out.events.insert(out.events.end(), std::make_move_iterator(session.events.begin()),
                          std::make_move_iterator(session.events.end()));
        ++serial;
      }
    }
  }
  return out;
}

DatasetConfig parse_dataset_config(const json& doc) {
  if (!doc.is_object()) throw invalid_argument("dataset config must be a JSON object");
  DatasetConfig config;
  config.seed = value_or<std::uint64_t>(doc, "seed", 0);
  config.planted_mislabels =
      value_or<std::vector<std::string>>(doc, "planted_mislabels", {});
  auto qs = doc.find("questions");
  if (qs == doc.end() || !qs->is_array()) {
    throw invalid_argument("dataset config needs a 'questions' array");
  }
  for (const auto& qj : *qs) {
    if (!qj.is_object()) throw invalid_argument("question entry must be an object");
    QuestionConfig qc;
    qc.meta.question_id = value_or<std::string>(qj, "question_id", "");
    qc.meta.difficulty_label = value_or(qj, "difficulty", 1);
    qc.meta.max_score = value_or(qj, "max_score", 1.0);
    if (qj.contains("title")) qc.meta.title = value_or<std::string>(qj, "title", "");
    if (qj.contains("background_image")) {
      qc.meta.background_image = value_or<std::string>(qj, "background_image", "");
    }
    if (auto sm = qj.find("score_model"); sm != qj.end()) {
      qc.score_model.intercept = value_or(*sm, "intercept", qc.score_model.intercept);
      qc.score_model.slope = value_or(*sm, "slope", qc.score_model.slope);
      qc.score_model.noise_sigma = value_or(*sm, "noise_sigma", qc.score_model.noise_sigma);
      qc.score_model.session_sigma = value_or(*sm, "session_sigma", qc.score_model.session_sigma);
    }
    if (auto cs = qj.find("cohorts"); cs != qj.end()) {
      if (!cs->is_array()) throw invalid_argument("'cohorts' must be an array");
      for (const auto& cj : *cs) {
        CohortConfig cc;
        cc.name = value_or<std::string>(cj, "name", "");
        cc.session_count = value_or(cj, "session_count", 0);
        cc.pattern = parse_pattern(cj.value("pattern", json::object()));
        cc.outcome = parse_outcome(cj.value("outcome", json()));
        qc.cohorts.push_back(std::move(cc));
      }
    }
    config.questions.push_back(std::move(qc));
  }
  return config;
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open dataset config '" + path.string() + "'");
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw invalid_argument("dataset config is not valid JSON");
  return parse_dataset_config(doc);
}

DatasetFiles write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create '" + dir.string() + "': " + ec.message());

  DatasetFiles files{dir / "events.jsonl", dir / "meta.json", dir / "truth.json"};

  std::string events;
  for (const auto& e : dataset.events) {
    events += serialize_event(e);
    events += '\n';
  }
  write_text(files.events, events);

  std::ostringstream meta;
  write_question_meta(meta, dataset.metadata);
  write_text(files.metadata, meta.str());

  nlohmann::ordered_json truth = nlohmann::ordered_json::array();
  for (const auto& t : dataset.truth) {
    truth.push_back({{"question_id", t.question_id},
                     {"true_difficulty", t.true_difficulty},
                     {"published_difficulty", t.published_difficulty},
                     {"model_mean", t.model_mean},
                     {"mislabeled", t.mislabeled}});
  }
  write_text(files.truth, truth.dump(2) + "\n");
  return files;
}

}  // namespace trailmap::synth
