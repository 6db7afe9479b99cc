#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "trailmap/event_model.hpp"

namespace trailmap::synth {

using Point = std::array<double, 2>;

enum class PatternKind { kWaypointPath, kAdditiveHorizontal, kAdditiveVertical, kSubtractive };

// Layout of the drag-the-corner area task: a 2x2-unit square with its free
// corner at kDotStart. Horizontal and vertical additive paths extend one
// edge by a unit via a midpoint; the subtractive path heads for a separate
// target.
inline constexpr Point kDotStart = {0.5, 0.5};
inline constexpr Point kHorizontalMid = {0.6, 0.5};
inline constexpr Point kHorizontalTarget = {0.7, 0.5};
inline constexpr Point kVerticalMid = {0.5, 0.4};
inline constexpr Point kVerticalTarget = {0.5, 0.3};
inline constexpr Point kSubtractiveTarget = {0.8, 0.7};

struct PatternSpec {
  PatternKind kind = PatternKind::kWaypointPath;
  // Required for kWaypointPath; the other kinds use their preset layout when
  // this is empty.
  std::vector<Point> waypoints;
  double jitter_sigma = 0.0;
  int samples_per_leg = 5;
  double dwell_ms = 100.0;
  // Extra jittered samples emitted while pausing at each waypoint.
  int hold_samples = 0;
  EventType event_type = EventType::kMove;

  // Waypoints after applying the preset for `kind`.
  std::vector<Point> resolved_waypoints() const;
};

std::vector<Point> preset_waypoints(PatternKind kind);

struct SessionIds {
  std::string session_id;
  std::string student_id;
  std::string question_id;
};

// Moves along the waypoints (samples_per_leg per leg, final waypoint
// included), then a submit carrying `score`. Timestamps start at
// `start_ms` and strictly increase. Deterministic in (spec, ids, seed).
Session gen_session(const PatternSpec& spec, const SessionIds& ids, std::uint64_t seed,
                    double score, std::int64_t start_ms = 0);

// splitmix64 finalizer; derives per-session seeds from the dataset seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

enum class OutcomeKind { kModel, kConstant, kBernoulli };

// Normalized outcome per session. kModel draws from the question's score
// model; kBernoulli yields 1 with probability p_full, else wrong_score.
struct OutcomeRule {
  OutcomeKind kind = OutcomeKind::kModel;
  double score = 1.0;
  double p_full = 0.5;
  double wrong_score = 0.0;
};

struct CohortConfig {
  std::string name;
  PatternSpec pattern;
  int session_count = 0;
  OutcomeRule outcome;
};

// Question-level mean = intercept + slope * difficulty + N(0, noise_sigma);
// each session adds N(0, session_sigma). Both are clamped to [0, 1].
struct ScoreModel {
  double intercept = 0.95;
  double slope = -0.1;
  double noise_sigma = 0.0;
  double session_sigma = 0.0;
};

struct QuestionConfig {
  QuestionMeta meta;  // difficulty_label is the true difficulty
  ScoreModel score_model;
  std::vector<CohortConfig> cohorts;
};

struct DatasetConfig {
  std::vector<QuestionConfig> questions;
  // These questions are published with their label mirrored across the
  // label range (min + max - true), so they look easier or harder than
  // their scores.
  std::vector<std::string> planted_mislabels;
  std::uint64_t seed = 0;
};

struct PlantedTruth {
  std::string question_id;
  int true_difficulty = 1;
  int published_difficulty = 1;
  double model_mean = 0.0;
  bool mislabeled = false;
};

struct Dataset {
  std::vector<RawEvent> events;
  std::vector<QuestionMeta> metadata;  // published labels
  std::vector<PlantedTruth> truth;
};

// Throws kInvalidArgument on an inconsistent config.
Dataset gen_dataset(const DatasetConfig& config);

DatasetConfig parse_dataset_config(const nlohmann::json& doc);
DatasetConfig load_dataset_config(const std::filesystem::path& path);

struct DatasetFiles {
  std::filesystem::path events;    // events.jsonl
  std::filesystem::path metadata;  // meta.json
  std::filesystem::path truth;     // truth.json
};

// Writes the dataset into `dir` (created if missing). Throws kIo.
DatasetFiles write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace trailmap::synth
