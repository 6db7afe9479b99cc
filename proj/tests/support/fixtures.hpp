#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "trailmap/event_model.hpp"
#include "trailmap/roi.hpp"

namespace trailmap::fixture {

inline RawEvent point_event(const std::string& session, std::int64_t t, double x, double y,
                            EventType type = EventType::kMove,
                            const std::string& question = "q1") {
  RawEvent e;
  e.session_id = session;
  e.student_id = "u-" + session;
  e.question_id = question;
  e.type = type;
  e.t_ms = t;
  e.x = x;
  e.y = y;
  return e;
}

inline RawEvent submit_event(const std::string& session, std::int64_t t, double score,
                             const std::string& question = "q1") {
  RawEvent e;
  e.session_id = session;
  e.student_id = "u-" + session;
  e.question_id = question;
  e.type = EventType::kSubmit;
  e.t_ms = t;
  e.score = score;
  return e;
}

inline double clamp01(double v) { return v < 0 ? 0 : (v > 1 ? 1 : v); }

// Gaussian blobs of `per_center` points around each center.
inline std::vector<std::pair<double, double>> blobs(const std::vector<std::pair<double, double>>& centers,
                                                    int per_center, double sigma,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<std::pair<double, double>> pts;
  for (const auto& [cx, cy] : centers) {
    for (int k = 0; k < per_center; ++k) {
      pts.emplace_back(clamp01(cx + noise(rng)), clamp01(cy + noise(rng)));
    }
  }
  return pts;
}

// One session per point, so every point is its own single-event session
// with t_norm 0. Useful for ROI tests that do not care about time.
inline std::vector<TimedPoint> timed(const std::vector<std::pair<double, double>>& pts) {
  std::vector<TimedPoint> out;
  out.reserve(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out.push_back({pts[k].first, pts[k].second, EventType::kMove,
                   static_cast<double>(k % 10) / 10.0});
  }
  return out;
}

inline std::vector<RawEvent> as_events(const std::vector<std::pair<double, double>>& pts) {
  std::vector<RawEvent> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out.push_back(point_event("s", static_cast<std::int64_t>(k), pts[k].first, pts[k].second));
  }
  return out;
}

}  // namespace trailmap::fixture
