#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trailmap/event_model.hpp"

namespace trailmap {

// Sample Pearson correlation. Throws kInvalidArgument on mismatched lengths,
// fewer than `min_size` samples, or zero variance in either input.
double pearson(std::span<const double> xs, std::span<const double> ys,
               std::size_t min_size = 3);

// Pearson correlation of average ranks (ties share the mean of their rank
// range). Same preconditions as pearson.
double spearman(std::span<const double> xs, std::span<const double> ys,
                std::size_t min_size = 3);

// 1-based ranks; tied values receive the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

struct QuestionStats {
  std::string question_id;
  int n_sessions = 0;
  // Sessions with a recorded outcome; the mean is taken over these.
  int n_scored = 0;
  double mean_score_norm = 0.0;
  int difficulty_label = 1;
};

// One entry per metadata question, in metadata order. Sessions for unknown
// questions are ignored.
std::vector<QuestionStats> compute_question_stats(std::span<const Session> sessions,
                                                  std::span<const QuestionMeta> metas);

enum class FlagDirection { kEasierThanLabeled, kHarderThanLabeled };
std::string_view flag_direction_name(FlagDirection direction);

struct FlaggedQuestion {
  std::string question_id;
  double residual = 0.0;
  FlagDirection direction = FlagDirection::kHarderThanLabeled;
};

inline constexpr double kDefaultKSigma = 2.0;

struct CorrelationReport {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  // Questions used in the fit, with their residuals (parallel vectors).
  std::vector<QuestionStats> per_question;
  std::vector<double> residuals;
  // Questions without scored sessions, left out of the fit.
  std::vector<QuestionStats> excluded;
  std::vector<FlaggedQuestion> flagged;
  double k_sigma = kDefaultKSigma;
  double intercept = 0.0;
  double slope = 0.0;
  double residual_sigma = 0.0;
};

// Least-squares line of mean score on difficulty label; questions whose
// |residual| exceeds k_sigma residual standard errors are flagged. Throws
// kFailedPrecondition with fewer than three scored questions or constant
// labels/scores.
CorrelationReport difficulty_report(std::span<const QuestionStats> stats,
                                    double k_sigma = kDefaultKSigma);

// question_id,difficulty,n,mean_score,residual,flagged
void write_report_csv(std::ostream& out, const CorrelationReport& report);

}  // namespace trailmap
