#include "trailmap/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "trailmap/error.hpp"

namespace trailmap {
namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_pair(std::span<const double> xs, std::span<const double> ys, std::size_t min_size) {
  if (xs.size() != ys.size()) {
    throw invalid_argument("correlation inputs differ in length (" + std::to_string(xs.size()) +
                           " vs " + std::to_string(ys.size()) + ")");
  }
  if (xs.size() < min_size) {
    throw invalid_argument("correlation needs at least " + std::to_string(min_size) +
                           " samples, got " + std::to_string(xs.size()));
  }
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys, std::size_t min_size) {
  check_pair(xs, ys, std::max<std::size_t>(min_size, 2));
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw invalid_argument("correlation undefined for zero variance");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys, std::size_t min_size) {
  check_pair(xs, ys, std::max<std::size_t>(min_size, 2));
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry, min_size);
}

std::vector<QuestionStats> compute_question_stats(std::span<const Session> sessions,
                                                  std::span<const QuestionMeta> metas) {
  std::vector<QuestionStats> stats;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<double> sums(metas.size(), 0.0);
  for (const auto& m : metas) {
    index.emplace(m.question_id, stats.size());
    QuestionStats q;
    q.question_id = m.question_id;
    q.difficulty_label = m.difficulty_label;
    stats.push_back(std::move(q));
  }
  for (const auto& s : sessions) {
    auto it = index.find(s.question_id);
    if (it == index.end()) continue;
    QuestionStats& q = stats[it->second];
    ++q.n_sessions;
    if (auto norm = normalized_outcome(s, metas[it->second].max_score)) {
      ++q.n_scored;
      sums[it->second] += *norm;
    }
  }
  for (std::size_t k = 0; k < stats.size(); ++k) {
    if (stats[k].n_scored > 0) stats[k].mean_score_norm = sums[k] / stats[k].n_scored;
  }
  return stats;
}

std::string_view flag_direction_name(FlagDirection direction) {
  return direction == FlagDirection::kHarderThanLabeled ? "harder_than_labeled"
                                                        : "easier_than_labeled";
}

CorrelationReport difficulty_report(std::span<const QuestionStats> stats, double k_sigma) {
  if (!(k_sigma >= 0.0)) throw invalid_argument("k_sigma must be >= 0");
  CorrelationReport report;
  report.k_sigma = k_sigma;
  for (const auto& q : stats) {
    (q.n_scored > 0 ? report.per_question : report.excluded).push_back(q);
  }
  const std::size_t n = report.per_question.size();
  if (n < 3) {
    throw failed_precondition("difficulty report needs at least 3 questions with scored "
                              "sessions, got " + std::to_string(n));
  }

  std::vector<double> labels;
  std::vector<double> scores;
  for (const auto& q : report.per_question) {
    labels.push_back(static_cast<double>(q.difficulty_label));
    scores.push_back(q.mean_score_norm);
  }
  const double mx = mean_of(labels);
  const double my = mean_of(scores);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (labels[i] - mx) * (labels[i] - mx);
    sxy += (labels[i] - mx) * (scores[i] - my);
    syy += (scores[i] - my) * (scores[i] - my);
  }
  if (sxx == 0.0) throw failed_precondition("difficulty labels are all equal");
  if (syy == 0.0) throw failed_precondition("mean scores are all equal");

  report.pearson_r = pearson(labels, scores);
  report.spearman_rho = spearman(labels, scores);
  report.slope = sxy / sxx;
  report.intercept = my - report.slope * mx;

  double ss_res = 0.0;
  report.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.residuals[i] = scores[i] - (report.intercept + report.slope * labels[i]);
    ss_res += report.residuals[i] * report.residuals[i];
  }
  // Standard error of the regression (n - 2 degrees of freedom); with n = 3
  // and a perfect fit this is 0.
  report.residual_sigma = std::sqrt(ss_res / static_cast<double>(n - 2));

  // Residuals at rounding level count as an exact fit.
  const double scale = std::sqrt(syy / static_cast<double>(n));
  if (report.residual_sigma <= 1e-9 * scale) return report;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = report.residuals[i];
    if (std::abs(r) > k_sigma * report.residual_sigma) {
      report.flagged.push_back({report.per_question[i].question_id, r,
                                r < 0.0 ? FlagDirection::kHarderThanLabeled
                                        : FlagDirection::kEasierThanLabeled});
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const CorrelationReport& report) {
  out << "question_id,difficulty,n,mean_score,residual,flagged\n";
  auto is_flagged = [&](const std::string& id) {
    return std::any_of(report.flagged.begin(), report.flagged.end(),
                       [&](const FlaggedQuestion& f) { return f.question_id == id; });
  };
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < report.per_question.size(); ++i) {
    const auto& q = report.per_question[i];
    out << csv_field(q.question_id) << ',' << q.difficulty_label << ',' << q.n_sessions << ','
        << q.mean_score_norm << ',' << report.residuals[i] << ','
        << (is_flagged(q.question_id) ? "true" : "false") << '\n';
  }
  for (const auto& q : report.excluded) {
    out << csv_field(q.question_id) << ',' << q.difficulty_label << ',' << q.n_sessions << ",,,false\n";
  }
  out.precision(old_precision);
}

}  // namespace trailmap
