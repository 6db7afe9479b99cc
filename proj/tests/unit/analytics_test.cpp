#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "trailmap/analytics.hpp"
#include "trailmap/error.hpp"
#include "trailmap/synthgen.hpp"

namespace trailmap {
namespace {

using Vec = std::vector<double>;

Vec random_vector(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  std::uniform_int_distribution<int> small(0, 4);
  Vec v(n);
  for (auto& x : v) x = ties ? static_cast<double>(small(rng)) : unit(rng);
  return v;
}

bool has_variance(const Vec& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) != v.end();
}

TEST(Pearson, IdentityAndAntiCorrelation) {
  const Vec xs = {1, 2, 3, 4, 5};
  EXPECT_NEAR(pearson(xs, xs), 1.0, 1e-15);
  Vec ys;
  for (double x : xs) ys.push_back(-x + 7);
  EXPECT_NEAR(pearson(xs, ys), -1.0, 1e-15);
}

TEST(Pearson, MatchesTextbookFormula) {
  const Vec xs = {1, 2, 3, 4, 5};
  const Vec ys = {2, 1, 4, 3, 5};
  EXPECT_NEAR(pearson(xs, ys), oracle::textbook_pearson(xs, ys), 1e-12);
  EXPECT_NEAR(pearson(xs, ys), 0.8, 1e-12);
}

TEST(Pearson, Errors) {
  const Vec three = {1, 2, 3};
  const Vec two = {1, 2};
  const Vec flat = {4, 4, 4};
  EXPECT_THROW(pearson(two, two), Error);
  EXPECT_THROW(pearson(three, two), Error);
  EXPECT_THROW(pearson(three, flat), Error);
  EXPECT_THROW(pearson(flat, three), Error);
}

TEST(Pearson, SymmetryAffineAndSignProperties) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coef(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto xs = random_vector(rng, 3 + rng() % 30, false);
    const auto ys = random_vector(rng, xs.size(), false);
    const double r = pearson(xs, ys);
    EXPECT_NEAR(pearson(ys, xs), r, 1e-12);
    const double a = coef(rng);
    const double b = coef(rng) - 5.0;
    Vec scaled;
    Vec negated;
    for (double x : xs) {
      scaled.push_back(a * x + b);
      negated.push_back(-x);
    }
    EXPECT_NEAR(pearson(scaled, ys), r, 1e-12);
    EXPECT_NEAR(pearson(negated, ys), -r, 1e-12);
  }
}

TEST(Pearson, BoundedOnRandomInputs) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto xs = random_vector(rng, 3 + rng() % 50, trial % 2 == 0);
    const auto ys = random_vector(rng, xs.size(), trial % 3 == 0);
    if (!has_variance(xs) || !has_variance(ys)) continue;
    const double r = pearson(xs, ys);
    EXPECT_LE(std::abs(r), 1.0 + 1e-12);
    EXPECT_NEAR(r, oracle::textbook_pearson(xs, ys), 1e-12);
  }
}

TEST(AverageRanks, TiesShareMeanRank) {
  const Vec v = {10, 20, 10, 30, 20, 20};
  EXPECT_EQ(average_ranks(v), (Vec{1.5, 4, 1.5, 6, 4, 4}));
  EXPECT_TRUE(average_ranks(Vec{}).empty());
}

TEST(AverageRanks, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_vector(rng, 1 + rng() % 40, true);
    EXPECT_EQ(average_ranks(v), oracle::brute_force_ranks(v));
  }
}

TEST(Spearman, Examples) {
  const Vec xs = {1, 2, 3, 4, 5};
  EXPECT_NEAR(spearman(xs, Vec{1, 4, 9, 16, 25}), 1.0, 1e-15);
  EXPECT_NEAR(spearman(xs, Vec{5, 3, 1, -1, -100}), -1.0, 1e-15);
  const Vec a = {1, 1, 2};
  const Vec b = {3, 3, 1};
  EXPECT_NEAR(spearman(a, b), oracle::brute_force_spearman(a, b), 1e-12);
  EXPECT_NEAR(spearman(a, b), -1.0, 1e-12);
}

TEST(Spearman, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(4);
  int checked = 0;
  while (checked < 300) {
    const auto xs = random_vector(rng, 3 + rng() % 20, true);
    const auto ys = random_vector(rng, xs.size(), rng() % 2 == 0);
    if (!has_variance(xs) || !has_variance(ys)) continue;
    EXPECT_NEAR(spearman(xs, ys), oracle::brute_force_spearman(xs, ys), 1e-12);
    ++checked;
  }
}

TEST(Spearman, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto xs = random_vector(rng, 3 + rng() % 20, trial % 2 == 0);
    const auto ys = random_vector(rng, xs.size(), false);
    if (!has_variance(xs)) continue;
    Vec txs;
    for (double x : xs) txs.push_back(std::exp(x) + x * x * x);
    EXPECT_NEAR(spearman(txs, ys), spearman(xs, ys), 1e-12);
  }
}

QuestionStats q(const std::string& id, int label, double mean, int n = 10) {
  QuestionStats s;
  s.question_id = id;
  s.difficulty_label = label;
  s.mean_score_norm = mean;
  s.n_sessions = n;
  s.n_scored = n;
  return s;
}

TEST(DifficultyReport, ExactLineHasNoFlags) {
  std::vector<QuestionStats> stats;
  for (int d = 1; d <= 5; ++d) stats.push_back(q("q" + std::to_string(d), d, 0.95 - 0.1 * d));
  const auto report = difficulty_report(stats);
  EXPECT_TRUE(report.flagged.empty());
  EXPECT_NEAR(report.pearson_r, -1.0, 1e-12);
  EXPECT_NEAR(report.spearman_rho, -1.0, 1e-12);
  EXPECT_NEAR(report.slope, -0.1, 1e-12);
  EXPECT_NEAR(report.intercept, 0.95, 1e-12);
  for (double r : report.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(DifficultyReport, PreconditionErrors) {
  const std::vector<QuestionStats> two = {q("a", 1, 0.9), q("b", 2, 0.8)};
  EXPECT_THROW(difficulty_report(two), Error);
  const std::vector<QuestionStats> same_label = {q("a", 2, 0.9), q("b", 2, 0.8), q("c", 2, 0.1)};
  EXPECT_THROW(difficulty_report(same_label), Error);
  const std::vector<QuestionStats> same_score = {q("a", 1, 0.5), q("b", 2, 0.5), q("c", 3, 0.5)};
  EXPECT_THROW(difficulty_report(same_score), Error);
  try {
    difficulty_report(two);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFailedPrecondition);
  }
}

TEST(DifficultyReport, UnscoredQuestionsAreExcluded) {
  std::vector<QuestionStats> stats = {q("a", 1, 0.9), q("b", 2, 0.8), q("c", 3, 0.6), q("d", 4, 0.0, 0)};
  const auto report = difficulty_report(stats);
  EXPECT_EQ(report.per_question.size(), 3u);
  ASSERT_EQ(report.excluded.size(), 1u);
  EXPECT_EQ(report.excluded[0].question_id, "d");
}

TEST(DifficultyReport, FlagsOutlierWithDirection) {
  std::vector<QuestionStats> stats;
  const double noise[] = {0.01, -0.012, 0.008, -0.005, 0.011, -0.009, 0.004, -0.007, 0.006, -0.01};
  for (int k = 0; k < 10; ++k) {
    const int d = 1 + k % 5;
    stats.push_back(q("q" + std::to_string(k), d, 0.95 - 0.1 * d + noise[k]));
  }
  // Labeled easy but scored like the hardest questions.
  stats.push_back(q("easy-but-hard", 1, 0.45));
  const auto report = difficulty_report(stats, 2.0);
  ASSERT_EQ(report.flagged.size(), 1u);
  EXPECT_EQ(report.flagged[0].question_id, "easy-but-hard");
  EXPECT_EQ(report.flagged[0].direction, FlagDirection::kHarderThanLabeled);
  EXPECT_EQ(flag_direction_name(report.flagged[0].direction), "harder_than_labeled");
  EXPECT_TRUE(difficulty_report(stats, 1000.0).flagged.empty());
}

TEST(DifficultyReport, FlagsInvariantUnderAffineRescaling) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<QuestionStats> stats;
    for (int k = 0; k < 20; ++k) {
      const int d = 1 + static_cast<int>(rng() % 5);
      stats.push_back(q("q" + std::to_string(k), d, 0.9 - 0.1 * d + noise(rng)));
    }
    auto scaled = stats;
    for (auto& s : scaled) s.mean_score_norm = 0.3 * s.mean_score_norm + 0.2;
    const auto a = difficulty_report(stats, 1.5);
    const auto b = difficulty_report(scaled, 1.5);
    ASSERT_EQ(a.flagged.size(), b.flagged.size());
    for (std::size_t k = 0; k < a.flagged.size(); ++k) {
      EXPECT_EQ(a.flagged[k].question_id, b.flagged[k].question_id);
      EXPECT_EQ(a.flagged[k].direction, b.flagged[k].direction);
    }
  }
}

TEST(DifficultyReport, RecoversPlantedMislabels) {
  synth::DatasetConfig config;
  config.seed = 2024;
  for (int k = 0; k < 30; ++k) {
    synth::QuestionConfig qc;
    qc.meta.question_id = "q" + std::to_string(k);
    qc.meta.difficulty_label = 1 + k % 5;
    qc.score_model.noise_sigma = 0.03;
    synth::CohortConfig cohort;
    cohort.session_count = 10;
    cohort.pattern.kind = synth::PatternKind::kAdditiveHorizontal;
    qc.cohorts.push_back(cohort);
    config.questions.push_back(qc);
  }
  config.planted_mislabels = {"q0", "q4", "q10"};  // true difficulty 1, 5, 1
  const auto dataset = synth::gen_dataset(config);
  const auto sessions = group_sessions(dataset.events);
  const auto report = difficulty_report(compute_question_stats(sessions, dataset.metadata), 2.0);

  std::set<std::string> flagged;
  for (const auto& f : report.flagged) {
    flagged.insert(f.question_id);
    // q0/q10 are published as difficulty 5 but score like difficulty 1.
    const auto expected = f.question_id == "q4" ? FlagDirection::kHarderThanLabeled
                                                : FlagDirection::kEasierThanLabeled;
    EXPECT_EQ(f.direction, expected) << f.question_id;
  }
  EXPECT_EQ(flagged, (std::set<std::string>{"q0", "q4", "q10"}));
}

TEST(ComputeQuestionStats, NormalizesByMaxScoreAndKeepsMetadataOrder) {
  std::vector<QuestionMeta> metas(2);
  metas[0].question_id = "b";
  metas[0].max_score = 4.0;
  metas[1].question_id = "a";
  std::vector<RawEvent> events;
  auto submit = [&](const std::string& session, const std::string& qid, double score) {
    RawEvent e;
    e.session_id = session;
    e.question_id = qid;
    e.type = EventType::kSubmit;
    e.score = score;
    events.push_back(e);
  };
  submit("s1", "b", 4.0);
  submit("s2", "b", 2.0);
  submit("s3", "zzz", 1.0);
  RawEvent move;
  move.session_id = "s4";
  move.question_id = "b";
  move.x = 0.5;
  move.y = 0.5;
  events.push_back(move);
  const auto stats = compute_question_stats(group_sessions(events), metas);
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_EQ(stats[0].question_id, "b");
  EXPECT_EQ(stats[0].n_sessions, 3);
  EXPECT_EQ(stats[0].n_scored, 2);
  EXPECT_DOUBLE_EQ(stats[0].mean_score_norm, 0.75);
  EXPECT_EQ(stats[1].n_sessions, 0);
}

TEST(WriteReportCsv, OneRowPerQuestion) {
  std::vector<QuestionStats> stats = {q("a,1", 1, 0.9), q("b", 2, 0.7), q("c", 3, 0.6), q("d", 4, 0, 0)};
  const auto report = difficulty_report(stats);
  std::ostringstream out;
  write_report_csv(out, report);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "question_id,difficulty,n,mean_score,residual,flagged");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("\"a,1\",1,10,", 0), 0u) << line;
  int rows = 1;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(last, "d,4,0,,,false");
}

}  // namespace
}  // namespace trailmap
