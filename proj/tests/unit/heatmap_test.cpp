#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "trailmap/error.hpp"
#include "trailmap/heatmap.hpp"

namespace trailmap {
namespace {

using fixture::point_event;

std::vector<RawEvent> random_events(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RawEvent> events;
  for (int k = 0; k < n; ++k) {
    events.push_back(point_event("s", k, unit(rng), unit(rng)));
  }
  return events;
}

TEST(AccumulateGrid, NoEvents) {
  const auto g = accumulate_grid({}, 4, 4);
  EXPECT_EQ(g.width(), 4);
  EXPECT_EQ(g.height(), 4);
  EXPECT_EQ(g.total_mass(), 0.0);
  EXPECT_EQ(g.sigma(), 0.0);
  for (double v : g.cells()) EXPECT_EQ(v, 0.0);
}

TEST(AccumulateGrid, SingleCenterEvent) {
  std::vector<RawEvent> events = {point_event("s", 0, 0.5, 0.5)};
  const auto g = accumulate_grid(events, 4, 4);
  EXPECT_EQ(g.at(2, 2), 1.0);
  EXPECT_EQ(g.total_mass(), 1.0);
}

TEST(AccumulateGrid, EdgeClamp) {
  std::vector<RawEvent> events = {point_event("s", 0, 1.0, 1.0), point_event("s", 1, 0.0, 1.0)};
  const auto g = accumulate_grid(events, 4, 3);
  EXPECT_EQ(g.at(3, 2), 1.0);
  EXPECT_EQ(g.at(0, 2), 1.0);
}

TEST(AccumulateGrid, IgnoresNonPositional) {
  std::vector<RawEvent> events = {point_event("s", 0, 0.1, 0.1), fixture::submit_event("s", 1, 1.0)};
  RawEvent change = point_event("s", 2, 0.2, 0.2, EventType::kAnswerChange);
  events.push_back(change);
  EXPECT_EQ(accumulate_grid(events, 8, 8).total_mass(), 1.0);
}

TEST(AccumulateGrid, RejectsNonPositiveSize) {
  EXPECT_THROW(accumulate_grid({}, 0, 4), Error);
  EXPECT_THROW(accumulate_grid({}, 4, -1), Error);
}

TEST(AccumulateGrid, PermutationInvariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto events = random_events(rng, 200);
    const auto a = accumulate_grid(events, 16, 12);
    std::shuffle(events.begin(), events.end(), rng);
    EXPECT_EQ(a, accumulate_grid(events, 16, 12));
  }
}

TEST(AccumulateGrid, Additivity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_events(rng, 50);
    const auto b = random_events(rng, 70);
    auto both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto ga = accumulate_grid(a, 10, 10);
    const auto gb = accumulate_grid(b, 10, 10);
    const auto gab = accumulate_grid(both, 10, 10);
    for (std::size_t k = 0; k < gab.size(); ++k) {
      EXPECT_EQ(gab.cells()[k], ga.cells()[k] + gb.cells()[k]);
    }
  }
}

TEST(AccumulateGrid, MassIndependentOfResolution) {
  std::mt19937_64 rng(5);
  const auto events = random_events(rng, 300);
  for (int res : {1, 7, 64, 200}) {
    EXPECT_EQ(accumulate_grid(events, res, res + 3).total_mass(), 300.0);
  }
}

TEST(AccumulateGridDwell, WeightsByTimeToNextEvent) {
  Session s;
  s.events = {point_event("s", 0, 0.1, 0.1), point_event("s", 300, 0.9, 0.9),
              fixture::submit_event("s", 1000, 1.0)};
  const std::vector<Session> sessions = {s};
  const auto g = accumulate_grid_dwell(sessions, 2, 2);
  EXPECT_EQ(g.at(0, 0), 300.0);
  EXPECT_EQ(g.at(1, 1), 700.0);
}

TEST(SmoothGrid, ZeroSigmaIsIdentity) {
  std::mt19937_64 rng(6);
  const auto g = accumulate_grid(random_events(rng, 100), 12, 12);
  EXPECT_EQ(smooth_grid(g, 0.0), g);
}

TEST(SmoothGrid, NegativeSigmaThrows) {
  EXPECT_THROW(smooth_grid(HeatGrid(4, 4), -0.5), Error);
}

TEST(SmoothGrid, ImpulseConservesMassAndPeaksAtCenter) {
  HeatGrid g(9, 9);
  g.at(4, 4) = 1.0;
  const auto s = smooth_grid(g, 1.0);
  EXPECT_NEAR(s.total_mass(), 1.0, 1e-9);
  EXPECT_EQ(s.max_value(), s.at(4, 4));
  EXPECT_EQ(s.sigma(), 1.0);
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) {
      if (i != 4 || j != 4) EXPECT_LT(s.at(i, j), s.at(4, 4));
    }
  }
}

TEST(SmoothGrid, ConservesMassAtCorners) {
  HeatGrid g(10, 6);
  g.at(0, 0) = 3.0;
  g.at(9, 5) = 2.0;
  for (double sigma : {0.5, 1.5, 4.0, 20.0}) {
    EXPECT_NEAR(smooth_grid(g, sigma).total_mass(), 5.0, 5.0 * 1e-12);
  }
}

TEST(SmoothGrid, PreservesRotationalSymmetry) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 7 + trial;
    const int h = 5 + 2 * trial;
    HeatGrid g(w, h);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        g.at(i, j) = unit(rng);
      }
    }
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) g.at(w - 1 - i, h - 1 - j) = g.at(i, j);
    }
    const auto s = smooth_grid(g, 1.5);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        EXPECT_NEAR(s.at(i, j), s.at(w - 1 - i, h - 1 - j), 1e-12);
      }
    }
  }
}

TEST(SmoothGrid, MatchesDirectTwoDimensionalConvolution) {
  std::mt19937_64 rng(9);
  for (double sigma : {0.5, 1.0, 1.5, 2.7}) {
    const auto events = random_events(rng, 80);
    const auto g = accumulate_grid(events, 13, 11);
    const auto s = smooth_grid(g, sigma);
    const std::vector<double> raw(g.cells().begin(), g.cells().end());
    const auto direct = oracle::direct_smooth(raw, 13, 11, sigma);
    for (std::size_t k = 0; k < direct.size(); ++k) {
      EXPECT_NEAR(s.cells()[k], direct[k], 1e-12);
    }
  }
}

TEST(SmoothGrid, ConservationProperty) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = static_cast<int>(rng() % 500);
    const auto g = accumulate_grid(random_events(rng, n), 32, 24);
    for (double sigma : {0.5, 1.5, 4.0}) {
      const auto s = smooth_grid(g, sigma);
      EXPECT_NEAR(s.total_mass(), n, std::max(1.0, static_cast<double>(n)) * 1e-9);
      for (double v : s.cells()) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(NormalizeGrid, DividesByMax) {
  HeatGrid g(2, 1);
  g.at(0, 0) = 2.0;
  g.at(1, 0) = 4.0;
  const auto n = normalize_grid(g);
  EXPECT_EQ(n.at(0, 0), 0.5);
  EXPECT_EQ(n.at(1, 0), 1.0);
}

TEST(NormalizeGrid, ZeroGridUnchanged) {
  HeatGrid g(3, 3);
  EXPECT_EQ(normalize_grid(g), g);
}

TEST(NormalizeGrid, Idempotent) {
  std::mt19937_64 rng(12);
  const auto n = normalize_grid(smooth_grid(accumulate_grid(random_events(rng, 40), 9, 9), 1.0));
  const auto nn = normalize_grid(n);
  for (std::size_t k = 0; k < n.size(); ++k) EXPECT_NEAR(n.cells()[k], nn.cells()[k], 1e-12);
}

TEST(WriteGridPgm, HeaderAndScaledBytes) {
  HeatGrid g(3, 1);
  g.at(0, 0) = 0.0;
  g.at(1, 0) = 1.0;
  g.at(2, 0) = 2.0;
  std::ostringstream out;
  write_grid_pgm(out, g);
  const std::string bytes = out.str();
  const std::string header = "P5\n3 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 3);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size()]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 128);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), 255);
}

TEST(HeatGrid, CellGeometry) {
  HeatGrid g(4, 2);
  EXPECT_EQ(g.column_of(0.0), 0);
  EXPECT_EQ(g.column_of(0.2499), 0);
  EXPECT_EQ(g.column_of(0.25), 1);
  EXPECT_EQ(g.column_of(1.0), 3);
  EXPECT_EQ(g.row_of(0.5), 1);
  EXPECT_DOUBLE_EQ(g.center_x(1), 0.375);
  EXPECT_DOUBLE_EQ(g.center_y(0), 0.25);
}

}  // namespace
}  // namespace trailmap
