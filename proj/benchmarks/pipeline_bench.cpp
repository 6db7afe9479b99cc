#include <benchmark/benchmark.h>

#include <sstream>

#include "trailmap/event_model.hpp"
#include "trailmap/heatmap.hpp"
#include "trailmap/pipeline.hpp"
#include "trailmap/roi.hpp"
#include "trailmap/synthgen.hpp"

namespace {

using namespace trailmap;

synth::Dataset make_dataset(int sessions_per_cohort) {
  synth::DatasetConfig config;
  config.seed = 1;
  synth::QuestionConfig q;
  q.meta.question_id = "bench";
  synth::CohortConfig lr;
  lr.name = "lr";
  lr.session_count = sessions_per_cohort;
  lr.pattern.waypoints = {{0.2, 0.5}, {0.4, 0.5}, {0.6, 0.5}, {0.8, 0.5}};
  lr.pattern.jitter_sigma = 0.02;
  lr.pattern.samples_per_leg = 3;
  lr.pattern.hold_samples = 10;
  lr.outcome.kind = synth::OutcomeKind::kConstant;
  lr.outcome.score = 1.0;
  synth::CohortConfig rl = lr;
  rl.name = "rl";
  rl.pattern.waypoints.assign(lr.pattern.waypoints.rbegin(), lr.pattern.waypoints.rend());
  rl.outcome.score = 0.0;
  q.cohorts = {lr, rl};
  config.questions = {q};
  return synth::gen_dataset(config);
}

const synth::Dataset& dataset() {
  static const synth::Dataset d = make_dataset(1000);
  return d;
}

void BM_ParseEventLog(benchmark::State& state) {
  std::ostringstream out;
  write_event_log(out, dataset().events);
  const std::string text = out.str();
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(parse_event_log(in));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dataset().events.size()));
}
BENCHMARK(BM_ParseEventLog)->Unit(benchmark::kMillisecond);

void BM_GroupSessions(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(group_sessions(dataset().events));
}
BENCHMARK(BM_GroupSessions)->Unit(benchmark::kMillisecond);

void BM_Smooth(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const auto raw = accumulate_grid(dataset().events, res, res);
  for (auto _ : state) benchmark::DoNotOptimize(smooth_grid(raw, 2.0));
}
BENCHMARK(BM_Smooth)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ExtractRois(benchmark::State& state) {
  const auto sessions = group_sessions(dataset().events);
  const auto grid = smooth_grid(accumulate_grid(dataset().events, 128, 128), 2.0);
  const auto points = positional_points(sessions);
  RoiParams params;
  for (auto _ : state) benchmark::DoNotOptimize(extract_rois(grid, points, params));
}
BENCHMARK(BM_ExtractRois)->Unit(benchmark::kMillisecond);

void BM_QuestionTransitions(benchmark::State& state) {
  const auto sessions = group_sessions(dataset().events);
  TransitionQuery query;
  query.cohort = CohortSpec::full_marks();
  for (auto _ : state) benchmark::DoNotOptimize(question_transitions(sessions, 1.0, query));
}
BENCHMARK(BM_QuestionTransitions)->Unit(benchmark::kMillisecond);

}  // namespace

// The distro's libbenchmark_main.a carries LTO bytecode from another gcc.
BENCHMARK_MAIN();
