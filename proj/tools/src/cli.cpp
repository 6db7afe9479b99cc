#include "trailmap/tools/cli.hpp"

#include <array>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trailmap/analytics.hpp"
#include "trailmap/error.hpp"
#include "trailmap/json_io.hpp"
#include "trailmap/pipeline.hpp"
#include "trailmap/service.hpp"
#include "trailmap/synthgen.hpp"
#include "trailmap/tools/http_server.hpp"

namespace trailmap::tools {
namespace {

namespace fs = std::filesystem;

std::atomic<HttpServer*> g_server{nullptr};

void handle_stop_signal(int) {
  if (HttpServer* s = g_server.load()) s->stop();
}

std::optional<CanvasSize> parse_canvas(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw invalid_argument("--canvas must look like WxH");
  try {
    std::size_t used_w = 0;
    std::size_t used_h = 0;
    const double w = std::stod(text.substr(0, x), &used_w);
    const double h = std::stod(text.substr(x + 1), &used_h);
    if (used_w != x || used_h != text.size() - x - 1 || !(w > 0) || !(h > 0)) {
      throw invalid_argument("--canvas must look like WxH with positive sizes");
    }
    return CanvasSize{w, h};
  } catch (const std::logic_error&) {
    throw invalid_argument("--canvas must look like WxH");
  }
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write '" + path.string() + "'");
  out << bytes;
  out.flush();
  if (!out) throw io_error("failed writing '" + path.string() + "'");
}

struct LoadedData {
  std::vector<Session> sessions;
  std::vector<QuestionMeta> metadata;
  std::size_t line_errors = 0;
};

LoadedData load_data(const std::string& events_path, const std::string& meta_path,
                     const std::string& canvas, std::ostream& err) {
  ParseOptions options;
  options.canvas = parse_canvas(canvas);
  ParseResult parsed = parse_event_log_file(events_path, options);
  if (!parsed.errors.empty()) {
    err << "warning: skipped " << parsed.errors.size() << " malformed line(s) in "
        << events_path << "\n";
  }
  LoadedData data;
  data.line_errors = parsed.errors.size();
  data.sessions = group_sessions(parsed.events);
  if (!meta_path.empty()) data.metadata = parse_question_meta_file(meta_path);
  return data;
}

// Sessions of one question plus its max score (1 when no metadata is given).
std::pair<std::vector<Session>, double> question_sessions(const LoadedData& data,
                                                         const std::string& question) {
  double max_score = 1.0;
  bool known = false;
  for (const auto& m : data.metadata) {
    if (m.question_id == question) {
      max_score = m.max_score;
      known = true;
    }
  }
  std::vector<Session> out;
  for (const auto& s : data.sessions) {
    if (s.question_id == question) out.push_back(s);
  }
  if (!known && out.empty()) throw not_found("unknown question '" + question + "'");
  return {std::move(out), max_score};
}

int cmd_validate(const std::string& events_path, const std::string& canvas, std::ostream& out) {
  ParseOptions options;
  options.canvas = parse_canvas(canvas);
  const ParseResult parsed = parse_event_log_file(events_path, options);
  const auto sessions = group_sessions(parsed.events);
  std::size_t positional = 0;
  std::array<std::size_t, kEventTypeCount> per_type{};
  for (const auto& e : parsed.events) {
    if (e.positional()) ++positional;
    ++per_type[static_cast<std::size_t>(e.type)];
  }
  out << "events: " << parsed.events.size() << "\n";
  out << "sessions: " << sessions.size() << "\n";
  out << "positional: " << positional << "\n";
  for (EventType t : kAllEventTypes) {
    out << "type " << event_type_name(t) << ": " << per_type[static_cast<std::size_t>(t)] << "\n";
  }
  out << "warnings: " << parsed.warnings.size() << "\n";
  for (const auto& w : parsed.warnings) out << "  line " << w.line << ": " << w.message << "\n";
  out << "errors: " << parsed.errors.size() << "\n";
  for (const auto& e : parsed.errors) out << "  line " << e.line << ": " << e.reason << "\n";
  return parsed.errors.empty() ? kExitOk : kExitDomainError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"trailmap: mouse-interaction analytics for question-solving sessions"};
  app.require_subcommand(1);

  std::string events_path;
  std::string meta_path;
  std::string canvas;
  std::string question;
  std::string cohort_text = "all";
  std::string out_prefix;
  int resolution = kDefaultGridSize;
  double sigma = kDefaultSigma;

  auto* validate = app.add_subcommand("validate", "Parse an event log and report counts and errors");
  validate->add_option("--events", events_path, "Event log (JSON lines)")->required();
  validate->add_option("--canvas", canvas, "Raw pixel canvas WxH to normalize x/y");

  bool dwell = false;
  auto* heatmap = app.add_subcommand("heatmap", "Write a question's heat grid as JSON and PGM");
  heatmap->add_option("--events", events_path)->required();
  heatmap->add_option("--meta", meta_path, "Question metadata (JSON array)");
  heatmap->add_option("--question", question)->required();
  heatmap->add_option("--res", resolution, "Grid cells per side")->capture_default_str();
  heatmap->add_option("--sigma", sigma, "Smoothing bandwidth in cells")->capture_default_str();
  heatmap->add_option("--cohort", cohort_text, "all | full | wrong | range:LO-HI")
      ->capture_default_str();
  heatmap->add_option("--out", out_prefix, "Output prefix")->required();
  heatmap->add_option("--canvas", canvas);
  heatmap->add_flag("--dwell", dwell, "Weight samples by dwell time instead of counting");

  RoiParams roi;
  int min_edge = kDefaultMinEdgeCount;
  auto* transitions = app.add_subcommand("transitions", "Write a cohort transition map");
  transitions->add_option("--events", events_path)->required();
  transitions->add_option("--meta", meta_path);
  transitions->add_option("--question", question)->required();
  transitions->add_option("--roi-size", roi.merge_radius, "ROI merge radius")->capture_default_str();
  transitions->add_option("--tau", roi.tau, "Density threshold fraction")->capture_default_str();
  transitions->add_option("--bins", roi.time_bins, "Time bins per ROI")->capture_default_str();
  transitions->add_option("--min-events", roi.min_events)->capture_default_str();
  transitions->add_option("--min-edge", min_edge)->capture_default_str();
  transitions->add_option("--res", resolution)->capture_default_str();
  transitions->add_option("--sigma", sigma)->capture_default_str();
  transitions->add_option("--cohort", cohort_text)->capture_default_str();
  transitions->add_option("--out", out_prefix)->required();
  transitions->add_option("--canvas", canvas);

  double k_sigma = kDefaultKSigma;
  auto* correlate = app.add_subcommand("correlate", "Difficulty vs. score correlation report");
  correlate->add_option("--events", events_path)->required();
  correlate->add_option("--meta", meta_path)->required();
  correlate->add_option("--k", k_sigma, "Flag threshold in residual sigmas")->capture_default_str();
  correlate->add_option("--out", out_prefix)->required();

  std::string config_path;
  std::string out_dir;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset from a config");
  generate->add_option("--config", config_path)->required();
  generate->add_option("--out", out_dir, "Output directory")->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--data", events_path, "Event log to load at startup");
  serve->add_option("--meta", meta_path, "Question metadata to load at startup");
  serve->add_option("--static", static_dir, "Directory served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIoOrUsage;
  }

  try {
    if (*validate) return cmd_validate(events_path, canvas, out);

    if (*heatmap) {
      const CohortSpec cohort = parse_cohort(cohort_text);
      const auto data = load_data(events_path, meta_path, canvas, err);
      const auto [sessions, max_score] = question_sessions(data, question);
      HeatmapQuery query{resolution, sigma, cohort, dwell};
      const HeatGrid grid = question_heatmap(sessions, max_score, query);
      ojson j = grid_to_json(grid);
      j["question_id"] = question;
      j["cohort"] = cohort_to_string(cohort);
      j["weight"] = dwell ? "dwell" : "count";
      write_file(out_prefix + ".json", j.dump() + "\n");
      std::ostringstream pgm;
      write_grid_pgm(pgm, grid);
      write_file(out_prefix + ".pgm", pgm.str());
      out << "wrote " << out_prefix << ".json and " << out_prefix << ".pgm (total_mass "
          << grid.total_mass() << ")\n";
      return kExitOk;
    }

    if (*transitions) {
      TransitionQuery query;
      query.cohort = parse_cohort(cohort_text);
      query.resolution = resolution;
      query.sigma = sigma;
      query.roi = roi;
      query.min_edge_count = min_edge;
      const auto data = load_data(events_path, meta_path, canvas, err);
      const auto [sessions, max_score] = question_sessions(data, question);
      const auto result = question_transitions(sessions, max_score, query);
      ojson j = transition_map_to_json(result.map);
      j["question_id"] = question;
      write_file(out_prefix + ".json", j.dump() + "\n");
      std::ostringstream dot;
      write_transition_dot(dot, result.map);
      write_file(out_prefix + ".dot", dot.str());
      out << "wrote " << out_prefix << ".json and " << out_prefix << ".dot ("
          << result.map.rois.size() << " ROIs, " << result.map.edges.size() << " edges, "
          << result.map.session_count << " sessions)\n";
      return kExitOk;
    }

    if (*correlate) {
      const auto data = load_data(events_path, meta_path, "", err);
      const auto stats = compute_question_stats(data.sessions, data.metadata);
      const CorrelationReport report = difficulty_report(stats, k_sigma);
      write_file(out_prefix + ".json", report_to_json(report).dump(2) + "\n");
      std::ostringstream csv;
      write_report_csv(csv, report);
      write_file(out_prefix + ".csv", csv.str());
      out << "pearson " << report.pearson_r << ", spearman " << report.spearman_rho << ", "
          << report.flagged.size() << " flagged\n";
      for (const auto& f : report.flagged) {
        out << "  " << f.question_id << " " << flag_direction_name(f.direction) << " (residual "
            << f.residual << ")\n";
      }
      return kExitOk;
    }

    if (*generate) {
      const auto config = synth::load_dataset_config(config_path);
      const auto dataset = synth::gen_dataset(config);
      const auto files = synth::write_dataset(dataset, out_dir);
      out << "wrote " << dataset.events.size() << " events to " << files.events.string() << "\n";
      return kExitOk;
    }

    if (*serve) {
      AnalyticsService service;
      if (!events_path.empty()) {
        const auto parsed = parse_event_log_file(events_path);
        std::vector<QuestionMeta> metadata;
        if (!meta_path.empty()) metadata = parse_question_meta_file(meta_path);
        service.load(parsed.events, std::move(metadata));
        out << "loaded " << parsed.events.size() << " events (" << parsed.errors.size()
            << " malformed lines skipped)\n";
      }
      std::optional<fs::path> static_root;
      if (!static_dir.empty()) static_root = static_dir;
      HttpServer server(service, static_root);
      if (!server.bind(host, port)) {
        err << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitIoOrUsage;
      }
      out << "listening on http://" << host << ":" << server.port() << "\n" << std::flush;
      g_server.store(&server);
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      const bool ok = server.run();
      g_server.store(nullptr);
      return ok ? kExitOk : kExitIoOrUsage;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kIo) return kExitIoOrUsage;
    if (e.code() == ErrorCode::kInvalidArgument && (*transitions || *heatmap)) {
      err << "usage: trailmap " << (*transitions ? "transitions" : "heatmap")
          << " --help for the accepted flags\n";
    }
    return kExitDomainError;
  }
  return kExitIoOrUsage;
}

}  // namespace trailmap::tools
