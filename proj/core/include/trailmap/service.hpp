#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trailmap/error.hpp"
#include "trailmap/event_model.hpp"

namespace trailmap {

// Immutable view of one loaded dataset. Queries against a snapshot are
// reproducible; reloads publish a new snapshot instead of mutating this one.
class DatasetSnapshot {
 public:
  DatasetSnapshot(std::uint64_t id, std::span<const RawEvent> events,
                  std::vector<QuestionMeta> metadata);

  std::uint64_t id() const { return id_; }
  const std::vector<QuestionMeta>& metadata() const { return metadata_; }
  const std::vector<Session>& sessions() const { return sessions_; }
  std::size_t event_count() const { return event_count_; }

  // Metadata entry, or a default one (difficulty 1, max_score 1) for
  // questions that only appear in the event log. nullptr when unknown.
  const QuestionMeta* question(std::string_view question_id) const;
  // Sessions of one question, in dataset order.
  std::vector<Session> sessions_for(std::string_view question_id) const;

 private:
  std::uint64_t id_;
  std::vector<QuestionMeta> metadata_;
  std::map<std::string, QuestionMeta, std::less<>> event_only_questions_;
  std::vector<Session> sessions_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_question_;
  std::size_t event_count_ = 0;
};

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// HTTP-agnostic JSON API. Readers take a shared_ptr to the current snapshot
// so a concurrent reload never exposes a partially built dataset.
class AnalyticsService {
 public:
  AnalyticsService() = default;

  // Publishes a new snapshot and returns its id.
  std::uint64_t load(std::span<const RawEvent> events, std::vector<QuestionMeta> metadata);
  std::shared_ptr<const DatasetSnapshot> snapshot() const;

  ApiResponse handle(const ApiRequest& request);

 private:
  ApiResponse ingest(const ApiRequest& request);

  mutable std::mutex mu_;
  std::shared_ptr<const DatasetSnapshot> current_;
  std::uint64_t next_id_ = 1;
};

int http_status_for(ErrorCode code);

}  // namespace trailmap
