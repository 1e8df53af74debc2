#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wireinspect/profile.hpp"

namespace httplib {
class Server;
}

namespace wireinspect::service {

/// Carries the HTTP status an API failure maps to.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

enum class OperatorAction { None, ManualPass, ManualFail };

std::string_view to_string(OperatorAction a);
/// Throws ApiError(400) on anything but "manual_pass" or "manual_fail".
OperatorAction parse_action(std::string_view s);

struct InspectionEvent {
  std::string event_id;
  std::string timestamp;
  std::vector<std::string> frame_digests;  // SHA-256 hex, one per view
  nlohmann::json result;                   // InspectionResult as JSON
  Verdict overall = Verdict::Unclear;
  OperatorAction operator_action = OperatorAction::None;
  std::string resolved_at;

  friend bool operator==(const InspectionEvent&, const InspectionEvent&) = default;
};

struct Counts {
  int pass = 0;
  int fail = 0;
  int unclear = 0;
  int manual_override = 0;

  friend bool operator==(const Counts&, const Counts&) = default;
};

struct SessionRecord {
  std::string session_id;
  std::string operator_name;
  std::string harness_type;
  std::string profile_id;
  std::string started_at;
  std::optional<std::string> ended_at;
  Counts counts;
  std::vector<InspectionEvent> events;

  bool open() const noexcept { return !ended_at.has_value(); }
  /// Tallies recomputed from the events.
  Counts tally() const;

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

nlohmann::json to_json(const InspectionEvent& e);
nlohmann::json to_json(const SessionRecord& s, bool with_events = true);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string timestamp_now();

/// Durable session storage.
///
/// Layout under the root directory:
///   index.json             session ids in creation order, replaced atomically
///   sessions/<id>.jsonl    append-only log: one header line, then event,
///                          resolve and close records
///   blobs/<digest>.png     uploaded frames, content addressed
///
/// Every log line is fsync'd before the call returns. On load, a trailing
/// line that is incomplete or unparsable (a write cut short by a crash) is
/// dropped and truncated away.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);
  ~SessionStore();

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  SessionRecord create(const std::string& operator_name, const std::string& harness_type,
                       const std::string& profile_id);
  std::vector<SessionRecord> list() const;
  /// Throws ApiError(404) for an unknown id.
  SessionRecord get(const std::string& session_id) const;
  /// Throws ApiError(404) unknown, ApiError(409) closed.
  void require_open(const std::string& session_id) const;
  InspectionEvent append_event(const std::string& session_id, std::vector<std::string> digests,
                               const InspectionResult& result);
  /// Throws ApiError(409) unless the event is Unclear and still unresolved.
  InspectionEvent resolve(const std::string& session_id, const std::string& event_id,
                          OperatorAction action);
  SessionRecord close(const std::string& session_id);

  /// Stores bytes under their SHA-256 and returns the digest.
  std::string store_blob(std::span<const std::uint8_t> bytes);

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  struct Slot;

  Slot& slot(const std::string& session_id) const;
  void append_line(Slot& s, const nlohmann::json& line);
  void write_index();
  void load();

  std::filesystem::path root_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Slot>> sessions_;
  std::vector<std::string> order_;
  std::mutex index_mutex_;
};

/// Loads every *.harnessprofile.json under a directory and accepts new ones.
class ProfileRepository {
 public:
  explicit ProfileRepository(std::filesystem::path root);

  std::shared_ptr<const TrainedProfile> find(const std::string& profile_id) const;
  std::vector<std::shared_ptr<const TrainedProfile>> list() const;
  /// Saves under <root>/<harness_type>/<profile_id>.harnessprofile.json.
  void add(TrainedProfile profile);

 private:
  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const TrainedProfile>> profiles_;
};

struct ServiceConfig {
  std::filesystem::path profiles_dir;
  std::filesystem::path sessions_dir;
  std::string token;
};

/// REST front end over SessionStore and ProfileRepository. Every route
/// requires "Authorization: Bearer <token>".
class InspectionService {
 public:
  explicit InspectionService(ServiceConfig config);
  ~InspectionService();

  InspectionService(const InspectionService&) = delete;
  InspectionService& operator=(const InspectionService&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen();
  void stop();

  SessionStore& sessions() noexcept { return *store_; }
  ProfileRepository& profiles() noexcept { return *profiles_; }

 private:
  void routes();

  ServiceConfig config_;
  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<ProfileRepository> profiles_;
  std::unique_ptr<httplib::Server> server_;
};

/// Reads the bearer token from a file, trimming surrounding whitespace.
/// Throws Error(Io) when unreadable or empty.
std::string read_token_file(const std::filesystem::path& path);

}  // namespace wireinspect::service
