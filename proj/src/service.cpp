#include "wireinspect/service.hpp"

#include <fcntl.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"
#include "wireinspect/error.hpp"
#include "wireinspect/png_io.hpp"
#include "wireinspect/profile_io.hpp"

namespace wireinspect::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string random_hex(int bytes) {
  static thread_local std::mt19937_64 rng(std::random_device{}());
  std::string out;
  char buf[3];
  for (int i = 0; i < bytes; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>(rng() & 0xff));
    out += buf;
  }
  return out;
}

Verdict verdict_from(const std::string& s) {
  if (s == "Pass") return Verdict::Pass;
  if (s == "Fail") return Verdict::Fail;
  if (s == "Unclear") return Verdict::Unclear;
  throw Error(ErrorCode::Io, "unknown verdict '" + s + "' in session log");
}

OperatorAction action_from_log(const std::string& s) {
  if (s == "none") return OperatorAction::None;
  return parse_action(s);
}

InspectionEvent event_from_json(const json& j) {
  InspectionEvent e;
  e.event_id = j.at("event_id").get<std::string>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.frame_digests = j.at("frame_digests").get<std::vector<std::string>>();
  e.result = j.at("result");
  e.overall = verdict_from(j.at("overall").get<std::string>());
  e.operator_action = action_from_log(j.at("operator_action").get<std::string>());
  e.resolved_at = j.value("resolved_at", std::string());
  return e;
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::Io, "write failed: " + path.string());
    }
    off += static_cast<std::size_t>(n);
  }
}

/// Writes to a temporary sibling, syncs it and renames it over `path`.
void replace_file(const fs::path& path, const std::string& data) {
  const auto tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::Io, "cannot create " + tmp);
  try {
    write_all(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::Io, "cannot rename " + tmp + " to " + path.string());
  }
}

}  // namespace

std::string_view to_string(OperatorAction a) {
  switch (a) {
    case OperatorAction::None: return "none";
    case OperatorAction::ManualPass: return "manual_pass";
    case OperatorAction::ManualFail: return "manual_fail";
  }
  return "none";
}

OperatorAction parse_action(std::string_view s) {
  if (s == "manual_pass") return OperatorAction::ManualPass;
  if (s == "manual_fail") return OperatorAction::ManualFail;
  throw ApiError(400, "action must be manual_pass or manual_fail");
}

Counts SessionRecord::tally() const {
  Counts c;
  for (const auto& e : events) {
    switch (e.overall) {
      case Verdict::Pass: ++c.pass; break;
      case Verdict::Fail: ++c.fail; break;
      case Verdict::Unclear: ++c.unclear; break;
    }
    if (e.operator_action != OperatorAction::None) ++c.manual_override;
  }
  return c;
}

json to_json(const InspectionEvent& e) {
  json out = {{"event_id", e.event_id},
              {"timestamp", e.timestamp},
              {"frame_digests", e.frame_digests},
              {"result", e.result},
              {"overall", std::string(wireinspect::to_string(e.overall))},
              {"operator_action", std::string(to_string(e.operator_action))}};
  if (!e.resolved_at.empty()) out["resolved_at"] = e.resolved_at;
  return out;
}

json to_json(const SessionRecord& s, bool with_events) {
  json out = {{"session_id", s.session_id},
              {"operator", s.operator_name},
              {"harness_type", s.harness_type},
              {"profile_id", s.profile_id},
              {"started_at", s.started_at},
              {"ended_at", s.ended_at ? json(*s.ended_at) : json(nullptr)},
              {"counts",
               {{"pass", s.counts.pass},
                {"fail", s.counts.fail},
                {"unclear", s.counts.unclear},
                {"manual_override", s.counts.manual_override}}},
              {"event_count", s.events.size()}};
  if (with_events) {
    json events = json::array();
    for (const auto& e : s.events) events.push_back(to_json(e));
    out["events"] = std::move(events);
  }
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
  return out;
}

// ---- SessionStore ---------------------------------------------------------

struct SessionStore::Slot {
  mutable std::mutex mutex;
  SessionRecord record;
  fs::path path;
  int fd = -1;

  ~Slot() {
    if (fd >= 0) ::close(fd);
  }
};

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "sessions");
  fs::create_directories(root_ / "blobs");
  load();
}

SessionStore::~SessionStore() = default;

void SessionStore::load() {
  std::vector<std::string> ids;
  const auto index = root_ / "index.json";
  if (fs::exists(index)) {
    std::ifstream in(index);
    try {
      ids = json::parse(in).at("sessions").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Io, "unreadable session index: " + std::string(e.what()));
    }
  }
  // A crash between creating a log and rewriting the index leaves a log the
  // index does not name yet; adopt it.
  std::vector<std::string> extra;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.path().extension() != ".jsonl") continue;
    const auto id = entry.path().stem().string();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) extra.push_back(id);
  }
  std::sort(extra.begin(), extra.end());
  ids.insert(ids.end(), extra.begin(), extra.end());

  for (const auto& id : ids) {
    auto s = std::make_unique<Slot>();
    s->path = root_ / "sessions" / (id + ".jsonl");
    std::ifstream in(s->path, std::ios::binary);
    if (!in) continue;  // named in the index but never written
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::size_t pos = 0;
    std::size_t good_end = 0;
    bool have_header = false;
    while (pos < text.size()) {
      const auto nl = text.find('\n', pos);
      if (nl == std::string::npos) break;  // torn final line
      json line;
      try {
        line = json::parse(text.substr(pos, nl - pos));
      } catch (const json::parse_error&) {
        if (text.find('\n', nl + 1) != std::string::npos) {
          throw Error(ErrorCode::Io, "corrupt record inside " + s->path.string());
        }
        break;
      }
      const auto type = line.at("type").get<std::string>();
      auto& rec = s->record;
      if (type == "session") {
        rec.session_id = line.at("session_id").get<std::string>();
        rec.operator_name = line.at("operator").get<std::string>();
        rec.harness_type = line.at("harness_type").get<std::string>();
        rec.profile_id = line.at("profile_id").get<std::string>();
        rec.started_at = line.at("started_at").get<std::string>();
        have_header = true;
      } else if (type == "event") {
        rec.events.push_back(event_from_json(line.at("event")));
      } else if (type == "resolve") {
        const auto eid = line.at("event_id").get<std::string>();
        for (auto& e : rec.events) {
          if (e.event_id == eid) {
            e.operator_action = parse_action(line.at("action").get<std::string>());
            e.resolved_at = line.at("at").get<std::string>();
          }
        }
      } else if (type == "close") {
        rec.ended_at = line.at("at").get<std::string>();
      }
      pos = nl + 1;
      good_end = pos;
    }
    if (!have_header) continue;
    if (good_end < text.size()) fs::resize_file(s->path, good_end);
    s->record.counts = s->record.tally();
    s->fd = ::open(s->path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (s->fd < 0) throw Error(ErrorCode::Io, "cannot reopen " + s->path.string());
    order_.push_back(id);
    sessions_.emplace(id, std::move(s));
  }
  if (!extra.empty()) write_index();
}

void SessionStore::write_index() {
  std::lock_guard lock(index_mutex_);
  std::vector<std::string> ids;
  {
    std::shared_lock map_lock(map_mutex_);
    ids = order_;
  }
  replace_file(root_ / "index.json", json{{"sessions", ids}}.dump() + "\n");
}

void SessionStore::append_line(Slot& s, const json& line) {
  write_all(s.fd, line.dump() + "\n", s.path);
  if (::fdatasync(s.fd) != 0) throw Error(ErrorCode::Io, "fdatasync failed: " + s.path.string());
}

SessionStore::Slot& SessionStore::slot(const std::string& session_id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session '" + session_id + "'");
  return *it->second;
}

SessionRecord SessionStore::create(const std::string& operator_name,
                                   const std::string& harness_type,
                                   const std::string& profile_id) {
  auto s = std::make_unique<Slot>();
  auto& rec = s->record;
  rec.session_id = "s-" + random_hex(8);
  rec.operator_name = operator_name;
  rec.harness_type = harness_type;
  rec.profile_id = profile_id;
  rec.started_at = timestamp_now();
  s->path = root_ / "sessions" / (rec.session_id + ".jsonl");
  s->fd = ::open(s->path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_APPEND | O_CLOEXEC, 0644);
  if (s->fd < 0) throw Error(ErrorCode::Io, "cannot create " + s->path.string());
  append_line(*s, {{"type", "session"},
                   {"session_id", rec.session_id},
                   {"operator", rec.operator_name},
                   {"harness_type", rec.harness_type},
                   {"profile_id", rec.profile_id},
                   {"started_at", rec.started_at}});
  const SessionRecord copy = rec;
  {
    std::unique_lock lock(map_mutex_);
    order_.push_back(copy.session_id);
    sessions_.emplace(copy.session_id, std::move(s));
  }
  write_index();
  return copy;
}

std::vector<SessionRecord> SessionStore::list() const {
  std::vector<SessionRecord> out;
  std::shared_lock lock(map_mutex_);
  for (const auto& id : order_) {
    const auto& s = *sessions_.at(id);
    std::lock_guard guard(s.mutex);
    out.push_back(s.record);
  }
  return out;
}

SessionRecord SessionStore::get(const std::string& session_id) const {
  auto& s = slot(session_id);
  std::lock_guard guard(s.mutex);
  return s.record;
}

void SessionStore::require_open(const std::string& session_id) const {
  auto& s = slot(session_id);
  std::lock_guard guard(s.mutex);
  if (!s.record.open()) throw ApiError(409, "session '" + session_id + "' is closed");
}

InspectionEvent SessionStore::append_event(const std::string& session_id,
                                           std::vector<std::string> digests,
                                           const InspectionResult& result) {
  auto& s = slot(session_id);
  std::lock_guard guard(s.mutex);
  if (!s.record.open()) throw ApiError(409, "session '" + session_id + "' is closed");
  InspectionEvent e;
  char id[16];
  std::snprintf(id, sizeof id, "e%06zu", s.record.events.size() + 1);
  e.event_id = id;
  e.timestamp = timestamp_now();
  e.frame_digests = std::move(digests);
  e.result = wireinspect::to_json(result);
  e.overall = result.overall;
  append_line(s, {{"type", "event"}, {"event", to_json(e)}});
  s.record.events.push_back(e);
  s.record.counts = s.record.tally();
  return e;
}

InspectionEvent SessionStore::resolve(const std::string& session_id, const std::string& event_id,
                                      OperatorAction action) {
  if (action == OperatorAction::None) throw ApiError(400, "action must be manual_pass or manual_fail");
  auto& s = slot(session_id);
  std::lock_guard guard(s.mutex);
  auto it = std::find_if(s.record.events.begin(), s.record.events.end(),
                         [&](const InspectionEvent& e) { return e.event_id == event_id; });
  if (it == s.record.events.end()) throw ApiError(404, "unknown event '" + event_id + "'");
  if (it->overall != Verdict::Unclear) {
    throw ApiError(409, "event '" + event_id + "' is " +
                            std::string(wireinspect::to_string(it->overall)) +
                            "; only Unclear results take an operator decision");
  }
  if (it->operator_action != OperatorAction::None) {
    throw ApiError(409, "event '" + event_id + "' is already resolved");
  }
  const auto at = timestamp_now();
  append_line(s, {{"type", "resolve"},
                  {"event_id", event_id},
                  {"action", std::string(to_string(action))},
                  {"at", at}});
  it->operator_action = action;
  it->resolved_at = at;
  s.record.counts = s.record.tally();
  return *it;
}

SessionRecord SessionStore::close(const std::string& session_id) {
  auto& s = slot(session_id);
  std::lock_guard guard(s.mutex);
  if (!s.record.open()) throw ApiError(409, "session '" + session_id + "' is already closed");
  const auto at = timestamp_now();
  append_line(s, {{"type", "close"}, {"at", at}});
  s.record.ended_at = at;
  return s.record;
}

std::string SessionStore::store_blob(std::span<const std::uint8_t> bytes) {
  const auto digest = sha256_hex(bytes);
  const auto path = root_ / "blobs" / (digest + ".png");
  if (!fs::exists(path)) {
    replace_file(path, std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  return digest;
}

// ---- ProfileRepository ----------------------------------------------------

ProfileRepository::ProfileRepository(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    const auto name = entry.path().filename().string();
    const std::string suffix = ".harnessprofile.json";
    if (!entry.is_regular_file() || name.size() <= suffix.size() ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    auto p = std::make_shared<const TrainedProfile>(load_profile(entry.path()));
    profiles_.emplace(p->profile_id, std::move(p));
  }
}

std::shared_ptr<const TrainedProfile> ProfileRepository::find(const std::string& profile_id) const {
  std::shared_lock lock(mutex_);
  const auto it = profiles_.find(profile_id);
  return it == profiles_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const TrainedProfile>> ProfileRepository::list() const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<const TrainedProfile>> out;
  for (const auto& [id, p] : profiles_) out.push_back(p);
  return out;
}

void ProfileRepository::add(TrainedProfile profile) {
  const auto path = profile_path(root_, profile);
  save_profile(profile, path);
  auto p = std::make_shared<const TrainedProfile>(std::move(profile));
  std::unique_lock lock(mutex_);
  profiles_[p->profile_id] = std::move(p);
}

// ---- HTTP -----------------------------------------------------------------

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SampleCountTooLow:
    case ErrorCode::WireCountInconsistent:
    case ErrorCode::TrainingSampleUnclear:
    case ErrorCode::ProfileVersionMismatch:
      return 422;
    case ErrorCode::Io:
    case ErrorCode::CorruptProfile:
      return 500;
    default:
      return 400;
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw ApiError(400, "request body must be JSON");
  }
}

std::string required_string(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string() ||
      j.at(key).get<std::string>().empty()) {
    throw ApiError(400, std::string("field '") + key + "' is required");
  }
  return j.at(key).get<std::string>();
}

RgbImage decode_upload(const std::string& content, const std::string& what) {
  try {
    return decode_png({reinterpret_cast<const std::uint8_t*>(content.data()), content.size()});
  } catch (const Error&) {
    throw ApiError(400, what + " is not a readable PNG");
  }
}

json profile_summary(const TrainedProfile& p) {
  json views = json::array();
  for (const auto& v : p.views) {
    views.push_back({{"view_id", v.view_id}, {"expected_wires", v.expected_wires}});
  }
  return {{"profile_id", p.profile_id},
          {"harness_type", p.harness_type},
          {"created_at", p.created_at},
          {"sample_count", p.sample_count},
          {"extractor_version", p.extractor_version},
          {"views", views}};
}

}  // namespace

InspectionService::InspectionService(ServiceConfig config)
    : config_(std::move(config)),
      store_(std::make_unique<SessionStore>(config_.sessions_dir)),
      profiles_(std::make_unique<ProfileRepository>(config_.profiles_dir)),
      server_(std::make_unique<httplib::Server>()) {
  if (config_.token.empty()) throw Error(ErrorCode::InvalidConfig, "an auth token is required");
  routes();
}

InspectionService::~InspectionService() = default;

int InspectionService::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool InspectionService::listen() { return server_->listen_after_bind(); }

void InspectionService::stop() { server_->stop(); }

void InspectionService::routes() {
  auto& srv = *server_;

  srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const auto header = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    const bool ok = header.size() == prefix.size() + config_.token.size() &&
                    header.compare(0, prefix.size(), prefix) == 0 &&
                    CRYPTO_memcmp(header.data() + prefix.size(), config_.token.data(),
                                  config_.token.size()) == 0;
    if (ok) return httplib::Server::HandlerResponse::Unhandled;
    res.set_header("WWW-Authenticate", "Bearer");
    send_json(res, 401, {{"error", "missing or invalid bearer token"}});
    return httplib::Server::HandlerResponse::Handled;
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const ApiError& e) {
      send_json(res, e.status(), {{"error", e.what()}});
    } catch (const Error& e) {
      send_json(res, status_for(e.code()),
                {{"error", e.what()}, {"code", std::string(wireinspect::to_string(e.code()))}});
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  });

  srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto operator_name = required_string(body, "operator");
    const auto profile_id = required_string(body, "profile_id");
    const auto profile = profiles_->find(profile_id);
    if (!profile) throw ApiError(404, "unknown profile '" + profile_id + "'");
    const auto harness_type = body.value("harness_type", profile->harness_type);
    if (harness_type != profile->harness_type) {
      throw ApiError(400, "profile '" + profile_id + "' is for harness type '" +
                              profile->harness_type + "'");
    }
    send_json(res, 201, to_json(store_->create(operator_name, harness_type, profile_id)));
  });

  srv.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& s : store_->list()) out.push_back(to_json(s, false));
    send_json(res, 200, out);
  });

  srv.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, to_json(store_->get(req.matches[1])));
  });

  srv.Post(R"(/sessions/([^/]+)/inspect)", [this](const httplib::Request& req,
                                                  httplib::Response& res) {
    const std::string id = req.matches[1];
    store_->require_open(id);
    const auto profile = profiles_->find(store_->get(id).profile_id);
    if (!profile) throw ApiError(404, "the session's profile is no longer available");
    const auto uploads = req.get_file_values("frame");
    if (uploads.size() != profile->views.size()) {
      throw ApiError(400, "expected " + std::to_string(profile->views.size()) +
                              " 'frame' uploads (one per view), got " +
                              std::to_string(uploads.size()));
    }
    std::vector<RgbImage> frames;
    for (std::size_t i = 0; i < uploads.size(); ++i) {
      frames.push_back(decode_upload(uploads[i].content, "frame " + std::to_string(i)));
    }
    const auto result = inspect(frames, *profile);
    std::vector<std::string> digests;
    for (const auto& u : uploads) {
      digests.push_back(store_->store_blob(
          {reinterpret_cast<const std::uint8_t*>(u.content.data()), u.content.size()}));
    }
    const auto event = store_->append_event(id, std::move(digests), result);
    send_json(res, 200, {{"event_id", event.event_id},
                         {"result", event.result},
                         {"awaiting_operator", result.overall == Verdict::Unclear}});
  });

  srv.Post(R"(/sessions/([^/]+)/events/([^/]+)/resolve)", [this](const httplib::Request& req,
                                                                 httplib::Response& res) {
    const auto body = parse_body(req);
    const auto action = parse_action(required_string(body, "action"));
    send_json(res, 200, to_json(store_->resolve(req.matches[1], req.matches[2], action)));
  });

  srv.Post(R"(/sessions/([^/]+)/close)", [this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, to_json(store_->close(req.matches[1])));
  });

  srv.Get("/profiles", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& p : profiles_->list()) out.push_back(profile_summary(*p));
    send_json(res, 200, out);
  });

  // Multipart: a "config" part holding the views config JSON, and for each
  // view one "sample:<view_id>" file part per training frame.
  srv.Post("/profiles", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("config")) throw ApiError(400, "multipart part 'config' is required");
    json cfg_json;
    try {
      cfg_json = json::parse(req.get_file_value("config").content);
    } catch (const json::parse_error&) {
      throw ApiError(400, "'config' must be JSON");
    }
    const auto cfg = views_config_from_json(cfg_json);
    std::vector<std::vector<RgbImage>> samples;
    TrainOptions opts;
    for (const auto& view : cfg.views) {
      const auto uploads = req.get_file_values("sample:" + view.view_id);
      std::vector<RgbImage> frames;
      for (std::size_t i = 0; i < uploads.size(); ++i) {
        frames.push_back(decode_upload(uploads[i].content, "sample " + std::to_string(i) +
                                                               " of view '" + view.view_id + "'"));
        if (samples.empty()) {
          opts.sample_sources.push_back(uploads[i].filename.empty() ? "upload-" + std::to_string(i)
                                                                   : uploads[i].filename);
        }
      }
      samples.push_back(std::move(frames));
    }
    auto profile = train(cfg.harness_type, cfg.views, samples, opts);
    const auto summary = profile_summary(profile);
    profiles_->add(std::move(profile));
    send_json(res, 201, summary);
  });
}

std::string read_token_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read token file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto token = ss.str();
  const auto first = token.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorCode::Io, "token file " + path.string() + " is empty");
  const auto last = token.find_last_not_of(" \t\r\n");
  return token.substr(first, last - first + 1);
}

}  // namespace wireinspect::service
