#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "traitlens/error.hpp"
#include "traitlens/project.hpp"

namespace traitlens {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string content_type;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

int http_status(ErrorCode code);
Response error_response(const Error& e);

// Projects held in memory. Readers get immutable snapshots; mutations are
// serialized per project and publish a new snapshot when they succeed.
class Service {
 public:
  Service() = default;
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request);

  // Registers a project; its id is kept unless taken. Returns the id used.
  std::string add_project(Project project);
  std::shared_ptr<const Project> snapshot(const std::string& id) const;
  std::vector<std::string> project_ids() const;
  // Blocks until no analysis is running for `id`.
  void wait_idle(const std::string& id);

 private:
  struct Slot {
    std::mutex write;  // held for the whole of a mutation
    std::mutex state;  // guards the fields below
    std::condition_variable idle;
    std::shared_ptr<const Project> current;
    bool running = false;
    std::optional<std::string> last_error;
    std::thread worker;
  };

  std::shared_ptr<Slot> slot(const std::string& id) const;
  static std::shared_ptr<const Project> read(Slot& s);
  template <class F>
  std::shared_ptr<const Project> mutate(Slot& s, F&& change);
  Response start_analysis(const std::shared_ptr<Slot>& s, bool wait);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::uint64_t next_id_ = 1;
};

// cpp-httplib front end over Service::handle.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace traitlens
