#include "traitlens/service.hpp"

#include <charconv>
#include <regex>

#include <httplib.h>

#include "traitlens/codec.hpp"
#include "traitlens/render.hpp"

namespace traitlens {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownCluster:
    case ErrorCode::UnknownCharacter:
    case ErrorCode::NoRecords:
      return 404;
    case ErrorCode::NotReady:
      return 409;
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnsupportedCombination:
    case ErrorCode::ParseError:
    case ErrorCode::PatternInvalid:
    case ErrorCode::SpanOutOfRange:
      return 400;
    case ErrorCode::IoError:
      return 500;
    default:
      return 422;
  }
}

Response error_response(const Error& e) {
  json body = {{"code", error_code_name(e.code())}, {"message", e.what()}};
  if (!e.location().empty()) body["location"] = e.location();
  return {http_status(e.code()), body.dump(), "application/json"};
}

namespace {

Response ok(Body b, int status = 200) { return {status, std::move(b.content), std::move(b.content_type)}; }

std::size_t parse_index(const std::string& value, const std::string& name) {
  std::size_t out = 0;
  const char* end = value.data() + value.size();
  auto [p, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || p != end || value.empty())
    throw Error(ErrorCode::InvalidArgument, "parameter '" + name + "' must be a non-negative integer", name);
  return out;
}

bool parse_flag(const std::string& value, const std::string& name) {
  if (value == "true" || value == "1" || value.empty()) return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::InvalidArgument, "parameter '" + name + "' must be true or false", name);
}

const std::string* find(const Request& r, const std::string& key) {
  auto it = r.query.find(key);
  return it == r.query.end() ? nullptr : &it->second;
}

const std::string& require(const Request& r, const std::string& key) {
  if (const std::string* v = find(r, key)) return *v;
  throw Error(ErrorCode::InvalidArgument, "missing parameter '" + key + "'", key);
}

json parse_body(const Request& r) {
  try {
    return json::parse(r.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("request body is not valid JSON: ") + e.what());
  }
}

BodyFormat format_of(const Request& r) {
  const std::string* f = find(r, "format");
  if (f == nullptr) return BodyFormat::json;
  auto v = parse_body_format(*f);
  if (!v) throw Error(ErrorCode::InvalidArgument, "format must be json or csv", "format");
  return *v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = std::min(s.find(',', start), s.size());
    if (comma > start) out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

Project project_from_request(const Request& r) {
  if (r.content_type.rfind("text/plain", 0) == 0) return create_project(r.body);
  const json j = parse_body(r);
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
    throw Error(ErrorCode::SchemaError, "body must be an object with a string 'text'", "/text");
  const ProjectConfig config = config_from_json(j.value("config", json::object()));
  Project p = create_project(j["text"].get<std::string>(), config);
  if (j.contains("sentiment_lexicon")) p.resources.sentiment = parse_sentiment_lexicon(j["sentiment_lexicon"].get<std::string>(), "request");
  if (j.contains("emotion_lexicon")) p.resources.emotion = parse_emotion_lexicon(j["emotion_lexicon"].get<std::string>(), "request");
  if (j.contains("embeddings")) p.resources.embeddings = load_embeddings(j["embeddings"].get<std::string>()).table;
  return p;
}

}  // namespace

Service::~Service() {
  std::vector<std::shared_ptr<Slot>> all;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, s] : slots_) all.push_back(s);
  }
  for (auto& s : all)
    if (s->worker.joinable()) s->worker.join();
}

std::string Service::add_project(Project project) {
  std::lock_guard lock(mutex_);
  if (project.id.empty() || slots_.count(project.id)) {
    do {
      project.id = "p" + std::to_string(next_id_++);
    } while (slots_.count(project.id));
  }
  auto s = std::make_shared<Slot>();
  const std::string id = project.id;
  s->current = std::make_shared<const Project>(std::move(project));
  slots_.emplace(id, std::move(s));
  return id;
}

std::shared_ptr<Service::Slot> Service::slot(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw Error(ErrorCode::NotFound, "unknown project '" + id + "'", id);
  return it->second;
}

std::shared_ptr<const Project> Service::read(Slot& s) {
  std::lock_guard lock(s.state);
  return s.current;
}

std::shared_ptr<const Project> Service::snapshot(const std::string& id) const { return read(*slot(id)); }

std::vector<std::string> Service::project_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : slots_) out.push_back(id);
  return out;
}

void Service::wait_idle(const std::string& id) {
  auto s = slot(id);
  std::unique_lock lock(s->state);
  s->idle.wait(lock, [&] { return !s->running; });
}

template <class F>
std::shared_ptr<const Project> Service::mutate(Slot& s, F&& change) {
  std::lock_guard writer(s.write);
  Project next = *read(s);
  change(next);
  auto published = std::make_shared<const Project>(std::move(next));
  std::lock_guard lock(s.state);
  s.current = published;
  return published;
}

Response Service::start_analysis(const std::shared_ptr<Slot>& s, bool wait) {
  std::unique_lock lock(s->state);
  if (!s->running && s->current->status().state != AnalysisState::current) {
    // Fail fast on missing inputs rather than from the background thread.
    if (!s->current->layer) throw Error(ErrorCode::NotReady, "no annotations imported");
    if (s->worker.joinable()) s->worker.join();
    s->running = true;
    s->last_error.reset();
    std::shared_ptr<const Project> base = s->current;
    s->worker = std::thread([s, base] {
      std::optional<AnalysisResults> results;
      std::optional<std::string> failure;
      try {
        results = compute_results(*base);
      } catch (const Error& e) {
        failure = std::string(error_code_name(e.code())) + ": " + e.what();
      } catch (const std::exception& e) {
        failure = e.what();
      }
      std::lock_guard writer(s->write);
      std::lock_guard guard(s->state);
      if (results && s->current->revision == base->revision) {
        Project next = *s->current;
        next.results = std::move(results);
        next.last_run = next.revision;
        s->current = std::make_shared<const Project>(std::move(next));
      }
      s->last_error = failure;
      s->running = false;
      s->idle.notify_all();
    });
  }
  if (wait) s->idle.wait(lock, [&] { return !s->running; });
  const bool running = s->running;
  const bool current = s->current->status().state == AnalysisState::current;
  const auto failure = s->last_error;
  auto body = render_status(*s->current, running, failure);
  lock.unlock();
  if (wait && !current)
    return {409, json({{"code", "NotReady"}, {"message", failure.value_or("analysis did not complete")}}).dump(),
            "application/json"};
  return ok(std::move(body), running ? 202 : 200);
}

Response Service::handle(const Request& r) {
  static const std::regex route(R"(^/projects(?:/([^/]+)(?:/([a-z]+)(?:/([a-z]+))?)?)?/?$)");
  try {
    std::smatch m;
    if (!std::regex_match(r.path, m, route)) throw Error(ErrorCode::NotFound, "no route for " + r.path, r.path);
    const std::string id = m[1].str();
    const std::string resource = m[2].str();
    const std::string sub = m[3].str();
    const std::string& method = r.method;
    auto bad_method = [&]() -> Response {
      return {405, json({{"code", "InvalidArgument"}, {"message", method + " not allowed on " + r.path}}).dump(),
              "application/json"};
    };

    if (id.empty()) {
      if (method == "POST") {
        const std::string new_id = add_project(project_from_request(r));
        return ok(render_summary(*snapshot(new_id)), 201);
      }
      if (method == "GET") return ok(json_body({{"projects", project_ids()}}));
      return bad_method();
    }

    auto s = slot(id);
    if (resource.empty()) {
      if (method != "GET") return bad_method();
      return ok(render_summary(*read(*s)));
    }
    if (resource == "annotations" && sub.empty()) {
      if (method != "POST") return bad_method();
      auto p = mutate(*s, [&](Project& next) { import_annotations(next, r.body); });
      return ok(render_summary(*p));
    }
    if (resource == "text" && sub.empty()) {
      if (method != "GET") return bad_method();
      auto p = read(*s);
      std::optional<Span> span;
      if (find(r, "start") || find(r, "end")) {
        const std::size_t start = find(r, "start") ? parse_index(*find(r, "start"), "start") : 0;
        const std::size_t end = find(r, "end") ? parse_index(*find(r, "end"), "end") : p->doc.length();
        span = Span{start, end};
      }
      return {200, get_text(*p, span), "text/plain; charset=utf-8"};
    }
    if (resource == "clusters" && sub.empty()) {
      if (method == "GET") return ok(render_clusters(*read(*s)));
      if (method != "PATCH") return bad_method();
      const json body = parse_body(r);
      const json edits = body.is_array() ? body : json::array({body});
      auto p = mutate(*s, [&](Project& next) {
        for (std::size_t i = 0; i < edits.size(); ++i) {
          const json& e = edits[i];
          const std::string where = "/" + std::to_string(i);
          if (!e.is_object() || !e.contains("cluster_id") || !e["cluster_id"].is_string())
            throw Error(ErrorCode::SchemaError, "each edit needs a string cluster_id", where);
          const std::string cid = e["cluster_id"].get<std::string>();
          if (e.contains("name")) {
            if (e["name"].is_null()) set_cluster_name(next, cid, std::nullopt);
            else if (e["name"].is_string()) set_cluster_name(next, cid, e["name"].get<std::string>());
            else throw Error(ErrorCode::SchemaError, "name must be a string or null", where + "/name");
          }
          if (e.contains("label")) {
            auto label = e["label"].is_string() ? parse_label(e["label"].get<std::string>()) : std::nullopt;
            if (!label) throw Error(ErrorCode::SchemaError, "unknown label", where + "/label");
            set_cluster_label(next, cid, *label);
          }
        }
      });
      return ok(render_clusters(*p));
    }
    if (resource == "clusters" && sub == "merge") {
      if (method != "POST") return bad_method();
      const json body = parse_body(r);
      if (!body.is_object() || !body.contains("source") || !body.contains("target") || !body["source"].is_string() ||
          !body["target"].is_string())
        throw Error(ErrorCode::SchemaError, "merge needs string source and target");
      auto p = mutate(*s, [&](Project& next) {
        merge_clusters(next, body["source"].get<std::string>(), body["target"].get<std::string>());
      });
      return ok(render_clusters(*p));
    }
    if (resource == "analyze" && sub.empty()) {
      if (method != "POST") return bad_method();
      const std::string* w = find(r, "wait");
      return start_analysis(s, w != nullptr && parse_flag(*w, "wait"));
    }
    if (resource == "status" && sub.empty()) {
      if (method != "GET") return bad_method();
      std::lock_guard lock(s->state);
      return ok(render_status(*s->current, s->running, s->last_error));
    }
    if (method != "GET" || !sub.empty()) {
      if (resource == "matrix" || resource == "wordzone" || resource == "cooccurrence" || resource == "contexts")
        return bad_method();
      throw Error(ErrorCode::NotFound, "no route for " + r.path, r.path);
    }
    auto p = read(*s);
    if (resource == "matrix") {
      MatrixQuery q;
      auto kind = parse_matrix_kind(require(r, "kind"));
      if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown matrix kind", "kind");
      q.kind = *kind;
      if (const std::string* l = find(r, "level")) {
        auto level = parse_matrix_level(*l);
        if (!level) throw Error(ErrorCode::InvalidArgument, "level must be chapter or sentence", "level");
        q.level = *level;
      }
      if (const std::string* c = find(r, "chapter")) q.chapter = parse_index(*c, "chapter");
      if (const std::string* c = find(r, "characters")) q.characters = split_list(*c);
      if (const std::string* sm = find(r, "smooth")) q.smooth = parse_flag(*sm, "smooth");
      q.format = format_of(r);
      return ok(render_matrix(*p, q));
    }
    if (resource == "wordzone") {
      auto kind = parse_wordzone_kind(find(r, "kind") ? *find(r, "kind") : "actions");
      if (!kind) throw Error(ErrorCode::InvalidArgument, "kind must be actions or definitions", "kind");
      return ok(render_wordzone(*p, require(r, "character"), *kind, format_of(r)));
    }
    if (resource == "cooccurrence")
      return ok(render_cooccurrence(*p, require(r, "character"), parse_index(require(r, "chapter"), "chapter")));
    if (resource == "contexts") {
      const std::size_t rows = find(r, "max_rows") ? parse_index(*find(r, "max_rows"), "max_rows") : kDefaultContextRows;
      return ok(render_contexts(*p, rows, format_of(r)));
    }
    throw Error(ErrorCode::NotFound, "no route for " + r.path, r.path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return {500, json({{"code", "Internal"}, {"message", e.what()}}).dump(), "application/json"};
  }
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Service& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      Request r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query[k] = v;
      r.body = req.body;
      r.content_type = req.get_header_value("Content-Type");
      Response out = service.handle(r);
      res.status = out.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_content(out.body, out.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Patch(".*", handler);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace traitlens
