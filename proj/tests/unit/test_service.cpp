#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "fixture.hpp"
#include "traitlens/render.hpp"
#include "traitlens/service.hpp"

using namespace traitlens;
using nlohmann::json;

namespace {

Response call(Service& s, std::string method, std::string path, std::map<std::string, std::string> query = {},
              std::string body = {}, std::string content_type = "application/json") {
  return s.handle({std::move(method), std::move(path), std::move(query), std::move(body), std::move(content_type)});
}

std::string error_code(const Response& r) { return json::parse(r.body).at("code").get<std::string>(); }

// A service holding the curated fixture under id "fixture".
std::unique_ptr<Service> curated_service() {
  auto s = std::make_unique<Service>();
  s->add_project(fixture::curated());
  return s;
}

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::UnknownCluster) == 404);
  CHECK(http_status(ErrorCode::NotReady) == 409);
  CHECK(http_status(ErrorCode::UnsupportedCombination) == 400);
  CHECK(http_status(ErrorCode::SchemaError) == 422);
  CHECK(http_status(ErrorCode::IoError) == 500);
  const Response r = error_response(Error(ErrorCode::CycleError, "loop", "a"));
  CHECK(r.status == 422);
  CHECK(json::parse(r.body) == json{{"code", "CycleError"}, {"message", "loop"}, {"location", "a"}});
}

TEST_CASE("project creation and reading") {
  Service s;
  const std::string story = read_file(fixture::path("story.txt"));
  Response r = call(s, "POST", "/projects", {}, json{{"text", story}, {"config", {{"window", 3}}}}.dump());
  REQUIRE(r.status == 201);
  const json summary = json::parse(r.body);
  const std::string id = summary["id"];
  CHECK(summary["chapters"].size() == 3);
  CHECK(summary["state"] == "empty");
  CHECK(summary["annotations"] == false);

  r = call(s, "POST", "/projects", {}, "plain text story", "text/plain");
  CHECK(r.status == 201);
  CHECK(json::parse(call(s, "GET", "/projects").body)["projects"].size() == 2);

  r = call(s, "GET", "/projects/" + id + "/text");
  CHECK(r.body == story);
  CHECK(r.content_type.rfind("text/plain", 0) == 0);
  CHECK(call(s, "GET", "/projects/" + id + "/text", {{"start", "0"}, {"end", "7"}}).body == "CHAPTER");
  CHECK(call(s, "GET", "/projects/" + id + "/text", {{"start", "0"}, {"end", "999999"}}).status == 400);
  CHECK(call(s, "GET", "/projects/" + id + "/text", {{"start", "x"}}).status == 400);

  CHECK(call(s, "POST", "/projects", {}, "{").status == 400);
  CHECK(call(s, "POST", "/projects", {}, json{{"nope", 1}}.dump()).status == 422);
  CHECK(call(s, "POST", "/projects", {}, json{{"text", "   "}}.dump()).status == 422);
  CHECK(call(s, "GET", "/projects/missing").status == 404);
  CHECK(call(s, "GET", "/elsewhere").status == 404);
  CHECK(call(s, "DELETE", "/projects/" + id).status == 405);
  CHECK(call(s, "POST", "/projects/" + id + "/matrix").status == 405);
}

TEST_CASE("annotation import and cluster curation") {
  Service s;
  const std::string id = s.add_project(fixture::ingested());
  CHECK(id == "fixture");
  const std::string base = "/projects/" + id;
  Response r = call(s, "POST", base + "/annotations", {}, R"({"format_version": 1})");
  CHECK(r.status == 422);
  CHECK(error_code(r) == "SchemaError");
  CHECK(s.snapshot(id)->revision == fixture::ingested().revision);

  r = call(s, "POST", base + "/annotations", {}, read_file(fixture::path("annotations.json")));
  REQUIRE(r.status == 200);
  CHECK(json::parse(r.body)["sentences"] == 60);

  r = call(s, "GET", base + "/clusters");
  CHECK(json::parse(r.body)["clusters"].size() == 16);

  r = call(s, "PATCH", base + "/clusters", {},
           json::array({{{"cluster_id", "mara-1"}, {"label", "character"}, {"name", "Mara"}},
                        {{"cluster_id", "tobias-1"}, {"label", "character"}}})
               .dump());
  REQUIRE(r.status == 200);
  CHECK(json::parse(r.body)["characters"].size() == 2);

  // A failing edit in a batch leaves the whole batch unapplied.
  const auto before = s.snapshot(id);
  r = call(s, "PATCH", base + "/clusters", {},
           json::array({{{"cluster_id", "hester-1"}, {"label", "character"}}, {{"cluster_id", "ghost"}, {"name", "x"}}})
               .dump());
  CHECK(r.status == 404);
  CHECK(*s.snapshot(id) == *before);
  CHECK(call(s, "PATCH", base + "/clusters", {}, json{{"cluster_id", "mara-1"}, {"label", "hero"}}.dump()).status == 422);

  r = call(s, "POST", base + "/clusters/merge", {}, json{{"source", "mara-2"}, {"target", "mara-1"}}.dump());
  REQUIRE(r.status == 200);
  CHECK(s.snapshot(id)->registry.root_of("mara-2") == "mara-1");
  r = call(s, "POST", base + "/clusters/merge", {}, json{{"source", "mara-1"}, {"target", "mara-2"}}.dump());
  CHECK(r.status == 422);
  CHECK(error_code(r) == "CycleError");
  CHECK(call(s, "POST", base + "/clusters/merge", {}, json{{"source", "mara-1"}}.dump()).status == 422);
}

TEST_CASE("snapshots are isolated from later mutations") {
  auto s = curated_service();
  const auto old = s->snapshot("fixture");
  const auto rev = old->revision;
  call(*s, "PATCH", "/projects/fixture/clusters", {}, json{{"cluster_id", "tobias-1"}, {"name", "Toby"}}.dump());
  CHECK(old->revision == rev);
  CHECK(old->registry.find_character("tobias-1")->display_name == "Tobias");
  CHECK(s->snapshot("fixture")->registry.find_character("tobias-1")->display_name == "Toby");
}

TEST_CASE("concurrent mutations are serialized") {
  Service s;
  Project p = fixture::ingested();
  import_annotations(p, read_file(fixture::path("annotations.json")));
  s.add_project(std::move(p));
  const auto start = s.snapshot("fixture")->revision;
  const std::vector<std::string> names{"A", "B", "C", "D", "E", "F", "G", "H"};
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (const auto& n : names)
    threads.emplace_back([&, n] {
      for (int i = 0; i < 10; ++i)
        ok += call(s, "PATCH", "/projects/fixture/clusters", {}, json{{"cluster_id", "inn-1"}, {"name", n}}.dump())
                  .status == 200;
    });
  for (auto& t : threads) t.join();
  CHECK(ok == 80);
  CHECK(s.snapshot("fixture")->revision == start + 80);
}

TEST_CASE("analysis runs in the background") {
  auto s = curated_service();
  CHECK(call(*s, "GET", "/projects/fixture/matrix", {{"kind", "presence"}}).status == 409);
  Response r = call(*s, "POST", "/projects/fixture/analyze");
  CHECK((r.status == 202 || r.status == 200));
  json status;
  for (int i = 0; i < 500; ++i) {
    status = json::parse(call(*s, "GET", "/projects/fixture/status").body);
    if (status["state"] == "current") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(status["state"] == "current");
  CHECK(status["running"] == false);
  CHECK(call(*s, "POST", "/projects/fixture/analyze").status == 200);

  Service empty;
  empty.add_project(fixture::ingested());
  r = call(empty, "POST", "/projects/fixture/analyze", {{"wait", "true"}});
  CHECK(r.status == 409);

  Service unlabeled;
  Project p = fixture::ingested();
  import_annotations(p, read_file(fixture::path("annotations.json")));
  unlabeled.add_project(std::move(p));
  r = call(unlabeled, "POST", "/projects/fixture/analyze", {{"wait", "1"}});
  CHECK(r.status == 409);
  CHECK(error_code(r) == "NotReady");
  CHECK(json::parse(call(unlabeled, "GET", "/projects/fixture/status").body)["error"].is_string());
}

TEST_CASE("a mutation during analysis discards the stale result") {
  auto s = curated_service();
  call(*s, "POST", "/projects/fixture/analyze");
  call(*s, "PATCH", "/projects/fixture/clusters", {}, json{{"cluster_id", "inn-1"}, {"name", "Inn"}}.dump());
  s->wait_idle("fixture");
  const auto snap = s->snapshot("fixture");
  if (snap->results) CHECK(snap->last_run == snap->revision);
  CHECK(call(*s, "POST", "/projects/fixture/analyze", {{"wait", "true"}}).status == 200);
  CHECK(s->snapshot("fixture")->status().state == AnalysisState::current);
}

TEST_CASE("views after analysis match the renderers") {
  auto s = curated_service();
  REQUIRE(call(*s, "POST", "/projects/fixture/analyze", {{"wait", "true"}}).status == 200);
  const auto snap = s->snapshot("fixture");
  const auto roots = fixture::roots();

  for (const char* kind : {"presence", "speech", "sentiment", "emotion", "action_change"})
    for (const char* format : {"json", "csv"}) {
      Response r = call(*s, "GET", "/projects/fixture/matrix", {{"kind", kind}, {"format", format}});
      CHECK_MESSAGE(r.status == 200, kind);
      MatrixQuery q;
      q.kind = *parse_matrix_kind(kind);
      q.format = *parse_body_format(format);
      CHECK(r.body == render_matrix(*snap, q).content);
      if (std::string(kind) != "action_change") {
        r = call(*s, "GET", "/projects/fixture/matrix", {{"kind", kind}, {"level", "sentence"}, {"chapter", "1"}});
        CHECK(r.status == 200);
        CHECK(json::parse(r.body)["columns"].size() == 15);
      }
    }
  Response r = call(*s, "GET", "/projects/fixture/matrix", {{"kind", "action_change"}, {"level", "sentence"}, {"chapter", "1"}});
  CHECK(r.status == 400);
  CHECK(error_code(r) == "UnsupportedCombination");
  CHECK(call(*s, "GET", "/projects/fixture/matrix", {{"kind", "colour"}}).status == 400);
  CHECK(call(*s, "GET", "/projects/fixture/matrix").status == 400);
  r = call(*s, "GET", "/projects/fixture/matrix",
           {{"kind", "presence"}, {"characters", roots.at("tobias") + "," + roots.at("mara")}});
  const json m = json::parse(r.body);
  REQUIRE(m["rows"].size() == 2);
  CHECK(m["rows"][0]["character"] == roots.at("tobias"));
  CHECK(call(*s, "GET", "/projects/fixture/matrix", {{"kind", "presence"}, {"characters", "nobody"}}).status == 404);

  r = call(*s, "GET", "/projects/fixture/wordzone", {{"character", roots.at("mara")}});
  CHECK(r.status == 200);
  CHECK(r.body == render_wordzone(*snap, roots.at("mara"), WordZoneKind::actions).content);
  r = call(*s, "GET", "/projects/fixture/wordzone",
           {{"character", roots.at("mara")}, {"kind", "definitions"}, {"format", "csv"}});
  CHECK(r.status == 200);
  CHECK(r.body.rfind("word,weight,tf,df,cluster,rank\r\n", 0) == 0);

  r = call(*s, "GET", "/projects/fixture/cooccurrence", {{"character", roots.at("mara")}, {"chapter", "0"}});
  CHECK(r.status == 200);
  CHECK(r.body == render_cooccurrence(*snap, roots.at("mara"), 0).content);

  r = call(*s, "GET", "/projects/fixture/contexts", {{"max_rows", "2"}});
  CHECK(r.status == 200);
  const json layout = json::parse(r.body);
  CHECK(layout["max_rows"] == 2);
  CHECK(call(*s, "GET", "/projects/fixture/contexts", {{"max_rows", "0"}}).status == 400);
  CHECK(call(*s, "GET", "/projects/fixture/contexts", {{"format", "xml"}}).status == 400);
}

TEST_CASE("http round trip") {
  Service s;
  HttpServer server(s);
  const int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  auto res = client.Post("/projects", json{{"text", read_file(fixture::path("story.txt"))}}.dump(), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  const std::string id = json::parse(res->body)["id"];
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");

  res = client.Post(("/projects/" + id + "/annotations").c_str(), read_file(fixture::path("annotations.json")),
                    "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.Patch(("/projects/" + id + "/clusters").c_str(),
                     json{{"cluster_id", "mara-1"}, {"label", "character"}}.dump(), "application/json");
  CHECK(res->status == 200);
  res = client.Post(("/projects/" + id + "/analyze?wait=true").c_str(), "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.Get(("/projects/" + id + "/matrix?kind=presence&format=csv").c_str());
  REQUIRE(res);
  CHECK(res->status == 200);
  MatrixQuery q;
  q.format = BodyFormat::csv;
  CHECK(res->body == render_matrix(*s.snapshot(id), q).content);
  res = client.Get("/projects/nope");
  CHECK(res->status == 404);
  res = client.Options("/projects");
  CHECK(res->status == 204);
  server.stop();
}
