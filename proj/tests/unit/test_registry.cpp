#include <doctest.h>

#include <random>
#include <set>

#include "fixture.hpp"
#include "generators.hpp"
#include "traitlens/error.hpp"
#include "traitlens/registry.hpp"

using namespace traitlens;
using namespace generators;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("unreviewed clusters are not characters until labeled") {
  const Project p = [] {
    Project q = fixture::ingested();
    import_annotations(q, read_file(fixture::path("annotations.json")));
    return q;
  }();
  CHECK(p.registry.characters().empty());
  CHECK(p.registry.reviews().size() == 16);
}

TEST_CASE("curated fixture has three characters with merged mentions") {
  const Project p = fixture::curated();
  const auto& chars = p.registry.characters();
  REQUIRE(chars.size() == 3);
  CHECK(chars[0].id == "mara-1");
  CHECK(chars[0].display_name == "Mara");
  CHECK(chars[0].member_clusters == std::vector<std::string>{"mara-1", "mara-2", "mara-3"});
  CHECK(chars[1].id == "tobias-1");
  CHECK(chars[2].display_name == "Aunt Hester");
  CHECK(p.registry.context_tags().size() == 4);
  CHECK(p.registry.conflicts().empty());
  std::size_t total = 0;
  for (const auto& id : {"mara-1", "mara-2", "mara-3"})
    for (const auto& c : p.layer->clusters)
      if (c.id == id) total += c.mentions.size();
  CHECK(chars[0].mentions.size() == total);
}

TEST_CASE("merge errors") {
  CharacterRegistry r = all_characters(fixture::curated().layer.value());
  CHECK(code_of([&] { r.merge("mara-1", "mara-1"); }) == ErrorCode::SelfMerge);
  CHECK(code_of([&] { r.merge("mara-1", "nobody"); }) == ErrorCode::UnknownCluster);
  r.merge("mara-2", "mara-1");
  r.merge("mara-3", "mara-2");
  CHECK(r.root_of("mara-3") == "mara-1");
  CHECK(code_of([&] { r.merge("mara-1", "mara-3"); }) == ErrorCode::CycleError);
  CHECK(code_of([&] { r.set_label("ghost", ClusterLabel::context); }) == ErrorCode::UnknownCluster);
}

TEST_CASE("display name falls back from assigned name to hint to id") {
  AnnotationLayer layer;
  layer.clusters.push_back({"a", {{0, 3}}, 0, std::string("Ann")});
  layer.clusters.push_back({"b", {{10, 13}}, 0, std::nullopt});
  CharacterRegistry r(layer);
  r.set_label("a", ClusterLabel::character);
  r.set_label("b", ClusterLabel::character);
  CHECK(r.find_character("a")->display_name == "Ann");
  CHECK(r.find_character("b")->display_name == "b");
  r.set_name("b", "Bea");
  CHECK(r.find_character("b")->display_name == "Bea");
  r.set_name("b", "  ");
  CHECK(r.find_character("b")->display_name == "b");
  r.merge("b", "a");
  CHECK(r.characters().size() == 1);
  CHECK(r.find_character("a")->mentions == std::vector<Span>{{0, 3}, {10, 13}});
}

TEST_CASE("a span claimed by two characters stays with the first and is flagged") {
  AnnotationLayer layer;
  layer.clusters.push_back({"a", {{0, 3}, {20, 23}}, 0, std::nullopt});
  layer.clusters.push_back({"b", {{10, 13}, {20, 23}}, 0, std::nullopt});
  CharacterRegistry r = all_characters(layer);
  REQUIRE(r.conflicts().size() == 1);
  CHECK(r.conflicts()[0] == MentionConflict{{20, 23}, "a", "b"});
  CHECK(r.resolve({20, 23}) == "a");
  r.merge("b", "a");
  CHECK(r.conflicts().empty());
  CHECK(r.find_character("a")->mentions.size() == 3);
}

TEST_CASE("auto-promotion marks large unreviewed clusters provisional") {
  AnnotationLayer layer;
  CorefCluster big{"big", {}, 0, std::nullopt};
  for (std::size_t i = 0; i < 10; ++i) big.mentions.push_back({i * 10, i * 10 + 2});
  layer.clusters.push_back(big);
  layer.clusters.push_back({"small", {{200, 202}}, 0, std::nullopt});
  CharacterRegistry r(layer, RegistryConfig{true, 10});
  REQUIRE(r.characters().size() == 1);
  CHECK(r.characters()[0].provisional);
  r.set_label("small", ClusterLabel::character);
  CHECK(r.characters().size() == 2);
  CHECK_FALSE(r.find_character("small")->provisional);
  r.set_label("big", ClusterLabel::discarded);
  CHECK(r.characters().size() == 1);
}

TEST_CASE("resolve uses exact spans then the smallest containing mention") {
  const Project p = fixture::curated();
  const auto& layer = *p.layer;
  // "Aunt Hester" in the seventh sentence; its head token is "Hester".
  const auto& s = layer.sentences[6];
  const Span aunt_hester{layer.tokens[s.token_begin].span.start, layer.tokens[s.token_begin + 1].span.end};
  CHECK(p.registry.resolve(aunt_hester, &layer) == "hester-1");
  CHECK(p.registry.resolve(layer.tokens[s.token_begin + 1].span, &layer) == "hester-1");
  CHECK_FALSE(p.registry.resolve(layer.tokens[s.token_begin + 6].span, &layer).has_value());  // "window"
}

TEST_CASE("list_clusters and merge suggestions") {
  Project p = fixture::ingested();
  import_annotations(p, read_file(fixture::path("annotations.json")));
  const auto rows = p.registry.list_clusters(p.doc);
  REQUIRE(rows.size() == 16);
  CHECK(rows[0].cluster_id == "mara-1");
  CHECK(rows[0].samples.size() == 5);
  CHECK(rows[0].samples[0] == "Mara");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].source_chapter <= rows[i].source_chapter);

  const auto suggestions = p.registry.suggest_merges(p.doc);
  REQUIRE_FALSE(suggestions.empty());
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& s : suggestions) pairs.insert({s.source, s.target});
  CHECK(pairs.count({"mara-2", "mara-1"}) == 1);
  CHECK(pairs.count({"hester-3", "hester-1"}) == 1);
  // Suggestions are never applied.
  CHECK(p.registry.root_of("mara-2") == "mara-2");
}

TEST_CASE("merges conserve distinct mentions under random sequences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const AnnotationLayer layer = random_layer(rng, 8);
    CharacterRegistry r = all_characters(layer);
    const std::size_t expected = distinct_spans(layer);
    CHECK(owned(r) == expected);
    std::uniform_int_distribution<std::size_t> pick(0, layer.clusters.size() - 1);
    for (int step = 0; step < 12; ++step) {
      const auto& a = layer.clusters[pick(rng)].id;
      const auto& b = layer.clusters[pick(rng)].id;
      try {
        r.merge(a, b);
      } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::SelfMerge || e.code() == ErrorCode::CycleError));
      }
      CHECK(owned(r) == expected);
    }
  }
}

TEST_CASE("merge result at the root does not depend on order") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const AnnotationLayer layer = random_layer(rng, 6);
    std::vector<std::string> sources;
    for (std::size_t i = 1; i < layer.clusters.size(); ++i) sources.push_back(layer.clusters[i].id);
    CharacterRegistry first = all_characters(layer);
    for (const auto& s : sources) first.merge(s, "c0");
    std::shuffle(sources.begin(), sources.end(), rng);
    CharacterRegistry second = all_characters(layer);
    for (const auto& s : sources) second.merge(s, "c0");
    REQUIRE(first.characters().size() == 1);
    CHECK(first.characters() == second.characters());
  }
}

TEST_CASE("persisted reviews restore the same registry") {
  const Project p = fixture::curated();
  const CharacterRegistry restored(*p.layer, p.registry.reviews(), p.registry.config());
  CHECK(restored == p.registry);
  CHECK(restored.characters() == p.registry.characters());

  auto reviews = p.registry.reviews();
  reviews[0].merged_into = reviews[0].cluster_id;
  CHECK(code_of([&] { CharacterRegistry(*p.layer, reviews, {}); }) == ErrorCode::SelfMerge);
  reviews = p.registry.reviews();
  reviews[0].merged_into = "mara-2";  // mara-2 -> mara-1 already
  CHECK(code_of([&] { CharacterRegistry(*p.layer, reviews, {}); }) == ErrorCode::CycleError);
}
