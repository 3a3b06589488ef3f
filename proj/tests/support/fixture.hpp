// Shared helpers for loading the annotated gold story.
#pragma once

#include <algorithm>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "traitlens/project.hpp"

#ifndef TRAITLENS_FIXTURE_DIR
#error "TRAITLENS_FIXTURE_DIR must point at tests/data/fixture"
#endif

namespace fixture {

inline std::string path(const std::string& name) { return std::string(TRAITLENS_FIXTURE_DIR) + "/" + name; }

inline nlohmann::json gold() { return nlohmann::json::parse(traitlens::read_file(path("gold.json"))); }

// Gold character key -> registry root cluster.
inline std::map<std::string, std::string> roots() {
  std::map<std::string, std::string> out;
  auto g = gold();
  for (auto& [key, ids] : g["characters"].items()) out[key] = ids[0].get<std::string>();
  return out;
}

inline traitlens::Project ingested() {
  traitlens::Project p = traitlens::create_project(traitlens::read_file(path("story.txt")), {}, "fixture");
  traitlens::load_resources(p, {std::nullopt, std::nullopt, path("embeddings.txt")});
  return p;
}

// Imported and curated the way a reviewer would: one character per person,
// places and objects as contexts.
inline traitlens::Project curated() {
  traitlens::Project p = ingested();
  traitlens::import_annotations(p, traitlens::read_file(path("annotations.json")));
  const auto g = gold();
  auto apply = [&](const nlohmann::json& groups, traitlens::ClusterLabel label) {
    for (auto& [key, ids] : groups.items()) {
      const std::string root = ids[0].get<std::string>();
      traitlens::set_cluster_label(p, root, label);
      traitlens::set_cluster_name(p, root, g["names"][key].get<std::string>());
      for (std::size_t i = 1; i < ids.size(); ++i) traitlens::merge_clusters(p, ids[i].get<std::string>(), root);
    }
  };
  apply(g["characters"], traitlens::ClusterLabel::character);
  apply(g["contexts"], traitlens::ClusterLabel::context);
  return p;
}

inline traitlens::Project analyzed() {
  traitlens::Project p = curated();
  traitlens::run_analysis(p);
  return p;
}

struct Triple {
  std::size_t sentence;
  std::string character;
  std::string lemma;
  auto operator<=>(const Triple&) const = default;
};

// |pred ∩ gold| / |pred ∪ gold| over multisets.
inline double jaccard(std::vector<Triple> pred, std::vector<Triple> gold) {
  std::sort(pred.begin(), pred.end());
  std::sort(gold.begin(), gold.end());
  std::vector<Triple> both;
  std::set_intersection(pred.begin(), pred.end(), gold.begin(), gold.end(), std::back_inserter(both));
  const std::size_t uni = pred.size() + gold.size() - both.size();
  return uni == 0 ? 1.0 : static_cast<double>(both.size()) / static_cast<double>(uni);
}

inline std::string key_of(const std::string& root) {
  for (const auto& [k, r] : roots())
    if (r == root) return k;
  return root;
}

inline std::vector<Triple> gold_triples(const std::string& section) {
  std::vector<Triple> out;
  const auto g = gold();
  for (const auto& e : g[section])
    out.push_back({e["sentence"].get<std::size_t>(), e["character"].get<std::string>(), e["lemma"].get<std::string>()});
  return out;
}

}  // namespace fixture
