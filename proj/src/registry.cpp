#include "traitlens/registry.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

std::string_view label_name(ClusterLabel label) {
  switch (label) {
    case ClusterLabel::unreviewed: return "unreviewed";
    case ClusterLabel::character: return "character";
    case ClusterLabel::context: return "context";
    case ClusterLabel::discarded: return "discarded";
  }
  return "";
}

std::optional<ClusterLabel> parse_label(std::string_view name) {
  for (auto l : {ClusterLabel::unreviewed, ClusterLabel::character, ClusterLabel::context,
                 ClusterLabel::discarded})
    if (label_name(l) == name) return l;
  return std::nullopt;
}

CharacterRegistry::CharacterRegistry(const AnnotationLayer& layer, RegistryConfig config)
    : clusters_(layer.clusters), config_(config) {
  reviews_.reserve(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    index_.emplace(clusters_[i].id, i);
    reviews_.push_back({clusters_[i].id, std::nullopt, ClusterLabel::unreviewed, std::nullopt});
  }
  rebuild();
}

CharacterRegistry::CharacterRegistry(const AnnotationLayer& layer, std::vector<ClusterReview> reviews,
                                     RegistryConfig config)
    : CharacterRegistry(layer, config) {
  for (auto& r : reviews) {
    const std::size_t i = index_of(r.cluster_id);
    if (r.merged_into) index_of(*r.merged_into);
    reviews_[i] = std::move(r);
  }
  for (std::size_t i = 0; i < reviews_.size(); ++i) {
    if (reviews_[i].merged_into && *reviews_[i].merged_into == reviews_[i].cluster_id)
      throw Error(ErrorCode::SelfMerge, "cluster merged into itself", reviews_[i].cluster_id);
    // A chain longer than the cluster count means a cycle.
    std::size_t cur = i;
    for (std::size_t steps = 0; reviews_[cur].merged_into; ++steps) {
      if (steps > reviews_.size())
        throw Error(ErrorCode::CycleError, "merge links form a cycle", reviews_[i].cluster_id);
      cur = index_.at(*reviews_[cur].merged_into);
    }
  }
  rebuild();
}

std::size_t CharacterRegistry::index_of(std::string_view cluster_id) const {
  auto it = index_.find(std::string(cluster_id));
  if (it == index_.end())
    throw Error(ErrorCode::UnknownCluster, "unknown cluster '" + std::string(cluster_id) + "'",
                std::string(cluster_id));
  return it->second;
}

bool CharacterRegistry::has_cluster(std::string_view cluster_id) const {
  return index_.count(std::string(cluster_id)) != 0;
}

std::size_t CharacterRegistry::root_index(std::size_t cluster) const {
  while (reviews_[cluster].merged_into) cluster = index_.at(*reviews_[cluster].merged_into);
  return cluster;
}

std::string CharacterRegistry::root_of(std::string_view cluster_id) const {
  return clusters_[root_index(index_of(cluster_id))].id;
}

const ClusterReview& CharacterRegistry::review(std::string_view cluster_id) const {
  return reviews_[index_of(cluster_id)];
}

const Character* CharacterRegistry::find_character(std::string_view id) const {
  for (const auto& c : characters_)
    if (c.id == id) return &c;
  return nullptr;
}

void CharacterRegistry::merge(const std::string& source, const std::string& target) {
  const std::size_t s = index_of(source);
  const std::size_t t = index_of(target);
  if (s == t) throw Error(ErrorCode::SelfMerge, "cannot merge a cluster into itself", source);
  for (std::size_t cur = t;;) {
    if (cur == s)
      throw Error(ErrorCode::CycleError,
                  "merging '" + source + "' into '" + target + "' would create a cycle", source);
    if (!reviews_[cur].merged_into) break;
    cur = index_.at(*reviews_[cur].merged_into);
  }
  reviews_[s].merged_into = target;
  rebuild();
}

void CharacterRegistry::set_label(const std::string& cluster_id, ClusterLabel label) {
  reviews_[index_of(cluster_id)].label = label;
  rebuild();
}

void CharacterRegistry::set_name(const std::string& cluster_id, std::optional<std::string> name) {
  if (name && trim(std::string_view(*name)).empty()) name.reset();
  reviews_[index_of(cluster_id)].assigned_name = std::move(name);
  rebuild();
}

void CharacterRegistry::set_config(RegistryConfig config) {
  config_ = config;
  rebuild();
}

void CharacterRegistry::rebuild() {
  characters_.clear();
  context_tags_.clear();
  conflicts_.clear();
  owned_.clear();
  max_mention_length_ = 0;

  std::vector<std::vector<std::size_t>> members(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) members[root_index(i)].push_back(i);

  struct Group {
    std::size_t root;
    std::size_t chapter;
    std::size_t first;
  };
  std::vector<Group> groups;
  for (std::size_t r = 0; r < clusters_.size(); ++r) {
    if (members[r].empty()) continue;
    Group g{r, clusters_[r].source_chapter, clusters_[r].mentions.front().start};
    for (std::size_t m : members[r]) {
      g.chapter = std::min(g.chapter, clusters_[m].source_chapter);
      g.first = std::min(g.first, clusters_[m].mentions.front().start);
    }
    groups.push_back(g);
  }
  std::sort(groups.begin(), groups.end(), [&](const Group& a, const Group& b) {
    return std::tie(a.chapter, a.first, clusters_[a.root].id) <
           std::tie(b.chapter, b.first, clusters_[b.root].id);
  });

  auto display_name = [&](std::size_t root, const std::vector<std::size_t>& group) {
    if (reviews_[root].assigned_name) return *reviews_[root].assigned_name;
    for (std::size_t m : group)
      if (reviews_[m].assigned_name) return *reviews_[m].assigned_name;
    if (clusters_[root].hint) return *clusters_[root].hint;
    for (std::size_t m : group)
      if (clusters_[m].hint) return *clusters_[m].hint;
    return clusters_[root].id;
  };

  std::map<Span, std::size_t> claimed;
  for (const Group& g : groups) {
    auto group = members[g.root];
    std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(clusters_[a].source_chapter, clusters_[a].mentions.front().start,
                      clusters_[a].id) < std::tie(clusters_[b].source_chapter,
                                                  clusters_[b].mentions.front().start,
                                                  clusters_[b].id);
    });
    std::set<Span> spans;
    for (std::size_t m : group) spans.insert(clusters_[m].mentions.begin(), clusters_[m].mentions.end());

    const ClusterLabel label = reviews_[g.root].label;
    bool provisional = false;
    if (label == ClusterLabel::context) {
      context_tags_.push_back({clusters_[g.root].id, display_name(g.root, group),
                               std::vector<Span>(spans.begin(), spans.end())});
      continue;
    }
    if (label == ClusterLabel::unreviewed) {
      if (!config_.auto_promote || spans.size() < config_.min_mentions) continue;
      provisional = true;
    } else if (label != ClusterLabel::character) {
      continue;
    }

    Character c;
    c.id = clusters_[g.root].id;
    c.display_name = display_name(g.root, group);
    c.provisional = provisional;
    for (std::size_t m : group) c.member_clusters.push_back(clusters_[m].id);
    const std::size_t idx = characters_.size();
    for (const Span& s : spans) {
      if (auto [it, fresh] = claimed.emplace(s, idx); !fresh) {
        conflicts_.push_back({s, characters_[it->second].id, c.id});
        continue;
      }
      c.mentions.push_back(s);
      owned_.push_back({s, idx});
      max_mention_length_ = std::max(max_mention_length_, s.length());
    }
    characters_.push_back(std::move(c));
  }
  std::sort(owned_.begin(), owned_.end(),
            [](const OwnedMention& a, const OwnedMention& b) { return a.span < b.span; });
}

std::optional<std::string> CharacterRegistry::resolve(const Span& span,
                                                      const AnnotationLayer* layer) const {
  auto exact = std::lower_bound(owned_.begin(), owned_.end(), span,
                                [](const OwnedMention& o, const Span& s) { return o.span < s; });
  if (exact != owned_.end() && exact->span == span) return characters_[exact->character].id;

  Span target = span;
  if (layer != nullptr) {
    if (auto head = layer->head_token(span)) target = layer->tokens[*head].span;
  }
  // Mentions containing target start no earlier than target.end - max length.
  const std::size_t lo =
      target.end > max_mention_length_ ? target.end - max_mention_length_ : 0;
  auto it = std::lower_bound(owned_.begin(), owned_.end(), lo,
                             [](const OwnedMention& o, std::size_t off) { return o.span.start < off; });
  const OwnedMention* best = nullptr;
  for (; it != owned_.end() && it->span.start <= target.start; ++it) {
    if (!it->span.contains(target)) continue;
    if (best == nullptr || it->span.length() < best->span.length()) best = &*it;
  }
  if (best != nullptr) return characters_[best->character].id;
  return std::nullopt;
}

std::vector<ClusterRow> CharacterRegistry::list_clusters(const Document& doc) const {
  std::vector<ClusterRow> rows;
  rows.reserve(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    const auto& c = clusters_[i];
    ClusterRow row;
    row.cluster_id = c.id;
    row.source_chapter = c.source_chapter;
    row.mention_count = c.mentions.size();
    for (std::size_t m = 0; m < c.mentions.size() && m < 5; ++m)
      row.samples.push_back(slice(doc, c.mentions[m]));
    row.hint = c.hint;
    row.assigned_name = reviews_[i].assigned_name;
    row.label = reviews_[i].label;
    row.merged_into = reviews_[i].merged_into;
    row.root = clusters_[root_index(i)].id;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [&](const ClusterRow& a, const ClusterRow& b) {
    const auto& ca = clusters_[index_.at(a.cluster_id)];
    const auto& cb = clusters_[index_.at(b.cluster_id)];
    return std::tie(ca.source_chapter, ca.mentions.front().start) <
           std::tie(cb.source_chapter, cb.mentions.front().start);
  });
  return rows;
}

std::vector<MergeSuggestion> CharacterRegistry::suggest_merges(const Document& doc,
                                                               std::size_t limit) const {
  static const std::set<std::string> kPronouns = {
      "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him",
      "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us",
      "our", "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "one"};
  std::vector<std::size_t> roots;
  std::vector<std::set<std::string>> surfaces(clusters_.size());
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    const std::size_t r = root_index(i);
    if (reviews_[r].label == ClusterLabel::discarded) continue;
    if (r == i) roots.push_back(i);
    for (const auto& m : clusters_[i].mentions) {
      std::string s = to_lower_ascii(slice(doc, m));
      if (!kPronouns.count(s)) surfaces[r].insert(std::move(s));
    }
  }
  std::vector<MergeSuggestion> out;
  for (std::size_t a = 0; a < roots.size(); ++a) {
    for (std::size_t b = a + 1; b < roots.size(); ++b) {
      const auto& sa = surfaces[roots[a]];
      const auto& sb = surfaces[roots[b]];
      std::size_t shared = 0;
      for (const auto& s : sa) shared += sb.count(s);
      if (shared == 0) continue;
      out.push_back({clusters_[roots[b]].id, clusters_[roots[a]].id, shared});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const MergeSuggestion& x, const MergeSuggestion& y) {
    return x.shared_surfaces > y.shared_surfaces;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

CharacterRegistry merge_clusters(CharacterRegistry registry, const std::string& source,
                                 const std::string& target) {
  registry.merge(source, target);
  return registry;
}

CharacterRegistry set_label(CharacterRegistry registry, const std::string& cluster_id,
                            ClusterLabel label) {
  registry.set_label(cluster_id, label);
  return registry;
}

CharacterRegistry set_name(CharacterRegistry registry, const std::string& cluster_id,
                           std::optional<std::string> name) {
  registry.set_name(cluster_id, std::move(name));
  return registry;
}

}  // namespace traitlens
