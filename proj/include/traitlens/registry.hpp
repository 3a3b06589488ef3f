#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "traitlens/annotations.hpp"
#include "traitlens/corpus.hpp"

namespace traitlens {

enum class ClusterLabel { unreviewed, character, context, discarded };

std::string_view label_name(ClusterLabel label);
std::optional<ClusterLabel> parse_label(std::string_view name);

struct ClusterReview {
  std::string cluster_id;
  std::optional<std::string> assigned_name;
  ClusterLabel label = ClusterLabel::unreviewed;
  std::optional<std::string> merged_into;

  bool operator==(const ClusterReview&) const = default;
};

struct Character {
  std::string id;  // id of the merge-root cluster
  std::string display_name;
  std::vector<std::string> member_clusters;
  std::vector<Span> mentions;  // sorted, deduplicated by exact span
  // Auto-promoted from an unreviewed cluster rather than labeled by a human.
  bool provisional = false;

  bool operator==(const Character&) const = default;
};

struct ContextTag {
  std::string id;
  std::string name;
  std::vector<Span> mentions;

  bool operator==(const ContextTag&) const = default;
};

// A mention span claimed by two characters; kept by the first, flagged for review.
struct MentionConflict {
  Span span;
  std::string kept_by;
  std::string dropped_from;

  bool operator==(const MentionConflict&) const = default;
};

struct RegistryConfig {
  bool auto_promote = false;
  std::size_t min_mentions = 10;

  bool operator==(const RegistryConfig&) const = default;
};

struct ClusterRow {
  std::string cluster_id;
  std::size_t source_chapter = 0;
  std::size_t mention_count = 0;
  std::vector<std::string> samples;
  std::optional<std::string> hint;
  std::optional<std::string> assigned_name;
  ClusterLabel label = ClusterLabel::unreviewed;
  std::optional<std::string> merged_into;
  std::string root;
};

struct MergeSuggestion {
  std::string source;
  std::string target;
  std::size_t shared_surfaces = 0;
};

class CharacterRegistry {
 public:
  CharacterRegistry() = default;
  explicit CharacterRegistry(const AnnotationLayer& layer, RegistryConfig config = {});
  // Restores persisted reviews onto the clusters of `layer`.
  CharacterRegistry(const AnnotationLayer& layer, std::vector<ClusterReview> reviews,
                    RegistryConfig config);

  const std::vector<ClusterReview>& reviews() const { return reviews_; }
  const std::vector<Character>& characters() const { return characters_; }
  const std::vector<ContextTag>& context_tags() const { return context_tags_; }
  const std::vector<MentionConflict>& conflicts() const { return conflicts_; }
  const RegistryConfig& config() const { return config_; }

  const ClusterReview& review(std::string_view cluster_id) const;
  const Character* find_character(std::string_view id) const;
  std::string root_of(std::string_view cluster_id) const;
  bool has_cluster(std::string_view cluster_id) const;

  void merge(const std::string& source, const std::string& target);
  void set_label(const std::string& cluster_id, ClusterLabel label);
  void set_name(const std::string& cluster_id, std::optional<std::string> name);
  void set_config(RegistryConfig config);

  // Character owning a mention equal to `span`, else the smallest mention
  // containing the span's head token (or the span itself without a layer).
  std::optional<std::string> resolve(const Span& span, const AnnotationLayer* layer = nullptr) const;

  std::vector<ClusterRow> list_clusters(const Document& doc) const;
  // Ranked, never applied: merge roots whose mention surfaces overlap.
  std::vector<MergeSuggestion> suggest_merges(const Document& doc, std::size_t limit = 20) const;

  bool operator==(const CharacterRegistry& other) const {
    return reviews_ == other.reviews_ && config_ == other.config_ && clusters_ == other.clusters_;
  }

 private:
  struct OwnedMention {
    Span span;
    std::size_t character;
  };

  std::size_t index_of(std::string_view cluster_id) const;
  std::size_t root_index(std::size_t cluster) const;
  void rebuild();

  std::vector<CorefCluster> clusters_;
  std::vector<ClusterReview> reviews_;
  RegistryConfig config_;
  std::unordered_map<std::string, std::size_t> index_;

  std::vector<Character> characters_;
  std::vector<ContextTag> context_tags_;
  std::vector<MentionConflict> conflicts_;
  std::vector<OwnedMention> owned_;  // sorted by span
  std::size_t max_mention_length_ = 0;
};

// Value-style wrappers returning an updated copy.
CharacterRegistry merge_clusters(CharacterRegistry registry, const std::string& source,
                                 const std::string& target);
CharacterRegistry set_label(CharacterRegistry registry, const std::string& cluster_id,
                            ClusterLabel label);
CharacterRegistry set_name(CharacterRegistry registry, const std::string& cluster_id,
                           std::optional<std::string> name);

}  // namespace traitlens
