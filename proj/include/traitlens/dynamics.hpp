#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "traitlens/corpus.hpp"

namespace traitlens {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  // Returns false (and stores nothing) for duplicates.
  bool add(std::string word, std::vector<double> vector);
  const std::vector<double>* find(std::string_view word) const;
  // Insertion order, for deterministic serialization.
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const EmbeddingTable& other) const {
    return dimension_ == other.dimension_ && words_ == other.words_ && vectors_ == other.vectors_;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct EmbeddingLoad {
  EmbeddingTable table;
  std::vector<std::string> warnings;
};

// Lines of `token v1 ... vd`. Duplicates keep the first occurrence; zero
// vectors are skipped. Both produce warnings.
EmbeddingLoad load_embeddings(std::string_view text);

struct MeanVector {
  std::vector<double> vector;
  std::size_t in_vocabulary = 0;
  std::size_t total = 0;

  double coverage() const { return total == 0 ? 0.0 : double(in_vocabulary) / double(total); }
};

// Throws AllOutOfVocabulary when no word is known.
MeanVector mean_vector(std::span<const std::string> words, const EmbeddingTable& table);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct ActionChangeCell {
  std::string character;
  std::size_t chapter = 0;
  std::optional<double> value;  // present iff covered
  bool covered = false;
  // 1 - cos exceeded 1 and was clamped.
  bool clamped = false;

  bool operator==(const ActionChangeCell&) const = default;
};

// Cosine distance between the chapter-mean action vectors, clamped to [0, 1].
ActionChangeCell action_change(std::span<const std::string> previous, std::span<const std::string> current,
                               const EmbeddingTable& table);

struct DissimilarPair {
  std::string current;
  std::string previous;
  double similarity = 0.0;
};

std::vector<DissimilarPair> rank_dissimilar_pairs(std::span<const std::string> previous,
                                                  std::span<const std::string> current,
                                                  const EmbeddingTable& table, std::size_t limit);

struct SmoothingConfig {
  std::size_t window = 3;  // odd, >= 1
};

// Centered moving average; the window shrinks at the edges.
std::vector<double> smooth_sentiment(std::span<const double> series, SmoothingConfig config);

inline constexpr std::size_t kShortStoryWords = 10000;
inline constexpr std::size_t kShortStoryChapters = 3;

std::size_t count_words(const Document& doc);
std::size_t choose_window(const Document& doc, std::optional<std::size_t> override_window = std::nullopt);

// tf(w, c) / df(w); throws ZeroDocumentFrequency unless 1 <= tf <= df.
double word_weight(std::size_t tf, std::size_t df);

inline constexpr int kUnclustered = -1;

struct ClusterConfig {
  std::uint64_t seed = 42;
  std::optional<std::size_t> k;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;
};

std::size_t default_cluster_count(std::size_t words);

// k-means (k-means++ seeding) on L2-normalized vectors. Cluster ids are
// renumbered by first appearance in `words`; out-of-vocabulary words get
// kUnclustered.
std::vector<int> cluster_words(std::span<const std::string> words, const EmbeddingTable& table,
                               const ClusterConfig& config = {});

}  // namespace traitlens
