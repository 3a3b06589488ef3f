#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "traitlens/annotations.hpp"
#include "traitlens/corpus.hpp"
#include "traitlens/dynamics.hpp"
#include "traitlens/extractors.hpp"
#include "traitlens/lexicon.hpp"
#include "traitlens/registry.hpp"

namespace traitlens {

struct AnalysisResources {
  std::optional<SentimentLexicon> sentiment;
  std::optional<EmotionLexicon> emotion;
  std::optional<EmbeddingTable> embeddings;

  bool operator==(const AnalysisResources&) const = default;
};

struct AnalysisOptions {
  std::optional<std::size_t> window;

  bool operator==(const AnalysisOptions&) const = default;
};

// Everything the views read. Per-sentence vectors are indexed by sentence.
struct AnalysisResults {
  std::vector<Quote> quotes;
  std::vector<ActionRecord> actions;
  std::vector<DefinitionRecord> definitions;
  std::vector<SentimentScore> sentiment;
  std::vector<EmotionLabel> emotions;
  std::vector<double> smoothed_sentiment;
  std::size_t window = 3;
  // Per character (registry order) and chapter >= 1.
  std::vector<ActionChangeCell> action_changes;

  bool operator==(const AnalysisResults&) const = default;
};

// Throws LexiconMissing when a sentence has neither an external score nor a lexicon.
AnalysisResults run_pipeline(const Document& doc, const AnnotationLayer& layer,
                             const CharacterRegistry& registry, const AnalysisResources& resources,
                             const AnalysisOptions& options = {});

// Action lemmas of `character` in `chapter`, in record order.
std::vector<std::string> chapter_actions(const AnalysisResults& results, const std::string& character,
                                         std::size_t chapter);

}  // namespace traitlens
