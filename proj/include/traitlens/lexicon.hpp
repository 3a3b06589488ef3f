#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "traitlens/annotations.hpp"

namespace traitlens {

inline constexpr double kLexiconScoreLimit = 4.0;

// word -> valence in [-4, +4]
struct SentimentLexicon {
  std::unordered_map<std::string, double> scores;
  std::string source;

  std::optional<double> lookup(std::string_view word) const;
  bool operator==(const SentimentLexicon&) const = default;
};

// word -> one of the six emotion categories
struct EmotionLexicon {
  std::unordered_map<std::string, Emotion> categories;
  std::string source;

  std::optional<Emotion> lookup(std::string_view word) const;
  bool operator==(const EmotionLexicon&) const = default;
};

// TSV `lemma<TAB>score`. Blank lines and lines starting with '#' are skipped;
// extra columns are ignored. Keys are lower-cased.
SentimentLexicon parse_sentiment_lexicon(std::string_view tsv, std::string source = "inline");
// TSV `lemma<TAB>category`.
EmotionLexicon parse_emotion_lexicon(std::string_view tsv, std::string source = "inline");

const SentimentLexicon& builtin_sentiment_lexicon();
const EmotionLexicon& builtin_emotion_lexicon();

// Deterministic TSV dump (sorted by key) for persistence.
std::string to_tsv(const SentimentLexicon& lexicon);
std::string to_tsv(const EmotionLexicon& lexicon);

}  // namespace traitlens
