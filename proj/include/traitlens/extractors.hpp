#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traitlens/annotations.hpp"
#include "traitlens/corpus.hpp"
#include "traitlens/lexicon.hpp"
#include "traitlens/registry.hpp"

namespace traitlens {

enum class SpeakerMethod { self_reference, verb_subject, unresolved };
enum class ActionSource { proposition, dependency_fallback };
enum class DefinitionPath { copular, modifier, ascend_to_verb };
enum class ScoreSource { lexicon, external };

std::string_view method_name(SpeakerMethod m);
std::string_view source_name(ActionSource s);
std::string_view path_name(DefinitionPath p);
std::string_view source_name(ScoreSource s);

struct Quote {
  Span span;  // contents between the quotation marks
  std::size_t chapter = 0;
  std::vector<std::size_t> sentences;
  std::optional<std::string> speaker;
  SpeakerMethod method = SpeakerMethod::unresolved;
  std::optional<Span> evidence;
  // Opening mark without a matching close before the chapter ends (or before
  // the next opening curly mark).
  bool ill_formed = false;

  bool operator==(const Quote&) const = default;
};

struct ActionRecord {
  std::string character;
  std::string verb_lemma;
  Span verb_span;
  std::size_t sentence = 0;
  std::size_t chapter = 0;
  ActionSource source = ActionSource::proposition;

  bool operator==(const ActionRecord&) const = default;
};

struct DefinitionRecord {
  std::string character;
  std::string adjective_lemma;
  Span adjective_span;
  DefinitionPath path = DefinitionPath::copular;
  std::size_t sentence = 0;
  std::size_t chapter = 0;

  bool operator==(const DefinitionRecord&) const = default;
};

struct Contribution {
  Span span;
  double score = 0.0;

  bool operator==(const Contribution&) const = default;
};

struct SentimentScore {
  std::size_t sentence = 0;
  double value = 0.0;
  std::vector<Contribution> contributions;
  ScoreSource source = ScoreSource::lexicon;

  bool operator==(const SentimentScore&) const = default;
};

struct EmotionLabel {
  std::size_t sentence = 0;
  std::optional<Emotion> label;
  ScoreSource source = ScoreSource::lexicon;

  bool operator==(const EmotionLabel&) const = default;
};

struct PresenceRow {
  std::string character;
  std::vector<std::size_t> counts;  // one per chapter
};

inline constexpr double kSentimentAlpha = 15.0;

// Maps a summed lexicon score onto (-1, 1).
double normalize_lexicon_sum(double sum, double alpha = kSentimentAlpha);

std::vector<PresenceRow> presence(const Document& doc, const AnnotationLayer& layer,
                                  const CharacterRegistry& registry);

std::vector<Quote> extract_quotes(const Document& doc, const AnnotationLayer& layer);

// Verbs inside any of `other_quotes` (sorted, disjoint; may include `quote`
// itself) are not candidates for the speech verb.
Quote attribute_speaker(Quote quote, const AnnotationLayer& layer, const CharacterRegistry& registry,
                        std::span<const Quote> other_quotes = {});
std::vector<Quote> attribute_speakers(std::vector<Quote> quotes, const AnnotationLayer& layer,
                                      const CharacterRegistry& registry);

std::vector<ActionRecord> extract_actions(const AnnotationLayer& layer,
                                          const CharacterRegistry& registry);

std::vector<DefinitionRecord> extract_definitions(const AnnotationLayer& layer,
                                                  const CharacterRegistry& registry);

SentimentScore score_sentiment(std::size_t sentence, const AnnotationLayer& layer,
                               const SentimentLexicon* lexicon);

EmotionLabel label_emotion(std::size_t sentence, const AnnotationLayer& layer,
                           const EmotionLexicon* lexicon);

}  // namespace traitlens
