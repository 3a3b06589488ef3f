#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "traitlens/corpus.hpp"

namespace traitlens {

inline constexpr int kAnnotationFormatVersion = 1;

// Universal POS tags accepted in Token::pos.
inline constexpr std::array<std::string_view, 17> kUniversalPos = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

enum class Emotion { joy, sadness, love, anger, fear, surprise };

// Fixed order; doubles as the tie-break order for emotion argmax.
inline constexpr std::array<Emotion, 6> kEmotionOrder = {
    Emotion::joy, Emotion::sadness, Emotion::love,
    Emotion::anger, Emotion::fear, Emotion::surprise};

std::string_view emotion_name(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view name);

struct Token {
  Span span;
  std::string surface;
  std::string lemma;
  std::string pos;
  std::size_t head = 0;  // index within the sentence; equals own index for the root
  std::string deprel;
  std::size_t sentence = 0;

  bool operator==(const Token&) const = default;
};

struct SentenceAnn {
  std::size_t index = 0;
  Span span;
  std::size_t chapter = 0;
  std::size_t token_begin = 0;  // global token range [begin, end)
  std::size_t token_end = 0;

  std::size_t token_count() const { return token_end - token_begin; }
  bool operator==(const SentenceAnn&) const = default;
};

struct CorefCluster {
  std::string id;
  std::vector<Span> mentions;
  std::size_t source_chapter = 0;
  std::optional<std::string> hint;

  bool operator==(const CorefCluster&) const = default;
};

struct PropositionArg {
  std::string role;
  Span span;

  bool operator==(const PropositionArg&) const = default;
};

struct Proposition {
  std::size_t sentence = 0;
  std::vector<PropositionArg> args;

  const PropositionArg* find(std::string_view role) const;
  bool operator==(const Proposition&) const = default;
};

struct SentenceScore {
  std::size_t sentence = 0;
  std::optional<double> sentiment;
  std::optional<Emotion> emotion;

  bool operator==(const SentenceScore&) const = default;
};

enum class Severity { warning, error };

struct Finding {
  Severity severity = Severity::error;
  // One of the parse error kinds (OffsetError, TreeError, ...) or
  // "MentionBoundary" for warnings.
  std::string kind;
  std::string location;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const { return findings.empty(); }
  bool has_errors() const;
  std::vector<Finding> errors() const;
  std::vector<Finding> warnings() const;
};

struct AnnotationLayer {
  int format_version = kAnnotationFormatVersion;
  std::vector<Token> tokens;
  std::vector<SentenceAnn> sentences;
  std::vector<CorefCluster> clusters;
  std::vector<Proposition> propositions;
  std::vector<SentenceScore> scores;
  // Warnings raised when the layer was accepted; not serialized.
  std::vector<Finding> warnings;

  // Global index of a sentence-local head reference.
  std::size_t head_of(std::size_t token) const;
  bool is_root(std::size_t token) const;
  // Global indices of tokens whose head is `token`, in order.
  std::vector<std::size_t> dependents(std::size_t token) const;
  // First dependent carrying a nominal-subject relation; `include_passive`
  // admits subtypes such as nsubj:pass.
  std::optional<std::size_t> nominal_subject(std::size_t token, bool include_passive = true) const;
  // Tokens lying fully inside `span`, as a global index range.
  std::pair<std::size_t, std::size_t> tokens_within(const Span& span) const;
  // Token whose span covers `offset`.
  std::optional<std::size_t> token_at(std::size_t offset) const;
  // Syntactic head of the tokens inside `span`: the first one whose head lies outside it.
  std::optional<std::size_t> head_token(const Span& span) const;
  std::optional<std::size_t> sentence_at(std::size_t offset) const;
  const SentenceScore* score_for(std::size_t sentence) const;

  bool operator==(const AnnotationLayer& other) const;
};

// Parses and validates the interchange JSON; rejects rather than repairs.
AnnotationLayer parse_annotations(std::string_view payload, const Document& doc);
inline AnnotationLayer parse_annotations(const std::string& payload, const Document& doc) {
  return parse_annotations(std::string_view(payload), doc);
}
AnnotationLayer parse_annotations(const nlohmann::json& payload, const Document& doc);

ValidationReport validate(const AnnotationLayer& layer, const Document& doc);

nlohmann::json serialize_annotations(const AnnotationLayer& layer);

}  // namespace traitlens
