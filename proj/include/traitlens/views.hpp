#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traitlens/analysis.hpp"

namespace traitlens {

enum class MatrixKind { presence, speech, sentiment, emotion, action_change };
enum class MatrixLevel { chapter, sentence };
enum class PresenceUnit { mentions, sentences };
enum class WordZoneKind { actions, definitions };

std::string_view kind_name(MatrixKind k);
std::optional<MatrixKind> parse_matrix_kind(std::string_view s);
std::string_view level_name(MatrixLevel l);
std::optional<MatrixLevel> parse_matrix_level(std::string_view s);
std::string_view unit_name(PresenceUnit u);
std::optional<PresenceUnit> parse_presence_unit(std::string_view s);
std::string_view wordzone_kind_name(WordZoneKind k);
std::optional<WordZoneKind> parse_wordzone_kind(std::string_view s);

struct ViewConfig {
  PresenceUnit presence_unit = PresenceUnit::mentions;
  bool smooth = true;
  ClusterConfig clustering;
  std::size_t popup_pairs = 10;
};

// Read-only bundle of one analysed project snapshot.
struct ViewContext {
  const Document& doc;
  const AnnotationLayer& layer;
  const CharacterRegistry& registry;
  const AnalysisResults& results;
  const EmbeddingTable* embeddings = nullptr;
  ViewConfig config;
};

struct MatrixCell {
  double value = 0.0;
  std::optional<Emotion> category;  // emotion matrices only
  double normalized = 0.0;          // in [0, 1], for the color scale
  std::vector<Span> evidence;
  std::vector<DissimilarPair> pairs;  // action_change popup

  bool operator==(const MatrixCell& o) const {
    return value == o.value && category == o.category && normalized == o.normalized &&
           evidence == o.evidence;
  }
};

struct IndicatorMatrix {
  MatrixKind kind = MatrixKind::presence;
  MatrixLevel level = MatrixLevel::chapter;
  std::optional<std::size_t> focus_chapter;
  std::vector<std::string> rows;  // character ids
  std::vector<std::string> row_names;
  std::vector<std::size_t> columns;  // chapter or sentence indices
  std::vector<std::vector<std::optional<MatrixCell>>> cells;

  bool operator==(const IndicatorMatrix&) const = default;
};

// `characters` empty means every character in registry order.
IndicatorMatrix build_matrix(const ViewContext& ctx, MatrixKind kind, MatrixLevel level,
                             std::span<const std::string> characters = {},
                             std::optional<std::size_t> focus_chapter = std::nullopt);

std::vector<std::string> cooccurrence(const ViewContext& ctx, const std::string& character,
                                      std::size_t chapter);

struct WordZoneEntry {
  std::string word;
  double weight = 0.0;
  std::size_t tf = 0;
  std::size_t df = 0;
  int cluster = 0;
  std::size_t rank = 0;  // 1-based display rank
  std::vector<Span> evidence;
};

struct WordZone {
  std::string character;
  WordZoneKind kind = WordZoneKind::actions;
  std::vector<WordZoneEntry> entries;
};

WordZone build_wordzone(const ViewContext& ctx, const std::string& character, WordZoneKind kind);

struct ContextLabel {
  std::string text;
  std::size_t chapter = 0;
  double width = 1.0;  // chapter units
  int priority = 0;    // higher first within a chapter
};

struct PlacedLabel {
  ContextLabel label;
  std::optional<std::size_t> row;  // nullopt = dropped
};

struct ContextLayout {
  std::vector<PlacedLabel> labels;  // in processing order
  std::size_t max_rows = 1;

  std::size_t placed() const;
};

// Row assignment maximizing placed labels, then minimizing the sum of row indices.
ContextLayout layout_contexts(std::span<const ContextLabel> labels, std::size_t max_rows,
                              std::size_t chapter_count);

// Labels from context-tagged clusters (one per chapter they appear in) and
// non-numeric chapter titles.
std::vector<ContextLabel> context_labels(const ViewContext& ctx, double chars_per_column);

}  // namespace traitlens
