#include "traitlens/views.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <regex>
#include <tuple>
#include <unordered_map>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

std::string_view kind_name(MatrixKind k) {
  switch (k) {
    case MatrixKind::presence: return "presence";
    case MatrixKind::speech: return "speech";
    case MatrixKind::sentiment: return "sentiment";
    case MatrixKind::emotion: return "emotion";
    case MatrixKind::action_change: return "action_change";
  }
  return "";
}

std::optional<MatrixKind> parse_matrix_kind(std::string_view s) {
  for (auto k : {MatrixKind::presence, MatrixKind::speech, MatrixKind::sentiment, MatrixKind::emotion,
                 MatrixKind::action_change})
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

std::string_view level_name(MatrixLevel l) { return l == MatrixLevel::chapter ? "chapter" : "sentence"; }

std::optional<MatrixLevel> parse_matrix_level(std::string_view s) {
  if (s == "chapter") return MatrixLevel::chapter;
  if (s == "sentence") return MatrixLevel::sentence;
  return std::nullopt;
}

std::string_view unit_name(PresenceUnit u) { return u == PresenceUnit::mentions ? "mentions" : "sentences"; }

std::optional<PresenceUnit> parse_presence_unit(std::string_view s) {
  if (s == "mentions") return PresenceUnit::mentions;
  if (s == "sentences") return PresenceUnit::sentences;
  return std::nullopt;
}

std::string_view wordzone_kind_name(WordZoneKind k) {
  return k == WordZoneKind::actions ? "actions" : "definitions";
}

std::optional<WordZoneKind> parse_wordzone_kind(std::string_view s) {
  if (s == "actions") return WordZoneKind::actions;
  if (s == "definitions") return WordZoneKind::definitions;
  return std::nullopt;
}

std::size_t ContextLayout::placed() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const PlacedLabel& l) { return l.row.has_value(); }));
}

namespace {

const Character& require_character(const ViewContext& ctx, const std::string& id) {
  const Character* c = ctx.registry.find_character(id);
  if (c == nullptr) throw Error(ErrorCode::UnknownCharacter, "unknown character '" + id + "'", id);
  return *c;
}

// Columns a span contributes to at the requested level.
struct Axis {
  MatrixLevel level;
  std::vector<std::size_t> columns;
  std::unordered_map<std::size_t, std::size_t> position;  // chapter/sentence -> column

  std::optional<std::size_t> column_of_unit(std::size_t unit) const {
    auto it = position.find(unit);
    if (it == position.end()) return std::nullopt;
    return it->second;
  }
};

Span unit_span(const ViewContext& ctx, MatrixLevel level, std::size_t unit) {
  return level == MatrixLevel::chapter ? ctx.doc.chapters()[unit].span : ctx.layer.sentences[unit].span;
}

Span clip(const Span& s, const Span& to) { return {std::max(s.start, to.start), std::min(s.end, to.end)}; }

}  // namespace

IndicatorMatrix build_matrix(const ViewContext& ctx, MatrixKind kind, MatrixLevel level,
                             std::span<const std::string> characters,
                             std::optional<std::size_t> focus_chapter) {
  if (kind == MatrixKind::action_change && level == MatrixLevel::sentence)
    throw Error(ErrorCode::UnsupportedCombination, "action_change is only defined at chapter level");

  IndicatorMatrix m;
  m.kind = kind;
  m.level = level;

  Axis axis{level, {}, {}};
  if (level == MatrixLevel::chapter) {
    for (const auto& ch : ctx.doc.chapters()) axis.columns.push_back(ch.index);
  } else {
    if (!focus_chapter)
      throw Error(ErrorCode::InvalidArgument, "sentence level requires a focus chapter");
    if (*focus_chapter >= ctx.doc.chapters().size())
      throw Error(ErrorCode::InvalidArgument, "unknown chapter " + std::to_string(*focus_chapter));
    m.focus_chapter = focus_chapter;
    for (const auto& s : ctx.layer.sentences)
      if (s.chapter == *focus_chapter) axis.columns.push_back(s.index);
  }
  for (std::size_t i = 0; i < axis.columns.size(); ++i) axis.position.emplace(axis.columns[i], i);
  m.columns = axis.columns;

  std::vector<const Character*> rows;
  if (characters.empty()) {
    for (const auto& c : ctx.registry.characters()) rows.push_back(&c);
  } else {
    for (const auto& id : characters) rows.push_back(&require_character(ctx, id));
  }

  auto unit_of = [&](std::size_t offset) -> std::optional<std::size_t> {
    return level == MatrixLevel::chapter ? ctx.doc.chapter_of(offset) : ctx.layer.sentence_at(offset);
  };

  for (const Character* c : rows) {
    m.rows.push_back(c->id);
    m.row_names.push_back(c->display_name);
    std::vector<std::optional<MatrixCell>> row(axis.columns.size());

    // Sentences mentioning this character, used by sentiment and emotion.
    auto mentioned_sentences = [&]() {
      std::vector<std::size_t> out;
      for (const auto& span : c->mentions)
        if (auto s = ctx.layer.sentence_at(span.start); s && (out.empty() || out.back() != *s))
          out.push_back(*s);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };

    switch (kind) {
      case MatrixKind::presence: {
        std::vector<std::vector<Span>> spans(axis.columns.size());
        std::vector<std::vector<std::size_t>> sentences(axis.columns.size());
        for (const auto& span : c->mentions) {
          auto unit = unit_of(span.start);
          if (!unit) continue;
          auto col = axis.column_of_unit(*unit);
          if (!col) continue;
          spans[*col].push_back(span);
          if (auto s = ctx.layer.sentence_at(span.start)) sentences[*col].push_back(*s);
        }
        for (std::size_t col = 0; col < spans.size(); ++col) {
          if (spans[col].empty()) continue;
          MatrixCell cell;
          if (ctx.config.presence_unit == PresenceUnit::mentions) {
            cell.value = static_cast<double>(spans[col].size());
          } else {
            auto& s = sentences[col];
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (s.empty()) continue;
            cell.value = static_cast<double>(s.size());
          }
          cell.evidence = std::move(spans[col]);
          row[col] = std::move(cell);
        }
        break;
      }
      case MatrixKind::speech: {
        for (const auto& q : ctx.results.quotes) {
          if (q.speaker != c->id) continue;
          if (level == MatrixLevel::chapter) {
            auto col = axis.column_of_unit(q.chapter);
            if (!col) continue;
            auto& cell = row[*col];
            if (!cell) cell = MatrixCell{};
            cell->value += 1.0;
            cell->evidence.push_back(q.span);
          } else {
            for (std::size_t s : q.sentences) {
              auto col = axis.column_of_unit(s);
              if (!col) continue;
              const Span piece = clip(q.span, ctx.layer.sentences[s].span);
              if (piece.start >= piece.end) continue;
              auto& cell = row[*col];
              if (!cell) cell = MatrixCell{};
              cell->value += 1.0;
              cell->evidence.push_back(piece);
            }
          }
        }
        break;
      }
      case MatrixKind::sentiment: {
        const auto& series = ctx.config.smooth ? ctx.results.smoothed_sentiment : std::vector<double>{};
        std::vector<double> sums(axis.columns.size(), 0.0);
        for (std::size_t s : mentioned_sentences()) {
          const std::size_t unit = level == MatrixLevel::chapter ? ctx.layer.sentences[s].chapter : s;
          auto col = axis.column_of_unit(unit);
          if (!col) continue;
          const double v = ctx.config.smooth ? series[s] : ctx.results.sentiment[s].value;
          auto& cell = row[*col];
          if (!cell) cell = MatrixCell{};
          sums[*col] += v;
          cell->evidence.push_back(ctx.layer.sentences[s].span);
        }
        for (std::size_t col = 0; col < row.size(); ++col) {
          if (!row[col]) continue;
          row[col]->value = sums[col] / static_cast<double>(row[col]->evidence.size());
          row[col]->normalized = std::clamp((row[col]->value + 1.0) / 2.0, 0.0, 1.0);
        }
        break;
      }
      case MatrixKind::emotion: {
        std::vector<std::array<std::vector<std::size_t>, kEmotionOrder.size()>> by_label(axis.columns.size());
        for (std::size_t s : mentioned_sentences()) {
          const auto& label = ctx.results.emotions[s].label;
          if (!label) continue;
          const std::size_t unit = level == MatrixLevel::chapter ? ctx.layer.sentences[s].chapter : s;
          auto col = axis.column_of_unit(unit);
          if (!col) continue;
          by_label[*col][static_cast<std::size_t>(*label)].push_back(s);
        }
        for (std::size_t col = 0; col < row.size(); ++col) {
          std::size_t total = 0, best = 0, best_i = 0;
          for (std::size_t i = 0; i < kEmotionOrder.size(); ++i) {
            total += by_label[col][i].size();
            if (by_label[col][i].size() > best) {
              best = by_label[col][i].size();
              best_i = i;
            }
          }
          if (best == 0) continue;
          MatrixCell cell;
          cell.category = kEmotionOrder[best_i];
          cell.value = static_cast<double>(best) / static_cast<double>(total);
          cell.normalized = cell.value;
          for (std::size_t s : by_label[col][best_i]) cell.evidence.push_back(ctx.layer.sentences[s].span);
          row[col] = std::move(cell);
        }
        break;
      }
      case MatrixKind::action_change: {
        for (const auto& ac : ctx.results.action_changes) {
          if (ac.character != c->id || !ac.covered) continue;
          auto col = axis.column_of_unit(ac.chapter);
          if (!col) continue;
          MatrixCell cell;
          cell.value = *ac.value;
          cell.normalized = std::clamp(*ac.value, 0.0, 1.0);
          for (const auto& a : ctx.results.actions)
            if (a.character == c->id && a.chapter == ac.chapter) cell.evidence.push_back(a.verb_span);
          if (cell.evidence.empty()) continue;
          if (ctx.embeddings != nullptr) {
            const auto prev = chapter_actions(ctx.results, c->id, ac.chapter - 1);
            const auto cur = chapter_actions(ctx.results, c->id, ac.chapter);
            cell.pairs = rank_dissimilar_pairs(prev, cur, *ctx.embeddings, ctx.config.popup_pairs);
          }
          row[*col] = std::move(cell);
        }
        break;
      }
    }
    for (auto& cell : row)
      if (cell) std::sort(cell->evidence.begin(), cell->evidence.end());
    m.cells.push_back(std::move(row));
  }

  if (kind == MatrixKind::presence || kind == MatrixKind::speech) {
    double max = 0.0;
    for (const auto& row : m.cells)
      for (const auto& cell : row)
        if (cell) max = std::max(max, cell->value);
    for (auto& row : m.cells)
      for (auto& cell : row)
        if (cell) cell->normalized = max > 0.0 ? cell->value / max : 0.0;
  }
  (void)unit_span;
  return m;
}

std::vector<std::string> cooccurrence(const ViewContext& ctx, const std::string& character,
                                      std::size_t chapter) {
  require_character(ctx, character);
  if (chapter >= ctx.doc.chapters().size())
    throw Error(ErrorCode::InvalidArgument, "unknown chapter " + std::to_string(chapter));
  const Span ch = ctx.doc.chapters()[chapter].span;
  std::vector<std::string> out;
  for (const auto& c : ctx.registry.characters()) {
    if (c.id == character) continue;
    const bool present = std::any_of(c.mentions.begin(), c.mentions.end(),
                                     [&](const Span& s) { return ch.contains(s.start); });
    if (present) out.push_back(c.id);
  }
  return out;
}

WordZone build_wordzone(const ViewContext& ctx, const std::string& character, WordZoneKind kind) {
  require_character(ctx, character);
  WordZone zone;
  zone.character = character;
  zone.kind = kind;

  std::map<std::string, std::vector<Span>> records;
  if (kind == WordZoneKind::actions) {
    for (const auto& a : ctx.results.actions)
      if (a.character == character) records[a.verb_lemma].push_back(a.verb_span);
  } else {
    for (const auto& d : ctx.results.definitions)
      if (d.character == character) records[d.adjective_lemma].push_back(d.adjective_span);
  }
  if (records.empty())
    throw Error(ErrorCode::NoRecords, "character '" + character + "' has no " +
                                          std::string(wordzone_kind_name(kind)) + " records");

  std::map<std::string, std::size_t> story;
  for (const auto& t : ctx.layer.tokens) {
    const std::string lemma = to_lower_ascii(t.lemma.empty() ? t.surface : t.lemma);
    if (records.count(lemma)) ++story[lemma];
  }

  for (auto& [word, spans] : records) {
    WordZoneEntry e;
    e.word = word;
    e.tf = spans.size();
    e.df = std::max(story[word], e.tf);
    e.weight = word_weight(e.tf, e.df);
    e.evidence = std::move(spans);
    zone.entries.push_back(std::move(e));
  }
  std::sort(zone.entries.begin(), zone.entries.end(), [](const WordZoneEntry& a, const WordZoneEntry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.word < b.word;
  });
  std::vector<std::string> words;
  for (std::size_t i = 0; i < zone.entries.size(); ++i) {
    zone.entries[i].rank = i + 1;
    words.push_back(zone.entries[i].word);
  }
  if (ctx.embeddings != nullptr && !ctx.embeddings->empty()) {
    const auto ids = cluster_words(words, *ctx.embeddings, ctx.config.clustering);
    for (std::size_t i = 0; i < ids.size(); ++i) zone.entries[i].cluster = ids[i];
  }
  return zone;
}

// ---------------------------------------------------------------------------
// Context layout

ContextLayout layout_contexts(std::span<const ContextLabel> labels, std::size_t max_rows,
                              std::size_t chapter_count) {
  if (max_rows == 0) throw Error(ErrorCode::InvalidArgument, "max_rows must be at least 1");
  ContextLayout layout;
  layout.max_rows = max_rows;

  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(labels[a].chapter, -labels[a].priority) <
           std::make_tuple(labels[b].chapter, -labels[b].priority);
  });
  for (std::size_t i : order) layout.labels.push_back({labels[i], std::nullopt});

  // DP over labels in anchor order. A state is the right edge of the last
  // label on each row; edges at or left of the current anchor are free for
  // every later label and collapse to kFree.
  constexpr double kFree = -1.0;
  constexpr std::size_t kBeam = 200000;
  struct Node {
    std::vector<double> ends;
    std::size_t placed = 0;
    std::size_t row_sum = 0;
    std::size_t parent = 0;
    int choice = -1;  // row, or -1 for dropped
  };
  auto better = [](const Node& a, const Node& b) {
    return a.placed != b.placed ? a.placed > b.placed : a.row_sum < b.row_sum;
  };

  std::vector<std::vector<Node>> stages;
  stages.push_back({Node{std::vector<double>(max_rows, kFree), 0, 0, 0, -1}});
  for (const PlacedLabel& pl : layout.labels) {
    const ContextLabel& label = pl.label;
    const double anchor = static_cast<double>(label.chapter);
    const double right = anchor + std::max(label.width, 1e-9);
    const bool placeable = label.chapter < chapter_count;

    std::map<std::vector<double>, std::size_t> seen;
    std::vector<Node> next;
    auto offer = [&](Node n) {
      auto [it, fresh] = seen.emplace(n.ends, next.size());
      if (fresh) {
        next.push_back(std::move(n));
      } else if (better(n, next[it->second])) {
        next[it->second] = std::move(n);
      }
    };
    const auto& current = stages.back();
    for (std::size_t p = 0; p < current.size(); ++p) {
      std::vector<double> ends = current[p].ends;
      for (double& e : ends)
        if (e <= anchor) e = kFree;
      offer(Node{ends, current[p].placed, current[p].row_sum, p, -1});
      if (!placeable) continue;
      for (std::size_t r = 0; r < max_rows; ++r) {
        if (ends[r] != kFree) continue;
        std::vector<double> placed = ends;
        placed[r] = right;
        offer(Node{std::move(placed), current[p].placed + 1, current[p].row_sum + r, p, static_cast<int>(r)});
      }
    }
    if (next.size() > kBeam) {
      // Beam cut for very large inputs; exact below the cap.
      std::stable_sort(next.begin(), next.end(), better);
      next.resize(kBeam);
    }
    stages.push_back(std::move(next));
  }

  const auto& last = stages.back();
  std::size_t best = 0;
  for (std::size_t i = 1; i < last.size(); ++i)
    if (better(last[i], last[best])) best = i;
  for (std::size_t stage = stages.size() - 1, node = best; stage > 0; --stage) {
    const Node& n = stages[stage][node];
    if (n.choice >= 0) layout.labels[stage - 1].row = static_cast<std::size_t>(n.choice);
    node = n.parent;
  }
  return layout;
}

std::vector<ContextLabel> context_labels(const ViewContext& ctx, double chars_per_column) {
  if (chars_per_column <= 0.0) chars_per_column = 12.0;
  auto width_of = [&](const std::string& text) {
    return std::max(1e-3, static_cast<double>(utf8_to_u32(text).size()) / chars_per_column);
  };
  std::vector<ContextLabel> out;
  static const std::regex numeral(R"(^([IVXLCDM]+|\d+)\.?$)");
  for (const auto& ch : ctx.doc.chapters()) {
    if (!ch.title || std::regex_match(*ch.title, numeral)) continue;
    out.push_back({*ch.title, ch.index, width_of(*ch.title), 1});
  }
  for (const auto& tag : ctx.registry.context_tags()) {
    std::map<std::size_t, int> per_chapter;
    for (const auto& m : tag.mentions)
      if (auto ch = ctx.doc.chapter_of(m.start)) ++per_chapter[*ch];
    for (const auto& [ch, count] : per_chapter) out.push_back({tag.name, ch, width_of(tag.name), count});
  }
  return out;
}

}  // namespace traitlens
