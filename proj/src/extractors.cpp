#include "traitlens/extractors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>
#include <tuple>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

std::string_view method_name(SpeakerMethod m) {
  switch (m) {
    case SpeakerMethod::self_reference: return "self_reference";
    case SpeakerMethod::verb_subject: return "verb_subject";
    case SpeakerMethod::unresolved: return "unresolved";
  }
  return "";
}

std::string_view source_name(ActionSource s) {
  return s == ActionSource::proposition ? "proposition" : "dependency_fallback";
}

std::string_view path_name(DefinitionPath p) {
  switch (p) {
    case DefinitionPath::copular: return "copular";
    case DefinitionPath::modifier: return "modifier";
    case DefinitionPath::ascend_to_verb: return "ascend_to_verb";
  }
  return "";
}

std::string_view source_name(ScoreSource s) {
  return s == ScoreSource::lexicon ? "lexicon" : "external";
}

double normalize_lexicon_sum(double sum, double alpha) {
  if (sum == 0.0) return 0.0;
  return sum / std::sqrt(sum * sum + alpha);
}

// ---------------------------------------------------------------------------
// Presence

std::vector<PresenceRow> presence(const Document& doc, const AnnotationLayer& /*layer*/,
                                  const CharacterRegistry& registry) {
  std::vector<PresenceRow> rows;
  for (const auto& c : registry.characters()) {
    PresenceRow row{c.id, std::vector<std::size_t>(doc.chapters().size(), 0)};
    for (const auto& m : c.mentions)
      if (auto ch = doc.chapter_of(m.start)) ++row.counts[*ch];
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Quotes

namespace {

bool opens(char32_t c) { return c == U'"' || c == U'“'; }
bool closes(char32_t c) { return c == U'"' || c == U'”'; }

std::vector<std::size_t> sentences_overlapping(const AnnotationLayer& layer, const Span& span) {
  std::vector<std::size_t> out;
  auto it = std::lower_bound(layer.sentences.begin(), layer.sentences.end(), span.start,
                             [](const SentenceAnn& s, std::size_t off) { return s.span.end <= off; });
  for (; it != layer.sentences.end() && it->span.start < span.end; ++it) out.push_back(it->index);
  return out;
}

bool is_self_reference(std::string_view surface) {
  if (surface == "I") return true;
  const std::string lower = to_lower_ascii(surface);
  return lower == "me" || lower == "my" || lower == "mine" || lower == "myself";
}

}  // namespace

std::vector<Quote> extract_quotes(const Document& doc, const AnnotationLayer& layer) {
  std::vector<Quote> quotes;
  const auto& text = doc.text();
  for (const auto& chapter : doc.chapters()) {
    auto emit = [&](std::size_t start, std::size_t end, bool ill_formed) {
      while (end > start && is_space(text[end - 1])) --end;
      if (end <= start) return;
      Quote q;
      q.span = {start, end};
      q.chapter = chapter.index;
      q.ill_formed = ill_formed;
      q.sentences = sentences_overlapping(layer, q.span);
      quotes.push_back(std::move(q));
    };
    bool open = false;
    std::size_t qstart = 0;
    for (std::size_t pos = chapter.span.start; pos < chapter.span.end; ++pos) {
      const char32_t c = text[pos];
      if (!open) {
        if (opens(c)) {
          open = true;
          qstart = pos + 1;
        }
      } else if (closes(c)) {
        emit(qstart, pos, false);
        open = false;
      } else if (c == U'“') {
        // Unclosed quote followed by a fresh opening mark.
        emit(qstart, pos, true);
        qstart = pos + 1;
      }
    }
    if (open) emit(qstart, chapter.span.end, true);
  }
  return quotes;
}

Quote attribute_speaker(Quote quote, const AnnotationLayer& layer, const CharacterRegistry& registry,
                        std::span<const Quote> other_quotes) {
  quote.speaker.reset();
  quote.evidence.reset();
  quote.method = SpeakerMethod::unresolved;

  // Step 1: first-person forms inside the quote that sit in a character's mention.
  auto [in_begin, in_end] = layer.tokens_within(quote.span);
  for (std::size_t t = in_begin; t < in_end; ++t) {
    const Token& tok = layer.tokens[t];
    if (!is_self_reference(tok.surface)) continue;
    if (auto who = registry.resolve(tok.span, &layer)) {
      quote.speaker = *who;
      quote.method = SpeakerMethod::self_reference;
      quote.evidence = tok.span;
      return quote;
    }
  }

  // Step 2: nearest verb outside the quote within the enclosing sentence(s).
  const Span window_span{quote.span.start > 0 ? quote.span.start - 1 : 0, quote.span.end + 1};
  const auto window = sentences_overlapping(layer, window_span);
  if (window.empty()) return quote;
  const std::size_t lo = layer.sentences[window.front()].token_begin;
  const std::size_t hi = layer.sentences[window.back()].token_end;
  if (lo >= hi) return quote;

  std::size_t first_inside = lo;
  while (first_inside < hi && layer.tokens[first_inside].span.end <= quote.span.start) ++first_inside;
  std::size_t after_inside = first_inside;
  while (after_inside < hi && layer.tokens[after_inside].span.start < quote.span.end) ++after_inside;

  auto usable = [&](std::size_t t) {
    const Token& tok = layer.tokens[t];
    if (tok.pos != "VERB") return false;
    // other_quotes are disjoint and sorted by start.
    auto it = std::lower_bound(other_quotes.begin(), other_quotes.end(), tok.span.end,
                               [](const Quote& q, std::size_t off) { return q.span.start < off; });
    return it == other_quotes.begin() || !std::prev(it)->span.overlaps(tok.span);
  };

  std::optional<std::size_t> verb;
  const std::size_t max_distance = hi - lo;
  for (std::size_t d = 1; d <= max_distance && !verb; ++d) {
    // Following verb wins ties.
    const std::size_t after = after_inside + d - 1;
    if (after < hi && usable(after)) {
      verb = after;
    } else if (first_inside >= lo + d && usable(first_inside - d)) {
      verb = first_inside - d;
    }
  }
  if (!verb) return quote;
  auto subject = layer.nominal_subject(*verb, /*include_passive=*/false);
  if (!subject) return quote;
  if (auto who = registry.resolve(layer.tokens[*subject].span, &layer)) {
    quote.speaker = *who;
    quote.method = SpeakerMethod::verb_subject;
    quote.evidence = layer.tokens[*subject].span;
  }
  return quote;
}

std::vector<Quote> attribute_speakers(std::vector<Quote> quotes, const AnnotationLayer& layer,
                                      const CharacterRegistry& registry) {
  std::vector<Quote> out;
  out.reserve(quotes.size());
  for (const auto& q : quotes) out.push_back(attribute_speaker(q, layer, registry, quotes));
  return out;
}

// ---------------------------------------------------------------------------
// Actions

std::vector<ActionRecord> extract_actions(const AnnotationLayer& layer,
                                          const CharacterRegistry& registry) {
  std::vector<ActionRecord> out;
  std::vector<bool> has_props(layer.sentences.size(), false);
  for (const auto& p : layer.propositions) has_props[p.sentence] = true;

  for (const auto& p : layer.propositions) {
    const PropositionArg* agent = p.find("ARG0");
    const PropositionArg* verb = p.find("V");
    if (agent == nullptr || verb == nullptr) continue;
    auto [a, b] = layer.tokens_within(verb->span);
    std::optional<std::size_t> verb_token;
    for (std::size_t t = a; t < b; ++t)
      if (layer.tokens[t].pos == "VERB") {
        verb_token = t;
        break;
      }
    if (!verb_token) continue;
    auto who = registry.resolve(agent->span, &layer);
    if (!who) continue;
    const Token& tok = layer.tokens[*verb_token];
    out.push_back({*who, to_lower_ascii(tok.lemma), tok.span, p.sentence,
                   layer.sentences[p.sentence].chapter, ActionSource::proposition});
  }

  for (const auto& s : layer.sentences) {
    if (has_props[s.index]) continue;
    for (std::size_t t = s.token_begin; t < s.token_end; ++t) {
      const Token& tok = layer.tokens[t];
      if (tok.pos != "VERB" || tok.deprel == "cop" || tok.deprel.rfind("aux", 0) == 0) continue;
      auto subject = layer.nominal_subject(t, /*include_passive=*/false);
      // A conjoined verb without its own subject shares the first conjunct's.
      for (std::size_t v = t; !subject && layer.tokens[v].deprel == "conj";) {
        const std::size_t h = layer.head_of(v);
        if (h == v || layer.tokens[h].pos != "VERB") break;
        subject = layer.nominal_subject(h, /*include_passive=*/false);
        v = h;
      }
      if (!subject) continue;
      auto who = registry.resolve(layer.tokens[*subject].span, &layer);
      if (!who) continue;
      out.push_back({*who, to_lower_ascii(tok.lemma), tok.span, s.index, s.chapter,
                     ActionSource::dependency_fallback});
    }
  }
  std::sort(out.begin(), out.end(), [](const ActionRecord& x, const ActionRecord& y) {
    return std::tie(x.chapter, x.sentence, x.verb_span, x.character) <
           std::tie(y.chapter, y.sentence, y.verb_span, y.character);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Direct definitions

std::vector<DefinitionRecord> extract_definitions(const AnnotationLayer& layer,
                                                  const CharacterRegistry& registry) {
  std::vector<DefinitionRecord> out;
  auto is_nominal = [](const std::string& pos) {
    return pos == "NOUN" || pos == "PRON" || pos == "PROPN";
  };

  for (std::size_t t = 0; t < layer.tokens.size(); ++t) {
    const Token& adj = layer.tokens[t];
    if (adj.pos != "ADJ") continue;
    const SentenceAnn& sentence = layer.sentences[adj.sentence];

    // A conjoined adjective without a subject of its own ("tall and proud")
    // shares the subject of the first conjunct.
    std::size_t anchor = t;
    for (std::size_t guard = 0; guard < sentence.token_count(); ++guard) {
      const Token& cur = layer.tokens[anchor];
      if (layer.nominal_subject(anchor)) break;
      const std::size_t h = layer.head_of(anchor);
      if (cur.deprel != "conj" || h == anchor || layer.tokens[h].pos != "ADJ") break;
      anchor = h;
    }

    std::optional<std::size_t> subject;
    DefinitionPath path = DefinitionPath::copular;
    if (auto s = layer.nominal_subject(anchor)) {
      subject = s;
    } else if (const std::size_t h = layer.head_of(anchor);
               h != anchor && is_nominal(layer.tokens[h].pos)) {
      subject = h;
      path = DefinitionPath::modifier;
    } else {
      std::size_t cur = anchor;
      for (std::size_t steps = 0; steps < sentence.token_count(); ++steps) {
        const std::size_t h = layer.head_of(cur);
        if (h == cur) break;
        cur = h;
        if (layer.tokens[cur].pos == "VERB") {
          subject = layer.nominal_subject(cur);
          path = DefinitionPath::ascend_to_verb;
          break;
        }
      }
    }
    if (!subject) continue;
    auto who = registry.resolve(layer.tokens[*subject].span, &layer);
    if (!who) continue;
    out.push_back({*who, to_lower_ascii(adj.lemma), adj.span, path, adj.sentence, sentence.chapter});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sentiment and emotion

namespace {

std::string_view match_key(const Token& tok) { return tok.lemma.empty() ? tok.surface : tok.lemma; }

}  // namespace

SentimentScore score_sentiment(std::size_t sentence, const AnnotationLayer& layer,
                               const SentimentLexicon* lexicon) {
  if (sentence >= layer.sentences.size())
    throw Error(ErrorCode::InvalidArgument, "unknown sentence " + std::to_string(sentence));
  SentimentScore out;
  out.sentence = sentence;
  if (const SentenceScore* ext = layer.score_for(sentence); ext && ext->sentiment) {
    out.value = *ext->sentiment;
    out.source = ScoreSource::external;
    return out;
  }
  if (lexicon == nullptr)
    throw Error(ErrorCode::LexiconMissing,
                "no sentiment lexicon and no external score for sentence " + std::to_string(sentence));
  out.source = ScoreSource::lexicon;
  double sum = 0.0;
  const auto& s = layer.sentences[sentence];
  for (std::size_t t = s.token_begin; t < s.token_end; ++t) {
    const Token& tok = layer.tokens[t];
    if (tok.pos == "PUNCT") continue;
    if (auto v = lexicon->lookup(match_key(tok))) {
      out.contributions.push_back({tok.span, *v});
      sum += *v;
    }
  }
  out.value = normalize_lexicon_sum(sum);
  return out;
}

EmotionLabel label_emotion(std::size_t sentence, const AnnotationLayer& layer,
                           const EmotionLexicon* lexicon) {
  if (sentence >= layer.sentences.size())
    throw Error(ErrorCode::InvalidArgument, "unknown sentence " + std::to_string(sentence));
  EmotionLabel out;
  out.sentence = sentence;
  if (const SentenceScore* ext = layer.score_for(sentence); ext && ext->emotion) {
    out.label = ext->emotion;
    out.source = ScoreSource::external;
    return out;
  }
  out.source = ScoreSource::lexicon;
  if (lexicon == nullptr) return out;
  std::array<std::size_t, kEmotionOrder.size()> hits{};
  const auto& s = layer.sentences[sentence];
  for (std::size_t t = s.token_begin; t < s.token_end; ++t) {
    if (auto e = lexicon->lookup(match_key(layer.tokens[t]))) ++hits[static_cast<std::size_t>(*e)];
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (hits[i] > best) {
      best = hits[i];
      out.label = kEmotionOrder[i];
    }
  return out;
}

}  // namespace traitlens
