#include "traitlens/analysis.hpp"

namespace traitlens {

std::vector<std::string> chapter_actions(const AnalysisResults& results, const std::string& character,
                                         std::size_t chapter) {
  std::vector<std::string> out;
  for (const auto& a : results.actions)
    if (a.character == character && a.chapter == chapter) out.push_back(a.verb_lemma);
  return out;
}

AnalysisResults run_pipeline(const Document& doc, const AnnotationLayer& layer,
                             const CharacterRegistry& registry, const AnalysisResources& resources,
                             const AnalysisOptions& options) {
  AnalysisResults r;
  r.quotes = attribute_speakers(extract_quotes(doc, layer), layer, registry);
  r.actions = extract_actions(layer, registry);
  r.definitions = extract_definitions(layer, registry);

  const SentimentLexicon* slex = resources.sentiment ? &*resources.sentiment : nullptr;
  const EmotionLexicon* elex = resources.emotion ? &*resources.emotion : nullptr;
  r.sentiment.reserve(layer.sentences.size());
  r.emotions.reserve(layer.sentences.size());
  std::vector<double> series;
  series.reserve(layer.sentences.size());
  for (const auto& s : layer.sentences) {
    r.sentiment.push_back(score_sentiment(s.index, layer, slex));
    r.emotions.push_back(label_emotion(s.index, layer, elex));
    series.push_back(r.sentiment.back().value);
  }
  r.window = choose_window(doc, options.window);
  r.smoothed_sentiment = smooth_sentiment(series, {r.window});

  {
    // Without a table every cell is uncovered.
    const EmbeddingTable no_table;
    const EmbeddingTable& table = resources.embeddings ? *resources.embeddings : no_table;
    const std::size_t chapters = doc.chapters().size();
    for (const auto& c : registry.characters()) {
      std::vector<std::vector<std::string>> per_chapter(chapters);
      for (const auto& a : r.actions)
        if (a.character == c.id) per_chapter[a.chapter].push_back(a.verb_lemma);
      for (std::size_t ch = 1; ch < chapters; ++ch) {
        ActionChangeCell cell = action_change(per_chapter[ch - 1], per_chapter[ch], table);
        cell.character = c.id;
        cell.chapter = ch;
        r.action_changes.push_back(std::move(cell));
      }
    }
  }
  return r;
}

}  // namespace traitlens
