// Synthetic inputs shared by unit and acceptance tests.
#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mini.hpp"
#include "traitlens/annotations.hpp"
#include "traitlens/registry.hpp"

namespace generators {

// Clusters over a synthetic offset space; spans may repeat across clusters.
inline traitlens::AnnotationLayer random_layer(std::mt19937_64& rng, std::size_t clusters) {
  traitlens::AnnotationLayer layer;
  std::uniform_int_distribution<std::size_t> count(1, 6), start(0, 60), len(1, 4);
  for (std::size_t c = 0; c < clusters; ++c) {
    traitlens::CorefCluster cl;
    cl.id = "c" + std::to_string(c);
    cl.source_chapter = c % 3;
    std::set<traitlens::Span> spans;
    const std::size_t n = count(rng);
    while (spans.size() < n) {
      const std::size_t s = start(rng);
      spans.insert({s, s + len(rng)});
    }
    cl.mentions.assign(spans.begin(), spans.end());
    layer.clusters.push_back(std::move(cl));
  }
  return layer;
}

inline std::size_t distinct_spans(const traitlens::AnnotationLayer& layer) {
  std::set<traitlens::Span> all;
  for (const auto& c : layer.clusters) all.insert(c.mentions.begin(), c.mentions.end());
  return all.size();
}

inline std::size_t owned(const traitlens::CharacterRegistry& r) {
  std::size_t n = 0;
  for (const auto& c : r.characters()) n += c.mentions.size();
  return n;
}

inline traitlens::CharacterRegistry all_characters(const traitlens::AnnotationLayer& layer) {
  traitlens::CharacterRegistry r(layer);
  for (const auto& c : layer.clusters) r.set_label(c.id, traitlens::ClusterLabel::character);
  return r;
}

// "John laughs at me, of course, but one expects that in marriage." with its
// two propositions; "John" and "me" are clusters.
inline mini::Built marriage_example(bool with_propositions = true) {
  using nlohmann::json;
  mini::Built b = mini::build({{"John laughs at me, of course, but one expects that in marriage.",
                                {{"John", "John", "PROPN", 2, "nsubj"},
                                 {"laughs", "laugh", "VERB", 0, "root"},
                                 {"at", "at", "ADP", 4, "case"},
                                 {"me", "I", "PRON", 2, "obl"},
                                 {",", ",", "PUNCT", 6, "punct"},
                                 {"of", "of", "ADV", 2, "advmod"},
                                 {"course", "course", "NOUN", 6, "fixed"},
                                 {",", ",", "PUNCT", 11, "punct"},
                                 {"but", "but", "CCONJ", 11, "cc"},
                                 {"one", "one", "PRON", 11, "nsubj"},
                                 {"expects", "expect", "VERB", 2, "conj"},
                                 {"that", "that", "PRON", 11, "obj"},
                                 {"in", "in", "ADP", 14, "case"},
                                 {"marriage", "marriage", "NOUN", 11, "obl"},
                                 {".", ".", "PUNCT", 2, "punct"}}}});
  b.payload["clusters"] = json::array(
      {{{"id", "john"}, {"mentions", json::array({b.span_json(0, 1, 1)})}, {"source_chapter", 0}, {"hint", "John"}},
       {{"id", "narrator"}, {"mentions", json::array({b.span_json(0, 4, 4)})}, {"source_chapter", 0}, {"hint", nullptr}}});
  auto arg = [&](const char* role, std::size_t first, std::size_t last) {
    const auto s = b.span(0, first, last);
    return json{{"role", role}, {"start", s.start}, {"end", s.end}};
  };
  if (with_propositions)
    b.payload["propositions"] = json::array(
        {{{"sentence", 0}, {"args", json::array({arg("ARG0", 1, 1), arg("V", 2, 2), arg("ARG1", 3, 4)})}},
         {{"sentence", 0},
          {"args", json::array({arg("ARG0", 10, 10), arg("V", 11, 11), arg("ARG1", 12, 12), arg("ARGM-LOC", 13, 14)})}}});
  return b;
}

struct Novel {
  std::string text;
  std::string annotations;  // interchange JSON
  std::string embeddings;   // embedding file text
  std::size_t words = 0;
};

// A long multi-chapter story with parses, coreference, propositions and quotes.
inline Novel synthetic_novel(std::size_t target_words, std::size_t chapters = 24, std::uint64_t seed = 1) {
  using nlohmann::json;
  static const std::vector<std::string> names{"Anne", "Frederick", "Mary", "Charles", "Louisa", "Henrietta",
                                              "Walter", "Elizabeth", "William", "Harville", "Benwick", "Russell"};
  static const std::vector<std::pair<std::string, std::string>> verbs{
      {"walked", "walk"}, {"ran", "run"},         {"turned", "turn"},     {"looked", "look"},
      {"went", "go"},     {"hurried", "hurry"},   {"returned", "return"}, {"wandered", "wander"},
      {"came", "come"},   {"stepped", "step"},    {"rode", "ride"},       {"sailed", "sail"}};
  static const std::vector<std::string> places{"harbour", "garden", "house", "shop", "shore", "church", "road", "inn"};
  static const std::vector<std::string> adjectives{"happy", "sad", "angry", "afraid", "proud", "calm",
                                                   "tired", "cheerful", "anxious", "gentle", "bitter", "hopeful"};
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  Novel out;
  json tokens = json::array(), sentences = json::array(), props = json::array();
  std::vector<json> mentions(names.size(), json::array());
  std::vector<long> first_chapter(names.size(), -1);
  const std::size_t per_chapter = target_words / chapters;
  std::size_t sentence = 0;

  for (std::size_t ch = 0; ch < chapters; ++ch) {
    out.text += "CHAPTER " + std::to_string(ch + 1) + "\n\n";
    std::size_t words_here = 0;
    std::size_t in_paragraph = 0;
    while (words_here < per_chapter) {
      if (in_paragraph == 6) {
        out.text += "\n\n";
        in_paragraph = 0;
      } else if (in_paragraph > 0) {
        out.text += ' ';
      }
      ++in_paragraph;
      const std::size_t who = pick(names.size());
      const std::size_t base = out.text.size();
      std::string s;
      // form, lemma, pos, head (1-based, 0 root), deprel
      std::vector<std::tuple<std::string, std::string, std::string, int, std::string>> toks;
      int name_index = 0, verb_index = 0, arg_first = 0, arg_last = 0;
      if (sentence % 4 == 3) {
        const std::string adj = adjectives[pick(adjectives.size())];
        s = "\"I am " + adj + ",\" " + names[who] + " said.";
        toks = {{"\"", "\"", "PUNCT", 4, "punct"},  {"I", "I", "PRON", 4, "nsubj"},
                {"am", "be", "AUX", 4, "cop"},      {adj, adj, "ADJ", 8, "ccomp"},
                {",", ",", "PUNCT", 4, "punct"},    {"\"", "\"", "PUNCT", 4, "punct"},
                {names[who], names[who], "PROPN", 8, "nsubj"}, {"said", "say", "VERB", 0, "root"},
                {".", ".", "PUNCT", 8, "punct"}};
        name_index = 7;
      } else {
        const auto& [verb, lemma] = verbs[pick(verbs.size())];
        const std::string place = places[pick(places.size())];
        const std::string adj = adjectives[pick(adjectives.size())];
        s = names[who] + " " + verb + " to the " + place + " and was " + adj + ".";
        toks = {{names[who], names[who], "PROPN", 2, "nsubj"}, {verb, lemma, "VERB", 0, "root"},
                {"to", "to", "ADP", 5, "case"},               {"the", "the", "DET", 5, "det"},
                {place, place, "NOUN", 2, "obl"},             {"and", "and", "CCONJ", 8, "cc"},
                {"was", "be", "AUX", 8, "cop"},               {adj, adj, "ADJ", 2, "conj"},
                {".", ".", "PUNCT", 2, "punct"}};
        name_index = 1;
        verb_index = 2;
        arg_first = 3;
        arg_last = 5;
      }
      out.text += s;
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      std::size_t cursor = 0;
      const std::size_t first_token = tokens.size();
      for (const auto& [form, lemma, pos, head, rel] : toks) {
        const std::size_t at = s.find(form, cursor);
        cursor = at + form.size();
        spans.emplace_back(base + at, base + cursor);
        tokens.push_back({{"start", base + at}, {"end", base + cursor}, {"surface", form}, {"lemma", lemma},
                          {"pos", pos}, {"head", head == 0 ? tokens.size() - first_token : std::size_t(head - 1)},
                          {"deprel", rel}, {"sentence", sentence}});
      }
      sentences.push_back({{"start", base}, {"end", base + s.size()}, {"chapter", ch}});
      mentions[who].push_back(json::array({spans[name_index - 1].first, spans[name_index - 1].second}));
      if (first_chapter[who] < 0) first_chapter[who] = static_cast<long>(ch);
      if (verb_index) {
        auto span_of = [&](const char* role, int a, int b) {
          return json{{"role", role}, {"start", spans[a - 1].first}, {"end", spans[b - 1].second}};
        };
        props.push_back({{"sentence", sentence},
                         {"args", json::array({span_of("ARG0", name_index, name_index), span_of("V", verb_index, verb_index),
                                               span_of("ARGM-DIR", arg_first, arg_last)})}});
      }
      words_here += static_cast<std::size_t>(std::count(s.begin(), s.end(), ' ')) + 1;
      ++sentence;
    }
    out.words += words_here;
    out.text += "\n\n";
  }

  json clusters = json::array();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!mentions[i].empty())
      clusters.push_back({{"id", names[i]}, {"mentions", mentions[i]}, {"source_chapter", first_chapter[i]},
                          {"hint", names[i]}});
  out.annotations = json{{"format_version", 1}, {"tokens", tokens}, {"sentences", sentences},
                         {"clusters", clusters}, {"propositions", props}, {"scores", json::array()}}
                        .dump();

  std::normal_distribution<double> g;
  for (const auto& [verb, lemma] : verbs) {
    out.embeddings += lemma;
    for (int d = 0; d < 50; ++d) out.embeddings += " " + std::to_string(g(rng));
    out.embeddings += "\n";
  }
  return out;
}

}  // namespace generators
