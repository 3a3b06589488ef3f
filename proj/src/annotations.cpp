#include "traitlens/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

using nlohmann::json;

std::string_view emotion_name(Emotion e) {
  switch (e) {
    case Emotion::joy: return "joy";
    case Emotion::sadness: return "sadness";
    case Emotion::love: return "love";
    case Emotion::anger: return "anger";
    case Emotion::fear: return "fear";
    case Emotion::surprise: return "surprise";
  }
  return "";
}

std::optional<Emotion> parse_emotion(std::string_view name) {
  for (Emotion e : kEmotionOrder)
    if (emotion_name(e) == name) return e;
  return std::nullopt;
}

const PropositionArg* Proposition::find(std::string_view role) const {
  for (const auto& a : args)
    if (a.role == role) return &a;
  return nullptr;
}

bool ValidationReport::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::error; });
}

std::vector<Finding> ValidationReport::errors() const {
  std::vector<Finding> out;
  for (const auto& f : findings)
    if (f.severity == Severity::error) out.push_back(f);
  return out;
}

std::vector<Finding> ValidationReport::warnings() const {
  std::vector<Finding> out;
  for (const auto& f : findings)
    if (f.severity == Severity::warning) out.push_back(f);
  return out;
}

// ---------------------------------------------------------------------------
// Layer navigation

std::size_t AnnotationLayer::head_of(std::size_t token) const {
  const auto& s = sentences[tokens[token].sentence];
  return s.token_begin + tokens[token].head;
}

bool AnnotationLayer::is_root(std::size_t token) const { return head_of(token) == token; }

std::vector<std::size_t> AnnotationLayer::dependents(std::size_t token) const {
  std::vector<std::size_t> out;
  const auto& s = sentences[tokens[token].sentence];
  for (std::size_t t = s.token_begin; t < s.token_end; ++t)
    if (t != token && head_of(t) == token) out.push_back(t);
  return out;
}

std::optional<std::size_t> AnnotationLayer::nominal_subject(std::size_t token,
                                                            bool include_passive) const {
  for (std::size_t d : dependents(token)) {
    const auto& rel = tokens[d].deprel;
    if (rel == "nsubj" || (include_passive && rel.rfind("nsubj:", 0) == 0)) return d;
  }
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> AnnotationLayer::tokens_within(const Span& span) const {
  auto first = std::lower_bound(tokens.begin(), tokens.end(), span.start,
                                [](const Token& t, std::size_t off) { return t.span.start < off; });
  auto last = first;
  while (last != tokens.end() && last->span.end <= span.end) ++last;
  return {static_cast<std::size_t>(first - tokens.begin()),
          static_cast<std::size_t>(last - tokens.begin())};
}

std::optional<std::size_t> AnnotationLayer::token_at(std::size_t offset) const {
  auto it = std::upper_bound(tokens.begin(), tokens.end(), offset,
                             [](std::size_t off, const Token& t) { return off < t.span.start; });
  if (it == tokens.begin()) return std::nullopt;
  --it;
  if (it->span.contains(offset)) return static_cast<std::size_t>(it - tokens.begin());
  return std::nullopt;
}

std::optional<std::size_t> AnnotationLayer::head_token(const Span& span) const {
  auto [a, b] = tokens_within(span);
  if (a >= b) return std::nullopt;
  for (std::size_t t = a; t < b; ++t) {
    const std::size_t h = head_of(t);
    if (h == t || h < a || h >= b) return t;
  }
  return a;
}

std::optional<std::size_t> AnnotationLayer::sentence_at(std::size_t offset) const {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), offset,
                             [](std::size_t off, const SentenceAnn& s) { return off < s.span.start; });
  if (it == sentences.begin()) return std::nullopt;
  --it;
  if (it->span.contains(offset)) return it->index;
  return std::nullopt;
}

const SentenceScore* AnnotationLayer::score_for(std::size_t sentence) const {
  auto it = std::lower_bound(scores.begin(), scores.end(), sentence,
                             [](const SentenceScore& s, std::size_t i) { return s.sentence < i; });
  if (it != scores.end() && it->sentence == sentence) return &*it;
  return nullptr;
}

bool AnnotationLayer::operator==(const AnnotationLayer& o) const {
  return format_version == o.format_version && tokens == o.tokens && sentences == o.sentences &&
         clusters == o.clusters && propositions == o.propositions && scores == o.scores;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what, path);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path, std::string("missing key '") + key + "'");
  return *it;
}

std::size_t get_index(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    schema_fail(path + "." + key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) schema_fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& obj, const char* key, const std::string& path, bool required) {
  static const json empty = json::array();
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) schema_fail(path, std::string("missing key '") + key + "'");
    return empty;
  }
  if (!it->is_array()) schema_fail(path + "." + key, "expected an array");
  return *it;
}

ErrorCode code_for_kind(const std::string& kind) {
  if (kind == "OffsetError") return ErrorCode::OffsetError;
  if (kind == "TreeError") return ErrorCode::TreeError;
  if (kind == "RangeError") return ErrorCode::RangeError;
  return ErrorCode::SchemaError;
}

AnnotationLayer read_layer(const json& root) {
  if (!root.is_object()) schema_fail("$", "expected an object");
  AnnotationLayer layer;
  {
    const json& v = field(root, "format_version", "$");
    if (!v.is_number_integer()) schema_fail("$.format_version", "expected an integer");
    layer.format_version = v.get<int>();
    if (layer.format_version != kAnnotationFormatVersion)
      schema_fail("$.format_version", "unsupported format_version " + v.dump());
  }

  const json& sentences = get_array(root, "sentences", "$", true);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const std::string path = "$.sentences[" + std::to_string(i) + "]";
    SentenceAnn s;
    s.index = i;
    s.span = {get_index(sentences[i], "start", path), get_index(sentences[i], "end", path)};
    s.chapter = get_index(sentences[i], "chapter", path);
    layer.sentences.push_back(s);
  }

  const json& tokens = get_array(root, "tokens", "$", true);
  layer.tokens.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string path = "$.tokens[" + std::to_string(i) + "]";
    const json& t = tokens[i];
    Token tok;
    tok.span = {get_index(t, "start", path), get_index(t, "end", path)};
    tok.surface = get_string(t, "surface", path);
    tok.lemma = get_string(t, "lemma", path);
    tok.pos = get_string(t, "pos", path);
    tok.head = get_index(t, "head", path);
    tok.deprel = get_string(t, "deprel", path);
    tok.sentence = get_index(t, "sentence", path);
    if (tok.sentence >= layer.sentences.size())
      schema_fail(path + ".sentence", "unknown sentence " + std::to_string(tok.sentence));
    layer.tokens.push_back(std::move(tok));
  }

  // Tokens of one sentence must be contiguous and sentences visited in order.
  std::vector<bool> seen(layer.sentences.size(), false);
  for (std::size_t i = 0; i < layer.tokens.size();) {
    const std::size_t s = layer.tokens[i].sentence;
    if (seen[s])
      schema_fail("$.tokens[" + std::to_string(i) + "]",
                  "tokens of sentence " + std::to_string(s) + " are not contiguous");
    if (i > 0 && s < layer.tokens[i - 1].sentence)
      schema_fail("$.tokens[" + std::to_string(i) + "]", "tokens are not in sentence order");
    seen[s] = true;
    std::size_t j = i;
    while (j < layer.tokens.size() && layer.tokens[j].sentence == s) ++j;
    layer.sentences[s].token_begin = i;
    layer.sentences[s].token_end = j;
    i = j;
  }
  // Empty sentences get an empty range at the right position.
  std::size_t cursor = 0;
  for (auto& s : layer.sentences) {
    if (s.token_end > s.token_begin) {
      cursor = s.token_end;
    } else {
      s.token_begin = s.token_end = cursor;
    }
  }

  const json& clusters = get_array(root, "clusters", "$", false);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const std::string path = "$.clusters[" + std::to_string(i) + "]";
    const json& c = clusters[i];
    CorefCluster cl;
    const json& id = field(c, "id", path);
    if (id.is_string()) {
      cl.id = id.get<std::string>();
    } else if (id.is_number_integer()) {
      cl.id = id.dump();
    } else {
      schema_fail(path + ".id", "expected a string or integer");
    }
    const json& mentions = get_array(c, "mentions", path, true);
    for (std::size_t m = 0; m < mentions.size(); ++m) {
      const json& pair = mentions[m];
      const std::string mpath = path + ".mentions[" + std::to_string(m) + "]";
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          !pair[1].is_number_integer() || pair[0].get<long long>() < 0 ||
          pair[1].get<long long>() < 0)
        schema_fail(mpath, "expected [start, end]");
      cl.mentions.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
    }
    cl.source_chapter = get_index(c, "source_chapter", path);
    if (auto h = c.find("hint"); h != c.end() && !h->is_null()) {
      if (!h->is_string()) schema_fail(path + ".hint", "expected a string or null");
      cl.hint = h->get<std::string>();
    }
    layer.clusters.push_back(std::move(cl));
  }

  const json& props = get_array(root, "propositions", "$", false);
  for (std::size_t i = 0; i < props.size(); ++i) {
    const std::string path = "$.propositions[" + std::to_string(i) + "]";
    Proposition p;
    p.sentence = get_index(props[i], "sentence", path);
    const json& args = get_array(props[i], "args", path, true);
    for (std::size_t a = 0; a < args.size(); ++a) {
      const std::string apath = path + ".args[" + std::to_string(a) + "]";
      PropositionArg arg;
      arg.role = get_string(args[a], "role", apath);
      arg.span = {get_index(args[a], "start", apath), get_index(args[a], "end", apath)};
      p.args.push_back(std::move(arg));
    }
    layer.propositions.push_back(std::move(p));
  }

  const json& scores = get_array(root, "scores", "$", false);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::string path = "$.scores[" + std::to_string(i) + "]";
    SentenceScore sc;
    sc.sentence = get_index(scores[i], "sentence", path);
    if (auto it = scores[i].find("sentiment"); it != scores[i].end() && !it->is_null()) {
      if (!it->is_number()) schema_fail(path + ".sentiment", "expected a number");
      sc.sentiment = it->get<double>();
    }
    if (auto it = scores[i].find("emotion"); it != scores[i].end() && !it->is_null()) {
      if (!it->is_string()) schema_fail(path + ".emotion", "expected a string");
      auto e = parse_emotion(it->get<std::string>());
      if (!e)
        throw Error(ErrorCode::RangeError,
                    path + ".emotion: unknown emotion label '" + it->get<std::string>() + "'", path);
      sc.emotion = *e;
    }
    layer.scores.push_back(sc);
  }
  std::stable_sort(layer.scores.begin(), layer.scores.end(),
                   [](const SentenceScore& a, const SentenceScore& b) { return a.sentence < b.sentence; });
  return layer;
}

}  // namespace

AnnotationLayer parse_annotations(const json& payload, const Document& doc) {
  AnnotationLayer layer = read_layer(payload);
  ValidationReport report = validate(layer, doc);
  for (const auto& f : report.findings) {
    if (f.severity == Severity::error)
      throw Error(code_for_kind(f.kind), f.location + ": " + f.message, f.location);
  }
  layer.warnings = report.warnings();
  return layer;
}

AnnotationLayer parse_annotations(std::string_view payload, const Document& doc) {
  json root;
  try {
    root = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what(), "$");
  }
  return parse_annotations(root, doc);
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate(const AnnotationLayer& layer, const Document& doc) {
  ValidationReport report;
  auto add = [&](Severity sev, const char* kind, std::string loc, std::string msg) {
    report.findings.push_back({sev, kind, std::move(loc), std::move(msg)});
  };
  auto span_ok = [&](const Span& s) { return s.start < s.end && s.end <= doc.length(); };
  auto fmt = [](const Span& s) {
    return "[" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")";
  };
  const auto& chapters = doc.chapters();

  if (layer.format_version != kAnnotationFormatVersion)
    add(Severity::error, "SchemaError", "$.format_version", "unsupported format_version");

  // Sentences
  for (std::size_t i = 0; i < layer.sentences.size(); ++i) {
    const auto& s = layer.sentences[i];
    const std::string loc = "sentences[" + std::to_string(i) + "]";
    if (s.index != i) add(Severity::error, "SchemaError", loc, "index does not match position");
    if (!span_ok(s.span)) {
      add(Severity::error, "OffsetError", loc, "span " + fmt(s.span) + " outside document");
      continue;
    }
    if (i > 0 && layer.sentences[i - 1].span.end > s.span.start)
      add(Severity::error, "OffsetError", loc, "overlaps the previous sentence");
    if (s.chapter >= chapters.size()) {
      add(Severity::error, "SchemaError", loc, "unknown chapter " + std::to_string(s.chapter));
    } else if (!chapters[s.chapter].span.contains(s.span)) {
      add(Severity::error, "OffsetError", loc,
          "span " + fmt(s.span) + " is not inside chapter " + std::to_string(s.chapter));
    }
    if (s.token_end < s.token_begin || s.token_end > layer.tokens.size()) {
      add(Severity::error, "SchemaError", loc, "token range out of bounds");
    } else {
      for (std::size_t t = s.token_begin; t < s.token_end; ++t)
        if (layer.tokens[t].sentence != i) {
          add(Severity::error, "SchemaError", loc, "token range is not contiguous");
          break;
        }
    }
  }

  // Tokens
  for (std::size_t i = 0; i < layer.tokens.size(); ++i) {
    const auto& t = layer.tokens[i];
    const std::string loc = "tokens[" + std::to_string(i) + "]";
    if (!span_ok(t.span)) {
      add(Severity::error, "OffsetError", loc, "span " + fmt(t.span) + " outside document");
      continue;
    }
    if (utf8_to_u32(t.surface) != slice_u32(doc, t.span))
      add(Severity::error, "OffsetError", loc,
          "surface '" + t.surface + "' does not match text '" + slice(doc, t.span) + "'");
    if (i > 0 && layer.tokens[i - 1].span.end > t.span.start)
      add(Severity::error, "OffsetError", loc, "overlaps or precedes the previous token");
    if (std::find(kUniversalPos.begin(), kUniversalPos.end(), t.pos) == kUniversalPos.end())
      add(Severity::error, "SchemaError", loc, "pos '" + t.pos + "' is not a universal POS tag");
    if (t.sentence >= layer.sentences.size()) {
      add(Severity::error, "SchemaError", loc, "unknown sentence");
    } else if (!layer.sentences[t.sentence].span.contains(t.span)) {
      add(Severity::error, "OffsetError", loc, "token lies outside its sentence");
    }
  }

  // Dependency trees
  for (const auto& s : layer.sentences) {
    const std::string loc = "sentences[" + std::to_string(s.index) + "]";
    if (s.token_end > layer.tokens.size() || s.token_end < s.token_begin) continue;
    const std::size_t n = s.token_count();
    if (n == 0) continue;
    bool dangling = false;
    std::size_t roots = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& tok = layer.tokens[s.token_begin + j];
      if (tok.head >= n) {
        add(Severity::error, "TreeError", "tokens[" + std::to_string(s.token_begin + j) + "]",
            "head " + std::to_string(tok.head) + " outside sentence of " + std::to_string(n) +
                " tokens");
        dangling = true;
      } else if (tok.head == j) {
        ++roots;
      }
    }
    if (dangling) continue;
    if (roots != 1) {
      add(Severity::error, "TreeError", loc,
          "expected exactly one root, found " + std::to_string(roots));
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t cur = j;
      std::size_t steps = 0;
      while (layer.tokens[s.token_begin + cur].head != cur && steps <= n) {
        cur = layer.tokens[s.token_begin + cur].head;
        ++steps;
      }
      if (steps > n) {
        add(Severity::error, "TreeError", "tokens[" + std::to_string(s.token_begin + j) + "]",
            "dependency cycle");
        break;
      }
    }
  }

  // Clusters
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < layer.clusters.size(); ++i) {
    const auto& c = layer.clusters[i];
    const std::string loc = "clusters[" + c.id + "]";
    if (c.id.empty()) add(Severity::error, "SchemaError", loc, "empty cluster id");
    if (!ids.insert(c.id).second) add(Severity::error, "SchemaError", loc, "duplicate cluster id");
    if (c.mentions.empty()) add(Severity::error, "SchemaError", loc, "cluster has no mentions");
    if (c.source_chapter >= chapters.size())
      add(Severity::error, "SchemaError", loc,
          "unknown source_chapter " + std::to_string(c.source_chapter));
    for (std::size_t m = 0; m < c.mentions.size(); ++m) {
      const Span& ms = c.mentions[m];
      const std::string mloc = loc + ".mentions[" + std::to_string(m) + "]";
      if (m > 0 && c.mentions[m - 1].start > ms.start)
        add(Severity::error, "SchemaError", mloc, "mentions not sorted by start");
      if (!span_ok(ms)) {
        add(Severity::error, "OffsetError", mloc, "span " + fmt(ms) + " outside document");
        continue;
      }
      auto ch = doc.chapter_of(ms.start);
      if (!ch || !chapters[*ch].span.contains(ms)) {
        add(Severity::error, "OffsetError", mloc,
            "span " + fmt(ms) + " is not inside a single chapter body");
        continue;
      }
      if (!layer.tokens.empty()) {
        auto a = layer.token_at(ms.start);
        auto b = layer.token_at(ms.end - 1);
        const bool start_mid = a && layer.tokens[*a].span.start != ms.start;
        const bool end_mid = b && layer.tokens[*b].span.end != ms.end;
        if (start_mid || end_mid)
          add(Severity::warning, "MentionBoundary", mloc,
              "span " + fmt(ms) + " does not align with token boundaries");
      }
    }
  }

  // Propositions
  for (std::size_t i = 0; i < layer.propositions.size(); ++i) {
    const auto& p = layer.propositions[i];
    const std::string loc = "propositions[" + std::to_string(i) + "]";
    if (p.sentence >= layer.sentences.size()) {
      add(Severity::error, "SchemaError", loc, "unknown sentence");
      continue;
    }
    const auto verbs = std::count_if(p.args.begin(), p.args.end(),
                                     [](const PropositionArg& a) { return a.role == "V"; });
    if (verbs > 1) add(Severity::error, "SchemaError", loc, "more than one V argument");
    for (const auto& a : p.args) {
      if (a.role.empty()) add(Severity::error, "SchemaError", loc, "empty role label");
      if (!span_ok(a.span) || !layer.sentences[p.sentence].span.contains(a.span))
        add(Severity::error, "OffsetError", loc,
            "argument " + a.role + " span " + fmt(a.span) + " outside its sentence");
    }
  }

  // Scores
  std::set<std::size_t> scored;
  for (std::size_t i = 0; i < layer.scores.size(); ++i) {
    const auto& sc = layer.scores[i];
    const std::string loc = "scores[" + std::to_string(i) + "]";
    if (sc.sentence >= layer.sentences.size())
      add(Severity::error, "SchemaError", loc, "unknown sentence");
    if (!scored.insert(sc.sentence).second)
      add(Severity::error, "SchemaError", loc, "duplicate score for sentence");
    if (i > 0 && layer.scores[i - 1].sentence > sc.sentence)
      add(Severity::error, "SchemaError", loc, "scores not ordered by sentence");
    if (sc.sentiment && !(std::isfinite(*sc.sentiment) && *sc.sentiment >= -1.0 &&
                          *sc.sentiment <= 1.0))
      add(Severity::error, "RangeError", loc, "sentiment outside [-1, +1]");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

json serialize_annotations(const AnnotationLayer& layer) {
  json root;
  root["format_version"] = layer.format_version;
  json tokens = json::array();
  for (const auto& t : layer.tokens) {
    tokens.push_back({{"start", t.span.start}, {"end", t.span.end}, {"surface", t.surface},
                      {"lemma", t.lemma}, {"pos", t.pos}, {"head", t.head},
                      {"deprel", t.deprel}, {"sentence", t.sentence}});
  }
  root["tokens"] = std::move(tokens);
  json sentences = json::array();
  for (const auto& s : layer.sentences)
    sentences.push_back({{"start", s.span.start}, {"end", s.span.end}, {"chapter", s.chapter}});
  root["sentences"] = std::move(sentences);
  json clusters = json::array();
  for (const auto& c : layer.clusters) {
    json mentions = json::array();
    for (const auto& m : c.mentions) mentions.push_back({m.start, m.end});
    clusters.push_back({{"id", c.id},
                        {"mentions", std::move(mentions)},
                        {"source_chapter", c.source_chapter},
                        {"hint", c.hint ? json(*c.hint) : json(nullptr)}});
  }
  root["clusters"] = std::move(clusters);
  json props = json::array();
  for (const auto& p : layer.propositions) {
    json args = json::array();
    for (const auto& a : p.args)
      args.push_back({{"role", a.role}, {"start", a.span.start}, {"end", a.span.end}});
    props.push_back({{"sentence", p.sentence}, {"args", std::move(args)}});
  }
  root["propositions"] = std::move(props);
  json scores = json::array();
  for (const auto& s : layer.scores) {
    json entry = {{"sentence", s.sentence}};
    if (s.sentiment) entry["sentiment"] = *s.sentiment;
    if (s.emotion) entry["emotion"] = std::string(emotion_name(*s.emotion));
    scores.push_back(std::move(entry));
  }
  root["scores"] = std::move(scores);
  return root;
}

}  // namespace traitlens
