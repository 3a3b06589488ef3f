#include "traitlens/codec.hpp"

#include <cmath>

#include "traitlens/error.hpp"

namespace traitlens {

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

template <class E, class F>
E enum_from(const json& j, F parse) {
  auto v = parse(j.get<std::string>());
  if (!v) throw Error(ErrorCode::SchemaError, "unknown enum value '" + j.get<std::string>() + "'");
  return *v;
}

std::optional<SpeakerMethod> parse_method(std::string_view s) {
  for (auto m : {SpeakerMethod::self_reference, SpeakerMethod::verb_subject, SpeakerMethod::unresolved})
    if (method_name(m) == s) return m;
  return std::nullopt;
}

std::optional<ActionSource> parse_action_source(std::string_view s) {
  for (auto m : {ActionSource::proposition, ActionSource::dependency_fallback})
    if (source_name(m) == s) return m;
  return std::nullopt;
}

std::optional<DefinitionPath> parse_path(std::string_view s) {
  for (auto m : {DefinitionPath::copular, DefinitionPath::modifier, DefinitionPath::ascend_to_verb})
    if (path_name(m) == s) return m;
  return std::nullopt;
}

std::optional<ScoreSource> parse_score_source(std::string_view s) {
  for (auto m : {ScoreSource::lexicon, ScoreSource::external})
    if (source_name(m) == s) return m;
  return std::nullopt;
}

}  // namespace

json to_json(const Span& s) { return json::array({s.start, s.end}); }

Span span_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::SchemaError, "span must be [start, end]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

json to_json(const std::vector<Span>& spans) {
  json out = json::array();
  for (const auto& s : spans) out.push_back(to_json(s));
  return out;
}

json to_json(const Finding& f) {
  return {{"severity", f.severity == Severity::error ? "error" : "warning"},
          {"kind", f.kind},
          {"location", f.location},
          {"message", f.message}};
}

json to_json(const ClusterRow& row) {
  return {{"cluster_id", row.cluster_id},       {"source_chapter", row.source_chapter},
          {"mention_count", row.mention_count}, {"samples", row.samples},
          {"hint", opt(row.hint)},              {"name", opt(row.assigned_name)},
          {"label", label_name(row.label)},     {"merged_into", opt(row.merged_into)},
          {"root", row.root}};
}

json to_json(const MergeSuggestion& s) {
  return {{"source", s.source}, {"target", s.target}, {"shared_surfaces", s.shared_surfaces}};
}

json to_json(const Character& c) {
  return {{"id", c.id},
          {"name", c.display_name},
          {"clusters", c.member_clusters},
          {"mention_count", c.mentions.size()},
          {"provisional", c.provisional}};
}

json to_json(const Quote& q) {
  return {{"span", to_json(q.span)},
          {"chapter", q.chapter},
          {"sentences", q.sentences},
          {"speaker", opt(q.speaker)},
          {"method", method_name(q.method)},
          {"evidence", q.evidence ? to_json(*q.evidence) : json(nullptr)},
          {"ill_formed", q.ill_formed}};
}

json to_json(const ActionRecord& a) {
  return {{"character", a.character}, {"verb", a.verb_lemma}, {"span", to_json(a.verb_span)},
          {"sentence", a.sentence},   {"chapter", a.chapter}, {"source", source_name(a.source)}};
}

json to_json(const DefinitionRecord& d) {
  return {{"character", d.character}, {"adjective", d.adjective_lemma}, {"span", to_json(d.adjective_span)},
          {"path", path_name(d.path)}, {"sentence", d.sentence},        {"chapter", d.chapter}};
}

json to_json(const SentimentScore& s) {
  json contributions = json::array();
  for (const auto& c : s.contributions) contributions.push_back({{"span", to_json(c.span)}, {"score", c.score}});
  return {{"sentence", s.sentence},
          {"value", s.value},
          {"contributions", contributions},
          {"source", source_name(s.source)}};
}

json to_json(const EmotionLabel& e) {
  return {{"sentence", e.sentence},
          {"label", e.label ? json(emotion_name(*e.label)) : json(nullptr)},
          {"source", source_name(e.source)}};
}

json to_json(const ActionChangeCell& c) {
  return {{"character", c.character}, {"chapter", c.chapter},   {"value", opt(c.value)},
          {"covered", c.covered},     {"clamped", c.clamped}};
}

json to_json(const AnalysisResults& r) {
  json j;
  auto list = [](const auto& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
  };
  j["quotes"] = list(r.quotes);
  j["actions"] = list(r.actions);
  j["definitions"] = list(r.definitions);
  j["sentiment"] = list(r.sentiment);
  j["emotions"] = list(r.emotions);
  j["smoothed_sentiment"] = r.smoothed_sentiment;
  j["window"] = r.window;
  j["action_changes"] = list(r.action_changes);
  return j;
}

AnalysisResults results_from_json(const json& j) {
  AnalysisResults r;
  for (const auto& q : j.at("quotes")) {
    Quote x;
    x.span = span_from_json(q.at("span"));
    x.chapter = q.at("chapter").get<std::size_t>();
    x.sentences = q.at("sentences").get<std::vector<std::size_t>>();
    x.speaker = opt_from<std::string>(q.at("speaker"));
    x.method = enum_from<SpeakerMethod>(q.at("method"), parse_method);
    if (!q.at("evidence").is_null()) x.evidence = span_from_json(q.at("evidence"));
    x.ill_formed = q.at("ill_formed").get<bool>();
    r.quotes.push_back(std::move(x));
  }
  for (const auto& a : j.at("actions")) {
    r.actions.push_back({a.at("character").get<std::string>(), a.at("verb").get<std::string>(),
                         span_from_json(a.at("span")), a.at("sentence").get<std::size_t>(),
                         a.at("chapter").get<std::size_t>(),
                         enum_from<ActionSource>(a.at("source"), parse_action_source)});
  }
  for (const auto& d : j.at("definitions")) {
    r.definitions.push_back({d.at("character").get<std::string>(), d.at("adjective").get<std::string>(),
                             span_from_json(d.at("span")), enum_from<DefinitionPath>(d.at("path"), parse_path),
                             d.at("sentence").get<std::size_t>(), d.at("chapter").get<std::size_t>()});
  }
  for (const auto& s : j.at("sentiment")) {
    SentimentScore x;
    x.sentence = s.at("sentence").get<std::size_t>();
    x.value = s.at("value").get<double>();
    for (const auto& c : s.at("contributions"))
      x.contributions.push_back({span_from_json(c.at("span")), c.at("score").get<double>()});
    x.source = enum_from<ScoreSource>(s.at("source"), parse_score_source);
    r.sentiment.push_back(std::move(x));
  }
  for (const auto& e : j.at("emotions")) {
    EmotionLabel x;
    x.sentence = e.at("sentence").get<std::size_t>();
    if (!e.at("label").is_null()) x.label = enum_from<Emotion>(e.at("label"), parse_emotion);
    x.source = enum_from<ScoreSource>(e.at("source"), parse_score_source);
    r.emotions.push_back(x);
  }
  r.smoothed_sentiment = j.at("smoothed_sentiment").get<std::vector<double>>();
  r.window = j.at("window").get<std::size_t>();
  for (const auto& c : j.at("action_changes")) {
    r.action_changes.push_back({c.at("character").get<std::string>(), c.at("chapter").get<std::size_t>(),
                                opt_from<double>(c.at("value")), c.at("covered").get<bool>(),
                                c.at("clamped").get<bool>()});
  }
  return r;
}

json to_json(const EmbeddingTable& t) {
  json words = json::array();
  for (const auto& w : t.words()) words.push_back({w, *t.find(w)});
  return {{"dimension", t.dimension()}, {"vectors", words}};
}

EmbeddingTable embeddings_from_json(const json& j) {
  EmbeddingTable t(j.at("dimension").get<std::size_t>());
  for (const auto& e : j.at("vectors"))
    if (!t.add(e.at(0).get<std::string>(), e.at(1).get<std::vector<double>>()))
      throw Error(ErrorCode::CorruptFile, "duplicate embedding '" + e.at(0).get<std::string>() + "'");
  return t;
}

json to_json(const IndicatorMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    json cells = json::array();
    for (const auto& cell : m.cells[r]) {
      if (!cell) {
        cells.push_back(nullptr);
        continue;
      }
      json c = {{"value", cell->value}, {"normalized", cell->normalized}, {"evidence", to_json(cell->evidence)}};
      if (cell->category) c["category"] = emotion_name(*cell->category);
      if (m.kind == MatrixKind::action_change) {
        json pairs = json::array();
        for (const auto& p : cell->pairs)
          pairs.push_back({{"current", p.current}, {"previous", p.previous}, {"similarity", p.similarity}});
        c["pairs"] = pairs;
      }
      cells.push_back(std::move(c));
    }
    rows.push_back({{"character", m.rows[r]}, {"name", m.row_names[r]}, {"cells", cells}});
  }
  return {{"kind", kind_name(m.kind)},
          {"level", level_name(m.level)},
          {"chapter", opt(m.focus_chapter)},
          {"columns", m.columns},
          {"rows", rows}};
}

json to_json(const WordZone& z) {
  json entries = json::array();
  for (const auto& e : z.entries) {
    entries.push_back({{"word", e.word},
                       {"weight", e.weight},
                       {"tf", e.tf},
                       {"df", e.df},
                       {"cluster", e.cluster},
                       {"rank", e.rank},
                       {"evidence", to_json(e.evidence)}});
  }
  return {{"character", z.character}, {"kind", wordzone_kind_name(z.kind)}, {"entries", entries}};
}

json to_json(const ContextLayout& l) {
  json labels = json::array();
  for (const auto& p : l.labels) {
    labels.push_back({{"text", p.label.text},
                      {"chapter", p.label.chapter},
                      {"width", p.label.width},
                      {"priority", p.label.priority},
                      {"row", opt(p.row)}});
  }
  return {{"max_rows", l.max_rows}, {"placed", l.placed()}, {"labels", labels}};
}

std::string format_number(double v) {
  // Counts print as integers; other values use the shortest round-trip form.
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) return std::to_string(static_cast<long long>(v));
  return json(v).dump();
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_csv(const IndicatorMatrix& m) {
  std::string out = "character";
  for (std::size_t c : m.columns) out += "," + std::to_string(c);
  out += "\r\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    out += csv_field(m.rows[r]);
    for (const auto& cell : m.cells[r]) {
      out += ',';
      if (!cell) continue;
      out += cell->category ? std::string(emotion_name(*cell->category)) : format_number(cell->value);
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace traitlens
