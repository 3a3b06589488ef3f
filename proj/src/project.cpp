#include "traitlens/project.hpp"

#include <fstream>
#include <sstream>

#include "traitlens/codec.hpp"
#include "traitlens/error.hpp"
#include "traitlens/text.hpp"

namespace traitlens {

std::string_view state_name(AnalysisState s) {
  switch (s) {
    case AnalysisState::empty: return "empty";
    case AnalysisState::stale: return "stale";
    case AnalysisState::current: return "current";
  }
  return "";
}

AnalysisStatus Project::status() const {
  AnalysisStatus s;
  s.revision = revision;
  s.last_run = last_run;
  if (!last_run) s.state = AnalysisState::empty;
  else if (*last_run == revision && results) s.state = AnalysisState::current;
  else s.state = AnalysisState::stale;
  return s;
}

namespace {

void apply_builtin(Project& p) {
  if (!p.config.builtin_lexicons) return;
  if (!p.resources.sentiment) p.resources.sentiment = builtin_sentiment_lexicon();
  if (!p.resources.emotion) p.resources.emotion = builtin_emotion_lexicon();
}

void bump(Project& p) {
  ++p.revision;
  p.results.reset();
}

}  // namespace

Project create_project(std::string_view text, ProjectConfig config, std::string id) {
  Project p;
  p.doc = ingest_text(text, config.ingest);
  p.id = id.empty() ? p.doc.id() : std::move(id);
  p.config = std::move(config);
  apply_builtin(p);
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string(), path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string(), path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string(), path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message(), path.string());
}

std::vector<std::string> load_resources(Project& project, const ResourceFiles& files) {
  AnalysisResources next = project.resources;
  std::vector<std::string> warnings;
  if (files.sentiment_lexicon)
    next.sentiment = parse_sentiment_lexicon(read_file(*files.sentiment_lexicon), files.sentiment_lexicon->string());
  if (files.emotion_lexicon)
    next.emotion = parse_emotion_lexicon(read_file(*files.emotion_lexicon), files.emotion_lexicon->string());
  if (files.embeddings) {
    auto load = load_embeddings(read_file(*files.embeddings));
    next.embeddings = std::move(load.table);
    warnings = std::move(load.warnings);
  }
  if (!(next == project.resources)) {
    project.resources = std::move(next);
    bump(project);
  }
  return warnings;
}

void import_annotations(Project& project, std::string_view payload) {
  AnnotationLayer layer = parse_annotations(payload, project.doc);
  CharacterRegistry registry(layer, project.config.registry);
  project.layer = std::move(layer);
  project.registry = std::move(registry);
  bump(project);
}

namespace {

void require_layer(const Project& p) {
  if (!p.layer) throw Error(ErrorCode::NotReady, "no annotations imported");
}

}  // namespace

void merge_clusters(Project& project, const std::string& source, const std::string& target) {
  require_layer(project);
  project.registry.merge(source, target);
  bump(project);
}

void set_cluster_label(Project& project, const std::string& cluster_id, ClusterLabel label) {
  require_layer(project);
  project.registry.set_label(cluster_id, label);
  bump(project);
}

void set_cluster_name(Project& project, const std::string& cluster_id, std::optional<std::string> name) {
  require_layer(project);
  project.registry.set_name(cluster_id, std::move(name));
  bump(project);
}

void update_config(Project& project, const ProjectConfig& config) {
  if (config == project.config) return;
  if (!(config.ingest == project.config.ingest))
    throw Error(ErrorCode::InvalidArgument, "chapter segmentation is fixed once a project exists");
  if (config.window && (*config.window == 0 || *config.window % 2 == 0))
    throw Error(ErrorCode::InvalidArgument, "window must be odd and positive");
  if (config.k && *config.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  project.config = config;
  if (project.layer) project.registry.set_config(config.registry);
  apply_builtin(project);
  bump(project);
}

std::string get_text(const Project& project, std::optional<Span> span) {
  return slice(project.doc, span.value_or(Span{0, project.doc.length()}));
}

AnalysisResults compute_results(const Project& project) {
  require_layer(project);
  const AnnotationLayer& layer = *project.layer;
  if (project.registry.characters().empty() && !project.registry.config().auto_promote)
    throw Error(ErrorCode::NotReady, "no clusters are labeled as characters");
  if (!project.resources.sentiment) {
    for (const auto& s : layer.sentences) {
      const SentenceScore* score = layer.score_for(s.index);
      if (score == nullptr || !score->sentiment)
        throw Error(ErrorCode::NotReady, "no sentiment lexicon configured and sentence " +
                                             std::to_string(s.index) + " carries no external score");
    }
  }
  return run_pipeline(project.doc, layer, project.registry, project.resources,
                      AnalysisOptions{project.config.window});
}

AnalysisStatus run_analysis(Project& project) {
  if (project.status().state == AnalysisState::current) return project.status();
  project.results = compute_results(project);
  project.last_run = project.revision;
  return project.status();
}

ViewContext view_context(const Project& project, bool smooth) {
  if (project.status().state != AnalysisState::current)
    throw Error(ErrorCode::NotReady, "analysis is " + std::string(state_name(project.status().state)));
  ViewConfig config;
  config.presence_unit = project.config.presence_unit;
  config.smooth = smooth;
  config.clustering.seed = project.config.seed;
  config.clustering.k = project.config.k;
  return ViewContext{project.doc, *project.layer, project.registry, *project.results,
                     project.resources.embeddings ? &*project.resources.embeddings : nullptr, config};
}

// ---------------------------------------------------------------------------
// Persistence

json config_to_json(const ProjectConfig& c) {
  return {{"heading_pattern", c.ingest.heading_pattern},
          {"strip_boilerplate", c.ingest.strip_boilerplate},
          {"title_line", c.ingest.title_line},
          {"auto_promote", c.registry.auto_promote},
          {"min_mentions", c.registry.min_mentions},
          {"window", c.window ? json(*c.window) : json(nullptr)},
          {"seed", c.seed},
          {"k", c.k ? json(*c.k) : json(nullptr)},
          {"presence_unit", unit_name(c.presence_unit)},
          {"chars_per_column", c.chars_per_column},
          {"builtin_lexicons", c.builtin_lexicons}};
}

ProjectConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "config must be an object", "/config");
  ProjectConfig c;
  try {
    c.ingest.heading_pattern = j.value("heading_pattern", c.ingest.heading_pattern);
    c.ingest.strip_boilerplate = j.value("strip_boilerplate", c.ingest.strip_boilerplate);
    c.ingest.title_line = j.value("title_line", c.ingest.title_line);
    c.registry.auto_promote = j.value("auto_promote", c.registry.auto_promote);
    c.registry.min_mentions = j.value("min_mentions", c.registry.min_mentions);
    if (j.contains("window") && !j["window"].is_null()) c.window = j["window"].get<std::size_t>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("k") && !j["k"].is_null()) c.k = j["k"].get<std::size_t>();
    if (j.contains("presence_unit")) {
      auto unit = parse_presence_unit(j["presence_unit"].get<std::string>());
      if (!unit) throw Error(ErrorCode::SchemaError, "unknown presence unit", "/config/presence_unit");
      c.presence_unit = *unit;
    }
    c.chars_per_column = j.value("chars_per_column", c.chars_per_column);
    c.builtin_lexicons = j.value("builtin_lexicons", c.builtin_lexicons);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("bad project config: ") + e.what(), "/config");
  }
  if (c.window && (*c.window == 0 || *c.window % 2 == 0))
    throw Error(ErrorCode::InvalidArgument, "window must be a positive odd integer", "/config/window");
  if (c.k && *c.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive", "/config/k");
  return c;
}

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json sentiment_json(const std::optional<SentimentLexicon>& l) {
  if (!l) return nullptr;
  if (l->source == "builtin" && *l == builtin_sentiment_lexicon()) return {{"builtin", true}};
  return {{"source", l->source}, {"tsv", to_tsv(*l)}};
}

std::optional<SentimentLexicon> sentiment_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.contains("builtin")) return builtin_sentiment_lexicon();
  return parse_sentiment_lexicon(j.at("tsv").get<std::string>(), j.at("source").get<std::string>());
}

json emotion_json(const std::optional<EmotionLexicon>& l) {
  if (!l) return nullptr;
  if (l->source == "builtin" && *l == builtin_emotion_lexicon()) return {{"builtin", true}};
  return {{"source", l->source}, {"tsv", to_tsv(*l)}};
}

std::optional<EmotionLexicon> emotion_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.contains("builtin")) return builtin_emotion_lexicon();
  return parse_emotion_lexicon(j.at("tsv").get<std::string>(), j.at("source").get<std::string>());
}

json document_json(const Document& d) {
  json chapters = json::array();
  for (const auto& c : d.chapters())
    chapters.push_back({{"index", c.index}, {"title", opt(c.title)}, {"span", to_json(c.span)}});
  return {{"id", d.id()},
          {"text", u32_to_utf8(d.text())},
          {"chapters", chapters},
          {"meta", {{"title", d.meta().title}, {"author", d.meta().author}, {"provenance", d.meta().provenance}}}};
}

Document document_from(const json& j) {
  std::vector<Chapter> chapters;
  for (const auto& c : j.at("chapters")) {
    Chapter ch;
    ch.index = c.at("index").get<std::size_t>();
    if (!c.at("title").is_null()) ch.title = c.at("title").get<std::string>();
    ch.span = span_from_json(c.at("span"));
    chapters.push_back(std::move(ch));
  }
  const auto& m = j.at("meta");
  return Document(j.at("id").get<std::string>(), utf8_to_u32(j.at("text").get<std::string>()), std::move(chapters),
                  SourceMeta{m.at("title").get<std::string>(), m.at("author").get<std::string>(),
                             m.at("provenance").get<std::string>()});
}

json reviews_json(const CharacterRegistry& r) {
  json out = json::array();
  for (const auto& rv : r.reviews())
    out.push_back({{"cluster_id", rv.cluster_id},
                   {"name", opt(rv.assigned_name)},
                   {"label", label_name(rv.label)},
                   {"merged_into", opt(rv.merged_into)}});
  return out;
}

std::vector<ClusterReview> reviews_from(const json& j) {
  std::vector<ClusterReview> out;
  for (const auto& r : j) {
    ClusterReview rv;
    rv.cluster_id = r.at("cluster_id").get<std::string>();
    if (!r.at("name").is_null()) rv.assigned_name = r.at("name").get<std::string>();
    auto label = parse_label(r.at("label").get<std::string>());
    if (!label) throw Error(ErrorCode::CorruptFile, "unknown cluster label");
    rv.label = *label;
    if (!r.at("merged_into").is_null()) rv.merged_into = r.at("merged_into").get<std::string>();
    out.push_back(std::move(rv));
  }
  return out;
}

}  // namespace

std::string save_project_string(const Project& p) {
  json j;
  j["format"] = kProjectFormatTag;
  j["version"] = kProjectFormatVersion;
  j["id"] = p.id;
  j["revision"] = p.revision;
  j["last_run"] = opt(p.last_run);
  j["config"] = config_to_json(p.config);
  j["document"] = document_json(p.doc);
  j["annotations"] = p.layer ? serialize_annotations(*p.layer) : json(nullptr);
  j["reviews"] = reviews_json(p.registry);
  j["resources"] = {{"sentiment", sentiment_json(p.resources.sentiment)},
                    {"emotion", emotion_json(p.resources.emotion)},
                    {"embeddings", p.resources.embeddings ? to_json(*p.resources.embeddings) : json(nullptr)}};
  j["results"] = p.results ? to_json(*p.results) : json(nullptr);
  return j.dump() + "\n";
}

Project load_project_string(std::string_view content) {
  json j;
  try {
    j = json::parse(content);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("project file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kProjectFormatTag)
      throw Error(ErrorCode::CorruptFile, "not a project file");
    const int version = j.at("version").get<int>();
    if (version > kProjectFormatVersion || version < 1)
      throw Error(ErrorCode::VersionUnsupported,
                  "project format version " + std::to_string(version) + " is not supported");
    Project p;
    p.id = j.at("id").get<std::string>();
    p.revision = j.at("revision").get<std::uint64_t>();
    if (!j.at("last_run").is_null()) p.last_run = j.at("last_run").get<std::uint64_t>();
    p.config = config_from_json(j.at("config"));
    p.doc = document_from(j.at("document"));
    if (!j.at("annotations").is_null()) {
      p.layer = parse_annotations(j.at("annotations"), p.doc);
      p.registry = CharacterRegistry(*p.layer, reviews_from(j.at("reviews")), p.config.registry);
    }
    const auto& res = j.at("resources");
    p.resources.sentiment = sentiment_from(res.at("sentiment"));
    p.resources.emotion = emotion_from(res.at("emotion"));
    if (!res.at("embeddings").is_null()) p.resources.embeddings = embeddings_from_json(res.at("embeddings"));
    if (!j.at("results").is_null()) p.results = results_from_json(j.at("results"));
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("malformed project file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::VersionUnsupported || e.code() == ErrorCode::CorruptFile) throw;
    throw Error(ErrorCode::CorruptFile, std::string("inconsistent project file: ") + e.what(), e.location());
  }
}

void save_project(const Project& project, const std::filesystem::path& path) {
  write_file(path, save_project_string(project));
}

Project load_project(const std::filesystem::path& path) { return load_project_string(read_file(path)); }

}  // namespace traitlens
