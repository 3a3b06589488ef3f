#include "traitlens/render.hpp"

#include "traitlens/codec.hpp"
#include "traitlens/error.hpp"

namespace traitlens {

std::optional<BodyFormat> parse_body_format(std::string_view s) {
  if (s == "json") return BodyFormat::json;
  if (s == "csv") return BodyFormat::csv;
  return std::nullopt;
}

Body json_body(const json& j) { return {j.dump(), "application/json"}; }

namespace {

Body csv_body(std::string s) { return {std::move(s), "text/csv"}; }

}  // namespace

Body render_matrix(const Project& project, const MatrixQuery& query) {
  const ViewContext ctx = view_context(project, query.smooth);
  const IndicatorMatrix m = build_matrix(ctx, query.kind, query.level, query.characters, query.chapter);
  return query.format == BodyFormat::csv ? csv_body(to_csv(m)) : json_body(to_json(m));
}

Body render_wordzone(const Project& project, const std::string& character, WordZoneKind kind, BodyFormat format) {
  const ViewContext ctx = view_context(project);
  const WordZone zone = build_wordzone(ctx, character, kind);
  if (format == BodyFormat::json) return json_body(to_json(zone));
  std::string out = "word,weight,tf,df,cluster,rank\r\n";
  for (const auto& e : zone.entries) {
    out += csv_field(e.word) + "," + format_number(e.weight) + "," + std::to_string(e.tf) + "," +
           std::to_string(e.df) + "," + std::to_string(e.cluster) + "," + std::to_string(e.rank) + "\r\n";
  }
  return csv_body(std::move(out));
}

Body render_contexts(const Project& project, std::size_t max_rows, BodyFormat format) {
  const ViewContext ctx = view_context(project);
  const auto labels = context_labels(ctx, project.config.chars_per_column);
  const ContextLayout layout = layout_contexts(labels, max_rows, project.doc.chapters().size());
  if (format == BodyFormat::json) return json_body(to_json(layout));
  std::string out = "text,chapter,width,priority,row\r\n";
  for (const auto& p : layout.labels) {
    out += csv_field(p.label.text) + "," + std::to_string(p.label.chapter) + "," + format_number(p.label.width) +
           "," + std::to_string(p.label.priority) + "," + (p.row ? std::to_string(*p.row) : "") + "\r\n";
  }
  return csv_body(std::move(out));
}

Body render_cooccurrence(const Project& project, const std::string& character, std::size_t chapter) {
  const ViewContext ctx = view_context(project);
  return json_body({{"character", character}, {"chapter", chapter}, {"characters", cooccurrence(ctx, character, chapter)}});
}

Body render_clusters(const Project& project) {
  json clusters = json::array();
  json suggestions = json::array();
  json characters = json::array();
  json conflicts = json::array();
  if (project.layer) {
    for (const auto& row : project.registry.list_clusters(project.doc)) clusters.push_back(to_json(row));
    for (const auto& s : project.registry.suggest_merges(project.doc)) suggestions.push_back(to_json(s));
    for (const auto& c : project.registry.characters()) characters.push_back(to_json(c));
    for (const auto& c : project.registry.conflicts())
      conflicts.push_back({{"span", to_json(c.span)}, {"kept_by", c.kept_by}, {"dropped_from", c.dropped_from}});
  }
  return json_body({{"revision", project.revision},
                    {"clusters", clusters},
                    {"characters", characters},
                    {"suggestions", suggestions},
                    {"conflicts", conflicts}});
}

Body render_summary(const Project& project) {
  json chapters = json::array();
  for (const auto& c : project.doc.chapters())
    chapters.push_back({{"index", c.index},
                        {"title", c.title ? json(*c.title) : json(nullptr)},
                        {"span", to_json(c.span)}});
  json warnings = json::array();
  if (project.layer)
    for (const auto& w : project.layer->warnings) warnings.push_back(to_json(w));
  const auto status = project.status();
  return json_body({{"id", project.id},
                    {"document", project.doc.id()},
                    {"title", project.doc.meta().title},
                    {"author", project.doc.meta().author},
                    {"length", project.doc.length()},
                    {"chapters", chapters},
                    {"annotations", project.layer.has_value()},
                    {"sentences", project.layer ? project.layer->sentences.size() : 0},
                    {"characters", project.registry.characters().size()},
                    {"warnings", warnings},
                    {"revision", project.revision},
                    {"state", state_name(status.state)}});
}

Body render_status(const Project& project, bool running, const std::optional<std::string>& last_error) {
  const auto s = project.status();
  return json_body({{"state", state_name(s.state)},
                    {"revision", s.revision},
                    {"last_run", s.last_run ? json(*s.last_run) : json(nullptr)},
                    {"running", running},
                    {"error", last_error ? json(*last_error) : json(nullptr)}});
}

}  // namespace traitlens
