// Command-line front end: ingest, curate, analyze and export project files.
#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "traitlens/codec.hpp"
#include "traitlens/error.hpp"
#include "traitlens/project.hpp"
#include "traitlens/render.hpp"
#include "traitlens/service.hpp"

namespace tl = traitlens;

namespace {

struct ResourceFlags {
  std::string sentiment, emotion, embeddings;
  std::optional<std::size_t> window;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;

  void attach(CLI::App* app) {
    app->add_option("--sentiment-lexicon", sentiment, "TSV lemma/score lexicon");
    app->add_option("--emotion-lexicon", emotion, "TSV lemma/category lexicon");
    app->add_option("--embeddings", embeddings, "Word vectors, one `word v1 ... vd` per line");
    app->add_option("--window", window, "Smoothing window (odd)");
    app->add_option("--seed", seed, "Word-zone clustering seed");
    app->add_option("--k", k, "Word-zone cluster count");
  }

  // Returns true when the project changed.
  bool apply(tl::Project& p) const {
    const auto before = p.revision;
    tl::ResourceFiles files;
    if (!sentiment.empty()) files.sentiment_lexicon = sentiment;
    if (!emotion.empty()) files.emotion_lexicon = emotion;
    if (!embeddings.empty()) files.embeddings = embeddings;
    for (const auto& w : tl::load_resources(p, files)) std::cerr << "warning: " << w << "\n";
    tl::ProjectConfig config = p.config;
    if (window) config.window = *window;
    if (seed) config.seed = *seed;
    if (k) config.k = *k;
    tl::update_config(p, config);
    return p.revision != before;
  }
};

void emit(const tl::Body& body, const std::string& out) {
  if (out.empty() || out == "-") {
    std::fwrite(body.content.data(), 1, body.content.size(), stdout);
    if (body.content_type == "application/json") std::fputc('\n', stdout);
  } else {
    tl::write_file(out, body.content);
  }
}

tl::BodyFormat body_format(const std::string& s) {
  auto f = tl::parse_body_format(s);
  if (!f) throw tl::Error(tl::ErrorCode::InvalidArgument, "format must be json or csv");
  return *f;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

tl::HttpServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character-trait analytics for fiction"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Create a project file from a plain-text story");
  std::string text_path, project_out;
  tl::ProjectConfig config;
  bool builtin_off = false, auto_promote = false;
  std::string presence = "mentions";
  ResourceFlags ingest_res;
  ingest->add_option("text", text_path, "UTF-8 story text")->required();
  ingest->add_option("-o,--output", project_out, "Project file to write")->required();
  ingest->add_option("--heading-pattern", config.ingest.heading_pattern, "Chapter heading regex (ECMAScript)");
  ingest->add_flag("--strip-boilerplate", config.ingest.strip_boilerplate, "Drop Project Gutenberg header/footer");
  ingest->add_flag("--title-line", config.ingest.title_line, "Take the line after a heading as its title");
  ingest->add_flag("--no-builtin-lexicons", builtin_off, "Do not fall back to the bundled lexicons");
  ingest->add_flag("--auto-promote", auto_promote, "Promote large unreviewed clusters to characters");
  ingest->add_option("--min-mentions", config.registry.min_mentions, "Auto-promotion threshold");
  ingest->add_option("--presence-unit", presence, "mentions or sentences");
  ingest->add_option("--chars-per-column", config.chars_per_column, "Context label width scale");
  ingest_res.attach(ingest);

  // import-annotations
  auto* import = app.add_subcommand("import-annotations", "Attach an annotation interchange file");
  std::string project_path, annotations_path;
  import->add_option("project", project_path)->required();
  import->add_option("annotations", annotations_path)->required();

  // clusters
  auto* clusters = app.add_subcommand("clusters", "Review coreference clusters");
  clusters->require_subcommand(1);
  std::string cluster_id, value, target, list_format = "text";
  auto* c_list = clusters->add_subcommand("list", "List clusters with samples");
  c_list->add_option("project", project_path)->required();
  c_list->add_option("--format", list_format, "text or json");
  auto* c_name = clusters->add_subcommand("name", "Set a cluster's display name");
  c_name->add_option("project", project_path)->required();
  c_name->add_option("cluster", cluster_id)->required();
  c_name->add_option("name", value)->required();
  auto* c_label = clusters->add_subcommand("label", "Label a cluster");
  c_label->add_option("project", project_path)->required();
  c_label->add_option("cluster", cluster_id)->required();
  c_label->add_option("label", value, "character, context, discarded or unreviewed")->required();
  auto* c_merge = clusters->add_subcommand("merge", "Merge SOURCE into TARGET");
  c_merge->add_option("project", project_path)->required();
  c_merge->add_option("source", cluster_id)->required();
  c_merge->add_option("target", target)->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Run the extraction and dynamics pipeline");
  ResourceFlags analyze_res;
  analyze->add_option("project", project_path)->required();
  analyze_res.attach(analyze);

  // export
  auto* exp = app.add_subcommand("export", "Write views of an analysed project");
  exp->require_subcommand(1);
  std::string out_path, format = "json", kind, level = "chapter", characters, character;
  std::optional<std::size_t> chapter;
  std::size_t max_rows = tl::kDefaultContextRows;
  bool raw = false;
  auto* e_matrix = exp->add_subcommand("matrix", "Indicator matrix");
  e_matrix->add_option("project", project_path)->required();
  e_matrix->add_option("--kind", kind, "presence, speech, sentiment, emotion, action_change")->required();
  e_matrix->add_option("--level", level, "chapter or sentence");
  e_matrix->add_option("--chapter", chapter, "Focus chapter for sentence level");
  e_matrix->add_option("--characters", characters, "Comma-separated character ids");
  e_matrix->add_flag("--raw", raw, "Unsmoothed sentiment");
  auto* e_zone = exp->add_subcommand("wordzone", "Weighted, clustered words for one character");
  e_zone->add_option("project", project_path)->required();
  e_zone->add_option("--character", character)->required();
  e_zone->add_option("--kind", kind, "actions or definitions");
  auto* e_ctx = exp->add_subcommand("contexts", "Context label layout");
  e_ctx->add_option("project", project_path)->required();
  e_ctx->add_option("--max-rows", max_rows);
  for (auto* sub : {e_matrix, e_zone, e_ctx}) {
    sub->add_option("--format", format, "json or csv");
    sub->add_option("-o,--output", out_path, "Output file (default stdout)");
  }

  // serve
  auto* serve = app.add_subcommand("serve", "Serve projects over HTTP");
  std::vector<std::string> serve_projects;
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("projects", serve_projects, "Project files to preload");
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) {
      const std::string text = tl::read_file(text_path);
      config.builtin_lexicons = !builtin_off;
      config.registry.auto_promote = auto_promote;
      auto unit = tl::parse_presence_unit(presence);
      if (!unit) throw tl::Error(tl::ErrorCode::InvalidArgument, "presence unit must be mentions or sentences");
      config.presence_unit = *unit;
      tl::Project p = tl::create_project(text, config);
      ingest_res.apply(p);
      p.revision = 0;
      tl::save_project(p, project_out);
      std::cerr << "project " << p.id << ": " << p.doc.chapters().size() << " chapters\n";
    } else if (import->parsed()) {
      tl::Project p = tl::load_project(project_path);
      tl::import_annotations(p, tl::read_file(annotations_path));
      for (const auto& w : p.layer->warnings) std::cerr << "warning: " << w.location << ": " << w.message << "\n";
      tl::save_project(p, project_path);
      std::cerr << p.layer->sentences.size() << " sentences, " << p.layer->clusters.size() << " clusters\n";
    } else if (clusters->parsed()) {
      tl::Project p = tl::load_project(project_path);
      if (c_list->parsed()) {
        if (list_format == "json") {
          emit(tl::render_clusters(p), "");
        } else {
          if (!p.layer) throw tl::Error(tl::ErrorCode::NotReady, "no annotations imported");
          const auto rows = p.registry.list_clusters(p.doc);
          std::cout << rows.size() << " clusters\n";
          for (const auto& r : rows) {
            std::cout << r.cluster_id << "\tch" << r.source_chapter << "\t" << r.mention_count << "\t"
                      << tl::label_name(r.label);
            if (r.assigned_name) std::cout << "\t\"" << *r.assigned_name << "\"";
            if (r.merged_into) std::cout << "\t-> " << *r.merged_into;
            std::cout << "\t";
            for (std::size_t i = 0; i < r.samples.size(); ++i) std::cout << (i ? " | " : "") << r.samples[i];
            std::cout << "\n";
          }
        }
      } else {
        if (c_name->parsed()) tl::set_cluster_name(p, cluster_id, value);
        if (c_label->parsed()) {
          auto label = tl::parse_label(value);
          if (!label) throw tl::Error(tl::ErrorCode::InvalidArgument, "unknown label '" + value + "'");
          tl::set_cluster_label(p, cluster_id, *label);
        }
        if (c_merge->parsed()) tl::merge_clusters(p, cluster_id, target);
        tl::save_project(p, project_path);
        std::cerr << "revision " << p.revision << "\n";
      }
    } else if (analyze->parsed()) {
      tl::Project p = tl::load_project(project_path);
      analyze_res.apply(p);
      const auto status = tl::run_analysis(p);
      tl::save_project(p, project_path);
      std::cerr << "analysis " << tl::state_name(status.state) << " at revision " << status.revision << ": "
                << p.results->quotes.size() << " quotes, " << p.results->actions.size() << " actions, "
                << p.results->definitions.size() << " definitions, window " << p.results->window << "\n";
    } else if (exp->parsed()) {
      const tl::Project p = tl::load_project(project_path);
      const tl::BodyFormat f = body_format(format);
      if (e_matrix->parsed()) {
        tl::MatrixQuery q;
        auto k = tl::parse_matrix_kind(kind);
        if (!k) throw tl::Error(tl::ErrorCode::InvalidArgument, "unknown matrix kind '" + kind + "'");
        auto l = tl::parse_matrix_level(level);
        if (!l) throw tl::Error(tl::ErrorCode::InvalidArgument, "level must be chapter or sentence");
        q.kind = *k;
        q.level = *l;
        q.chapter = chapter;
        q.characters = split_list(characters);
        q.smooth = !raw;
        q.format = f;
        emit(tl::render_matrix(p, q), out_path);
      } else if (e_zone->parsed()) {
        auto k = tl::parse_wordzone_kind(kind.empty() ? "actions" : kind);
        if (!k) throw tl::Error(tl::ErrorCode::InvalidArgument, "kind must be actions or definitions");
        emit(tl::render_wordzone(p, character, *k, f), out_path);
      } else {
        emit(tl::render_contexts(p, max_rows, f), out_path);
      }
    } else if (serve->parsed()) {
      tl::Service service;
      for (const auto& path : serve_projects) {
        const std::string id = service.add_project(tl::load_project(path));
        std::cerr << "loaded " << path << " as " << id << "\n";
      }
      tl::HttpServer server(service);
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (g_server != nullptr) g_server->stop();
      });
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) throw tl::Error(tl::ErrorCode::IoError, "cannot listen on port " + std::to_string(port));
    }
  } catch (const tl::Error& e) {
    std::cerr << "error: " << tl::error_code_name(e.code()) << ": " << e.what();
    if (!e.location().empty()) std::cerr << " (at " << e.location() << ")";
    std::cerr << "\n";
    return e.code() == tl::ErrorCode::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
