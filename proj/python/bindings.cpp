// Python bindings. Views come back as the same JSON/CSV bodies the service returns.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "traitlens/error.hpp"
#include "traitlens/project.hpp"
#include "traitlens/render.hpp"

namespace py = pybind11;
using namespace traitlens;

namespace {

BodyFormat format_arg(const std::string& f) {
  auto v = parse_body_format(f);
  if (!v) throw Error(ErrorCode::InvalidArgument, "format must be json or csv", "format");
  return *v;
}

ClusterLabel label_arg(const std::string& s) {
  auto v = parse_label(s);
  if (!v) throw Error(ErrorCode::InvalidArgument, "unknown label '" + s + "'", "label");
  return *v;
}

Project make_project(const std::string& text, const std::string& config_json) {
  ProjectConfig config;
  if (!config_json.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("config is not valid JSON: ") + e.what());
    }
    config = config_from_json(j);
  }
  return create_project(text, config);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Character trait analytics for fiction";

  static py::exception<Error> error(m, "TraitlensError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(py::str(std::string(error_code_name(e.code())) + ": " + e.what()));
      exc.attr("code") = std::string(error_code_name(e.code()));
      exc.attr("location") = e.location();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<Project>(m, "Project")
      .def(py::init(&make_project), py::arg("text"), py::arg("config_json") = "")
      .def_static("load", [](const std::string& path) { return load_project(path); }, py::arg("path"))
      .def_static("loads", [](const std::string& content) { return load_project_string(content); })
      .def("save", [](const Project& p, const std::string& path) { save_project(p, path); }, py::arg("path"))
      .def("dumps", [](const Project& p) { return save_project_string(p); })
      .def_readonly("id", &Project::id)
      .def_readonly("revision", &Project::revision)
      .def("load_resources",
           [](Project& p, std::optional<std::string> sentiment, std::optional<std::string> emotion,
              std::optional<std::string> embeddings) {
             ResourceFiles files;
             if (sentiment) files.sentiment_lexicon = *sentiment;
             if (emotion) files.emotion_lexicon = *emotion;
             if (embeddings) files.embeddings = *embeddings;
             return load_resources(p, files);
           },
           py::arg("sentiment_lexicon") = py::none(), py::arg("emotion_lexicon") = py::none(),
           py::arg("embeddings") = py::none())
      .def("import_annotations", [](Project& p, const std::string& payload) { import_annotations(p, payload); })
      .def("merge", [](Project& p, const std::string& s, const std::string& t) { merge_clusters(p, s, t); },
           py::arg("source"), py::arg("target"))
      .def("label", [](Project& p, const std::string& c, const std::string& l) { set_cluster_label(p, c, label_arg(l)); },
           py::arg("cluster_id"), py::arg("label"))
      .def("name", [](Project& p, const std::string& c, std::optional<std::string> n) { set_cluster_name(p, c, n); },
           py::arg("cluster_id"), py::arg("name"))
      .def("analyze",
           [](Project& p) {
             py::gil_scoped_release release;
             run_analysis(p);
           })
      .def("state", [](const Project& p) { return std::string(state_name(p.status().state)); })
      .def("text",
           [](const Project& p, std::optional<std::size_t> start, std::optional<std::size_t> end) {
             if (!start && !end) return get_text(p);
             return get_text(p, Span{start.value_or(0), end.value_or(p.doc.length())});
           },
           py::arg("start") = py::none(), py::arg("end") = py::none())
      .def("summary_json", [](const Project& p) { return render_summary(p).content; })
      .def("clusters_json", [](const Project& p) { return render_clusters(p).content; })
      .def("matrix",
           [](const Project& p, const std::string& kind, const std::string& level, std::optional<std::size_t> chapter,
              std::vector<std::string> characters, bool smooth, const std::string& format) {
             MatrixQuery q;
             auto k = parse_matrix_kind(kind);
             if (!k) throw Error(ErrorCode::InvalidArgument, "unknown matrix kind '" + kind + "'", "kind");
             auto l = parse_matrix_level(level);
             if (!l) throw Error(ErrorCode::InvalidArgument, "level must be chapter or sentence", "level");
             q.kind = *k;
             q.level = *l;
             q.chapter = chapter;
             q.characters = std::move(characters);
             q.smooth = smooth;
             q.format = format_arg(format);
             return render_matrix(p, q).content;
           },
           py::arg("kind"), py::arg("level") = "chapter", py::arg("chapter") = py::none(),
           py::arg("characters") = std::vector<std::string>{}, py::arg("smooth") = true, py::arg("format") = "json")
      .def("wordzone",
           [](const Project& p, const std::string& character, const std::string& kind, const std::string& format) {
             auto k = parse_wordzone_kind(kind);
             if (!k) throw Error(ErrorCode::InvalidArgument, "kind must be actions or definitions", "kind");
             return render_wordzone(p, character, *k, format_arg(format)).content;
           },
           py::arg("character"), py::arg("kind") = "actions", py::arg("format") = "json")
      .def("cooccurrence",
           [](const Project& p, const std::string& character, std::size_t chapter) {
             return render_cooccurrence(p, character, chapter).content;
           },
           py::arg("character"), py::arg("chapter"))
      .def("contexts",
           [](const Project& p, std::size_t max_rows, const std::string& format) {
             return render_contexts(p, max_rows, format_arg(format)).content;
           },
           py::arg("max_rows") = kDefaultContextRows, py::arg("format") = "json");
}
