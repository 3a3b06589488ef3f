#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traitlens/project.hpp"

namespace traitlens {

// Response bodies shared by the HTTP service and the CLI exporters, so both
// emit identical bytes for the same snapshot.

enum class BodyFormat { json, csv };
std::optional<BodyFormat> parse_body_format(std::string_view s);

struct Body {
  std::string content;
  std::string content_type;
};

struct MatrixQuery {
  MatrixKind kind = MatrixKind::presence;
  MatrixLevel level = MatrixLevel::chapter;
  std::optional<std::size_t> chapter;
  std::vector<std::string> characters;
  bool smooth = true;
  BodyFormat format = BodyFormat::json;
};

inline constexpr std::size_t kDefaultContextRows = 3;

Body render_matrix(const Project& project, const MatrixQuery& query);
Body render_wordzone(const Project& project, const std::string& character, WordZoneKind kind,
                     BodyFormat format = BodyFormat::json);
Body render_contexts(const Project& project, std::size_t max_rows = kDefaultContextRows,
                     BodyFormat format = BodyFormat::json);
Body render_cooccurrence(const Project& project, const std::string& character, std::size_t chapter);
Body render_clusters(const Project& project);
Body render_summary(const Project& project);
Body render_status(const Project& project, bool running, const std::optional<std::string>& last_error = {});

Body json_body(const nlohmann::json& j);

}  // namespace traitlens
