#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traitlens/analysis.hpp"
#include "traitlens/views.hpp"

namespace traitlens {

inline constexpr int kProjectFormatVersion = 1;
inline constexpr std::string_view kProjectFormatTag = "traitlens-project";

struct ProjectConfig {
  IngestConfig ingest;
  RegistryConfig registry;
  std::optional<std::size_t> window;
  std::uint64_t seed = 42;
  std::optional<std::size_t> k;
  PresenceUnit presence_unit = PresenceUnit::mentions;
  double chars_per_column = 12.0;
  // Fall back to the bundled lexicons when no file was given.
  bool builtin_lexicons = true;

  bool operator==(const ProjectConfig&) const = default;
};

enum class AnalysisState { empty, stale, current };
std::string_view state_name(AnalysisState s);

struct AnalysisStatus {
  AnalysisState state = AnalysisState::empty;
  std::optional<std::uint64_t> last_run;
  std::uint64_t revision = 0;
};

struct Project {
  std::string id;
  ProjectConfig config;
  Document doc;
  std::optional<AnnotationLayer> layer;
  CharacterRegistry registry;
  AnalysisResources resources;
  std::optional<AnalysisResults> results;  // only while current
  std::optional<std::uint64_t> last_run;
  std::uint64_t revision = 0;

  AnalysisStatus status() const;
  bool operator==(const Project&) const = default;
};

// Lexicons come from the config's builtin flag; load_resources overrides them.
Project create_project(std::string_view text, ProjectConfig config = {}, std::string id = {});

struct ResourceFiles {
  std::optional<std::filesystem::path> sentiment_lexicon;
  std::optional<std::filesystem::path> emotion_lexicon;
  std::optional<std::filesystem::path> embeddings;
};

// Reads the given files into `project.resources`; a mutation when anything changed.
// Returns embedding warnings.
std::vector<std::string> load_resources(Project& project, const ResourceFiles& files);

// Each mutation bumps the revision and drops cached results. On error the
// project is left untouched.
void import_annotations(Project& project, std::string_view payload);
void merge_clusters(Project& project, const std::string& source, const std::string& target);
void set_cluster_label(Project& project, const std::string& cluster_id, ClusterLabel label);
void set_cluster_name(Project& project, const std::string& cluster_id, std::optional<std::string> name);
void update_config(Project& project, const ProjectConfig& config);

std::string get_text(const Project& project, std::optional<Span> span = std::nullopt);

// Throws NotReady without annotations, characters (unless auto-promotion is
// on) or a sentiment source. A no-op when already current.
AnalysisStatus run_analysis(Project& project);
// Computes results for a snapshot without touching it.
AnalysisResults compute_results(const Project& project);

// Views over the current results; NotReady unless status is current.
ViewContext view_context(const Project& project, bool smooth = true);

// Missing keys keep their defaults.
nlohmann::json config_to_json(const ProjectConfig& config);
ProjectConfig config_from_json(const nlohmann::json& j);

std::string save_project_string(const Project& project);
Project load_project_string(std::string_view content);
void save_project(const Project& project, const std::filesystem::path& path);
Project load_project(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace traitlens
