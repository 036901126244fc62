#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace uigym {

/// Closed set of application domains a spec can belong to.
enum class DomainTag { App, Landing, Game, Interactive, Tool, Utility };

const char* to_string(DomainTag tag);
DomainTag domain_tag_from_string(const std::string& text);

/// Order used by reports: landing, game, app, utility, interactive, tool.
std::vector<DomainTag> report_domain_order();

/// Structured user query that seeds app generation.
struct AppSpec {
  std::string id;                     // short slug, unique within a corpus
  std::string name;                   // display name
  std::string goal;                   // one sentence
  std::vector<std::string> features;  // non-empty
  std::string theme;
  DomainTag domain = DomainTag::App;

  void validate() const;  // throws ValidationError
};

enum class TaskCategory { CoreFunction, UserWorkflow, EdgeCase };

const char* to_string(TaskCategory category);
TaskCategory task_category_from_string(const std::string& text);

/// One natural-language task against an app, with its expected outcome.
struct Task {
  int id = 0;  // positive, unique per app
  std::string description;
  TaskCategory category = TaskCategory::CoreFunction;
  std::string expected_outcome;
  bool enabled = true;          // manual QC filter; disabled tasks are kept but skipped
  nlohmann::json extra_fields;  // unknown fields preserved opaquely (object or null)

  void validate() const;
};

/// Result of asking the verifier whether a task is solvable on an environment.
struct SolvabilityVerdict {
  int task_id = 0;
  bool solvable = false;
  std::optional<std::string> checker;      // DSL source or raw script; present iff solvable
  std::optional<std::string> diagnostics;  // e.g. "checker_unparseable"
  bool raw_script = false;                 // checker is a raw script, not DSL

  void validate() const;
};

enum class Provenance { Initial, SolvabilityRevision, NavigationRevision, IntegratedRevision };

const char* to_string(Provenance provenance);
Provenance provenance_from_string(const std::string& text);

/// One HTML artifact in the revision chain.
struct EnvironmentVersion {
  std::string html;  // complete document, doctype through closing html tag
  int round = 0;
  std::shared_ptr<const EnvironmentVersion> parent;
  Provenance provenance = Provenance::Initial;
  std::int64_t created_at_ms = 0;
};

/// Builds a version after checking the html and chain invariants.
EnvironmentVersion make_environment_version(
    std::string html, int round, Provenance provenance,
    std::shared_ptr<const EnvironmentVersion> parent = nullptr);

enum class OutcomeStatus { Success, Failure, UnsolvableSkipped, Error };

const char* to_string(OutcomeStatus status);
OutcomeStatus outcome_status_from_string(const std::string& text);

/// Terminal record of one task execution.
struct TaskOutcome {
  int task_id = 0;
  OutcomeStatus status = OutcomeStatus::Failure;
  int steps_used = 0;
  std::optional<std::string> trajectory_ref;  // directory of the stored trajectory
  std::optional<std::string> diagnostics;

  void validate() const;
};

// JSON serialization. Round-trip invariant: write -> read -> write is
// byte-identical for every type.
void to_json(nlohmann::json& j, const AppSpec& spec);
void from_json(const nlohmann::json& j, AppSpec& spec);
void to_json(nlohmann::json& j, const Task& task);
void from_json(const nlohmann::json& j, Task& task);
void to_json(nlohmann::json& j, const SolvabilityVerdict& verdict);
void from_json(const nlohmann::json& j, SolvabilityVerdict& verdict);
void to_json(nlohmann::json& j, const EnvironmentVersion& env);
void from_json(const nlohmann::json& j, EnvironmentVersion& env);
void to_json(nlohmann::json& j, const TaskOutcome& outcome);
void from_json(const nlohmann::json& j, TaskOutcome& outcome);

/// Renders the structured query in the four-line Name/Goal/Features/Theme
/// format. Features are joined with ", "; goal and feature list end with a
/// period.
std::string render_query(const AppSpec& spec);

struct TaskSetWarning {
  std::string message;
};

/// Loads a task file in the proposer's JSON shape:
///   {"app_name": ..., "tags": [...], "tasks": [{"id", "description",
///    "category", "expected_outcome"}, ...]}
/// Duplicate ids are rejected; disabled tasks are retained but flagged.
std::vector<Task> load_task_set(const std::filesystem::path& path,
                                std::vector<TaskSetWarning>* warnings = nullptr);

/// Parses tasks from an in-memory JSON document (same shape as the file form).
std::vector<Task> parse_task_set(const std::string& text,
                                 std::vector<TaskSetWarning>* warnings = nullptr);

/// Writes tasks back in the proposer shape, preserving unknown fields.
void save_task_set(const std::filesystem::path& path, const std::string& app_name,
                   const std::vector<Task>& tasks);

/// Extracts a complete HTML document from a coder reply. Strips a surrounding
/// markdown code fence if present; rejects input without a doctype or closing
/// html tag, and input containing more than one complete document.
std::string extract_html_document(const std::string& text);

/// extract_html_document + version construction in one step.
EnvironmentVersion validate_environment(
    const std::string& text, int round = 0,
    Provenance provenance = Provenance::Initial,
    std::shared_ptr<const EnvironmentVersion> parent = nullptr);

}  // namespace uigym
