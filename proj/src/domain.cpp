#include "uigym/domain.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "uigym/errors.hpp"

namespace uigym {
namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Case-insensitive search for needle in haystack starting at pos.
std::size_t ifind(const std::string& haystack, const std::string& needle,
                  std::size_t pos) {
  if (needle.empty() || haystack.size() < needle.size()) return std::string::npos;
  for (std::size_t i = pos; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (std::tolower(static_cast<unsigned char>(haystack[i + k])) !=
          std::tolower(static_cast<unsigned char>(needle[k]))) {
        match = false;
        break;
      }
    }
    if (match) return i;
  }
  return std::string::npos;
}

}  // namespace

const char* to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::App: return "app";
    case DomainTag::Landing: return "landing";
    case DomainTag::Game: return "game";
    case DomainTag::Interactive: return "interactive";
    case DomainTag::Tool: return "tool";
    case DomainTag::Utility: return "utility";
  }
  return "app";
}

DomainTag domain_tag_from_string(const std::string& text) {
  const std::string t = lower(text);
  if (t == "app") return DomainTag::App;
  if (t == "landing") return DomainTag::Landing;
  if (t == "game") return DomainTag::Game;
  if (t == "interactive") return DomainTag::Interactive;
  if (t == "tool") return DomainTag::Tool;
  if (t == "utility") return DomainTag::Utility;
  throw ValidationError("unknown domain tag: '" + text + "'");
}

std::vector<DomainTag> report_domain_order() {
  return {DomainTag::Landing, DomainTag::Game,       DomainTag::App,
          DomainTag::Utility, DomainTag::Interactive, DomainTag::Tool};
}

void AppSpec::validate() const {
  if (id.empty()) throw ValidationError("app spec id must be non-empty");
  if (name.empty()) throw ValidationError("app spec name must be non-empty");
  if (features.empty())
    throw ValidationError("app spec '" + id + "' must list at least one feature");
}

const char* to_string(TaskCategory category) {
  switch (category) {
    case TaskCategory::CoreFunction: return "core_function";
    case TaskCategory::UserWorkflow: return "user_workflow";
    case TaskCategory::EdgeCase: return "edge_case";
  }
  return "core_function";
}

TaskCategory task_category_from_string(const std::string& text) {
  if (text == "core_function") return TaskCategory::CoreFunction;
  if (text == "user_workflow") return TaskCategory::UserWorkflow;
  if (text == "edge_case") return TaskCategory::EdgeCase;
  throw ValidationError("unknown task category: '" + text + "'");
}

void Task::validate() const {
  if (id <= 0) throw ValidationError("task id must be a positive integer");
  if (description.empty())
    throw ValidationError("task " + std::to_string(id) + " has an empty description");
  if (expected_outcome.empty())
    throw ValidationError("task " + std::to_string(id) + " has an empty expected_outcome");
}

void SolvabilityVerdict::validate() const {
  if (solvable && (!checker || checker->empty()))
    throw ValidationError("solvable verdict for task " + std::to_string(task_id) +
                          " is missing its checker");
  if (!solvable && checker)
    throw ValidationError("unsolvable verdict for task " + std::to_string(task_id) +
                          " must not carry a checker");
}

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Initial: return "initial";
    case Provenance::SolvabilityRevision: return "solvability_revision";
    case Provenance::NavigationRevision: return "navigation_revision";
    case Provenance::IntegratedRevision: return "integrated_revision";
  }
  return "initial";
}

Provenance provenance_from_string(const std::string& text) {
  if (text == "initial") return Provenance::Initial;
  if (text == "solvability_revision") return Provenance::SolvabilityRevision;
  if (text == "navigation_revision") return Provenance::NavigationRevision;
  if (text == "integrated_revision") return Provenance::IntegratedRevision;
  throw ValidationError("unknown provenance: '" + text + "'");
}

EnvironmentVersion make_environment_version(
    std::string html, int round, Provenance provenance,
    std::shared_ptr<const EnvironmentVersion> parent) {
  if (round < 0) throw ValidationError("environment round must be nonnegative");
  if (parent && parent->round >= round)
    throw ValidationError("environment round " + std::to_string(round) +
                          " must be greater than parent round " +
                          std::to_string(parent->round));
  const std::size_t doctype = ifind(html, "<!doctype", 0);
  if (doctype != 0)
    throw ValidationError("environment html must begin with a doctype declaration");
  if (ifind(html, "</html", 0) == std::string::npos)
    throw ValidationError("environment html is missing its closing html tag");
  EnvironmentVersion env;
  env.html = std::move(html);
  env.round = round;
  env.parent = std::move(parent);
  env.provenance = provenance;
  env.created_at_ms = now_ms();
  return env;
}

const char* to_string(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::Success: return "success";
    case OutcomeStatus::Failure: return "failure";
    case OutcomeStatus::UnsolvableSkipped: return "unsolvable_skipped";
    case OutcomeStatus::Error: return "error";
  }
  return "failure";
}

OutcomeStatus outcome_status_from_string(const std::string& text) {
  if (text == "success") return OutcomeStatus::Success;
  if (text == "failure") return OutcomeStatus::Failure;
  if (text == "unsolvable_skipped") return OutcomeStatus::UnsolvableSkipped;
  if (text == "error") return OutcomeStatus::Error;
  throw ValidationError("unknown outcome status: '" + text + "'");
}

void TaskOutcome::validate() const {
  if (task_id <= 0) throw ValidationError("outcome task_id must be positive");
  if (steps_used < 0) throw ValidationError("outcome steps_used must be nonnegative");
}

void to_json(json& j, const AppSpec& spec) {
  j = json{{"id", spec.id},
           {"name", spec.name},
           {"goal", spec.goal},
           {"features", spec.features},
           {"theme", spec.theme},
           {"domain", to_string(spec.domain)}};
}

void from_json(const json& j, AppSpec& spec) {
  j.at("id").get_to(spec.id);
  j.at("name").get_to(spec.name);
  j.at("goal").get_to(spec.goal);
  j.at("features").get_to(spec.features);
  j.at("theme").get_to(spec.theme);
  spec.domain = domain_tag_from_string(j.at("domain").get<std::string>());
  spec.validate();
}

void to_json(json& j, const Task& task) {
  j = task.extra_fields.is_object() ? task.extra_fields : json::object();
  j["id"] = task.id;
  j["description"] = task.description;
  j["category"] = to_string(task.category);
  j["expected_outcome"] = task.expected_outcome;
  if (!task.enabled || j.contains("enabled")) j["enabled"] = task.enabled;
}

void from_json(const json& j, Task& task) {
  task.id = j.at("id").get<int>();
  j.at("description").get_to(task.description);
  task.category = task_category_from_string(j.at("category").get<std::string>());
  j.at("expected_outcome").get_to(task.expected_outcome);
  task.enabled = j.value("enabled", true);
  task.extra_fields = json::object();
  static const std::set<std::string> known = {"id", "description", "category",
                                              "expected_outcome", "enabled"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) task.extra_fields[it.key()] = it.value();
  }
  task.validate();
}

void to_json(json& j, const SolvabilityVerdict& verdict) {
  j = json{{"task_id", verdict.task_id}, {"solvable", verdict.solvable}};
  if (verdict.checker) j["checker"] = *verdict.checker;
  if (verdict.diagnostics) j["diagnostics"] = *verdict.diagnostics;
  if (verdict.raw_script) j["raw_script"] = true;
}

void from_json(const json& j, SolvabilityVerdict& verdict) {
  verdict.task_id = j.at("task_id").get<int>();
  verdict.solvable = j.at("solvable").get<bool>();
  verdict.checker = j.contains("checker")
                        ? std::optional<std::string>(j["checker"].get<std::string>())
                        : std::nullopt;
  verdict.diagnostics =
      j.contains("diagnostics")
          ? std::optional<std::string>(j["diagnostics"].get<std::string>())
          : std::nullopt;
  verdict.raw_script = j.value("raw_script", false);
  verdict.validate();
}

void to_json(json& j, const EnvironmentVersion& env) {
  j = json{{"html", env.html},
           {"round", env.round},
           {"provenance", to_string(env.provenance)},
           {"created_at_ms", env.created_at_ms}};
}

void from_json(const json& j, EnvironmentVersion& env) {
  j.at("html").get_to(env.html);
  env.round = j.at("round").get<int>();
  env.provenance = provenance_from_string(j.at("provenance").get<std::string>());
  env.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
}

void to_json(json& j, const TaskOutcome& outcome) {
  j = json{{"task_id", outcome.task_id},
           {"status", to_string(outcome.status)},
           {"steps_used", outcome.steps_used}};
  if (outcome.trajectory_ref) j["trajectory_ref"] = *outcome.trajectory_ref;
  if (outcome.diagnostics) j["diagnostics"] = *outcome.diagnostics;
}

void from_json(const json& j, TaskOutcome& outcome) {
  outcome.task_id = j.at("task_id").get<int>();
  outcome.status = outcome_status_from_string(j.at("status").get<std::string>());
  outcome.steps_used = j.at("steps_used").get<int>();
  outcome.trajectory_ref =
      j.contains("trajectory_ref")
          ? std::optional<std::string>(j["trajectory_ref"].get<std::string>())
          : std::nullopt;
  outcome.diagnostics =
      j.contains("diagnostics")
          ? std::optional<std::string>(j["diagnostics"].get<std::string>())
          : std::nullopt;
  outcome.validate();
}

std::string render_query(const AppSpec& spec) {
  spec.validate();
  std::ostringstream out;
  out << "Create a single-page app in a single HTML file with the following "
         "requirements:\n";
  out << "- Name: " << spec.name << "\n";
  out << "- Goal: " << spec.goal;
  if (spec.goal.empty() || spec.goal.back() != '.') out << ".";
  out << "\n";
  out << "- Features: ";
  for (std::size_t i = 0; i < spec.features.size(); ++i) {
    if (i) out << ", ";
    out << spec.features[i];
  }
  if (spec.features.back().empty() || spec.features.back().back() != '.') out << ".";
  out << "\n";
  out << "- Theme: " << spec.theme;
  return out.str();
}

std::vector<Task> parse_task_set(const std::string& text,
                                 std::vector<TaskSetWarning>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("task set is not valid JSON: ") + e.what(), e.byte);
  }
  const json* tasks_node = nullptr;
  if (doc.is_object() && doc.contains("tasks")) {
    tasks_node = &doc["tasks"];
  } else {
    throw ValidationError("task set must be an object with a \"tasks\" array");
  }
  if (!tasks_node->is_array())
    throw ValidationError("\"tasks\" must be an array");

  std::vector<Task> tasks;
  std::map<int, std::size_t> seen;  // id -> entry index
  for (std::size_t i = 0; i < tasks_node->size(); ++i) {
    Task task;
    try {
      task = (*tasks_node)[i].get<Task>();
    } catch (const json::exception& e) {
      throw ValidationError("task entry " + std::to_string(i) + " is malformed: " +
                            e.what());
    }
    auto [it, inserted] = seen.emplace(task.id, i);
    if (!inserted) {
      throw ValidationError("duplicate task id " + std::to_string(task.id) +
                            " (entries " + std::to_string(it->second) + " and " +
                            std::to_string(i) + ")");
    }
    tasks.push_back(std::move(task));
  }
  if (tasks.empty() && warnings) {
    warnings->push_back({"task set contains no tasks"});
  }
  return tasks;
}

std::vector<Task> load_task_set(const std::filesystem::path& path,
                                std::vector<TaskSetWarning>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open task set: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_task_set(buffer.str(), warnings);
}

void save_task_set(const std::filesystem::path& path, const std::string& app_name,
                   const std::vector<Task>& tasks) {
  json doc;
  doc["app_name"] = app_name;
  doc["tasks"] = tasks;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write task set: " + path.string());
  out << doc.dump(2) << "\n";
}

std::string extract_html_document(const std::string& text) {
  std::string body = text;
  // Trim outer whitespace.
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ValidationError("empty coder reply");
  const auto last = body.find_last_not_of(" \t\r\n");
  body = body.substr(first, last - first + 1);

  // Strip one surrounding markdown code fence, with an optional language tag.
  if (body.rfind("```", 0) == 0) {
    const auto line_end = body.find('\n');
    const auto closing = body.rfind("```");
    if (line_end != std::string::npos && closing > line_end) {
      body = body.substr(line_end + 1, closing - line_end - 1);
    }
  }

  const std::size_t doctype = ifind(body, "<!doctype", 0);
  if (doctype == std::string::npos)
    throw ValidationError("reply contains no doctype declaration");
  const std::size_t close = ifind(body, "</html", doctype);
  if (close == std::string::npos)
    throw ValidationError("reply is missing the closing html tag");
  const std::size_t close_end = body.find('>', close);
  if (close_end == std::string::npos)
    throw ValidationError("reply is missing the closing html tag");

  if (ifind(body, "<!doctype", close_end) != std::string::npos)
    throw ValidationError(
        "reply contains more than one complete document; extraction is ambiguous");

  return body.substr(doctype, close_end + 1 - doctype);
}

EnvironmentVersion validate_environment(
    const std::string& text, int round, Provenance provenance,
    std::shared_ptr<const EnvironmentVersion> parent) {
  return make_environment_version(extract_html_document(text), round, provenance,
                                  std::move(parent));
}

}  // namespace uigym
