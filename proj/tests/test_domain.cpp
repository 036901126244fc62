#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "uigym/domain.hpp"
#include "uigym/errors.hpp"

using namespace uigym;
namespace fs = std::filesystem;

namespace {

AppSpec camping_spec() {
  AppSpec spec;
  spec.id = "camping-gear";
  spec.name = "Camping Gear Checklist";
  spec.goal = "Track gear for camping trips";
  spec.features = {"Checklist items", "weight calculator", "save lists"};
  spec.theme = "The UI should be outdoor-themed.";
  spec.domain = DomainTag::Utility;
  return spec;
}

std::string fixture_path(const std::string& rel) {
  return std::string(UIGYM_FIXTURE_DIR) + "/" + rel;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Parse-back oracle for render_query: recovers the spec fields from the
// rendered text by line structure alone.
struct ParsedQuery {
  std::string name, goal, theme;
  std::vector<std::string> features;
};

ParsedQuery parse_query_back(const std::string& text) {
  ParsedQuery out;
  std::istringstream in(text);
  std::string line;
  auto after = [](const std::string& l, const std::string& prefix) {
    REQUIRE(l.rfind(prefix, 0) == 0);
    return l.substr(prefix.size());
  };
  auto strip_period = [](std::string s) {
    REQUIRE(!s.empty());
    REQUIRE(s.back() == '.');
    s.pop_back();
    return s;
  };
  std::getline(in, line);
  CHECK(line == "Create a single-page app in a single HTML file with the following requirements:");
  std::getline(in, line);
  out.name = after(line, "- Name: ");
  std::getline(in, line);
  out.goal = strip_period(after(line, "- Goal: "));
  std::getline(in, line);
  std::string features = strip_period(after(line, "- Features: "));
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = features.find(", ", start);
    if (comma == std::string::npos) {
      out.features.push_back(features.substr(start));
      break;
    }
    out.features.push_back(features.substr(start, comma - start));
    start = comma + 2;
  }
  std::getline(in, line);
  out.theme = after(line, "- Theme: ");
  CHECK(!std::getline(in, line));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// render_query
// ---------------------------------------------------------------------------

TEST_CASE("render_query emits the four-line structured query") {
  const std::string text = render_query(camping_spec());
  CHECK(text ==
        "Create a single-page app in a single HTML file with the following requirements:\n"
        "- Name: Camping Gear Checklist\n"
        "- Goal: Track gear for camping trips.\n"
        "- Features: Checklist items, weight calculator, save lists.\n"
        "- Theme: The UI should be outdoor-themed.");
  CHECK(text.find("- Name: Camping Gear Checklist") != std::string::npos);
  CHECK(text.find("- Features: Checklist items, weight calculator, save lists.") !=
        std::string::npos);
}

TEST_CASE("render_query handles a single feature without separator artifacts") {
  AppSpec spec = camping_spec();
  spec.features = {"Checklist items"};
  const std::string text = render_query(spec);
  CHECK(text.find("- Features: Checklist items.\n") != std::string::npos);
  CHECK(text.find(", ") == std::string::npos);
}

TEST_CASE("render_query does not double trailing periods") {
  AppSpec spec = camping_spec();
  spec.goal = "Track gear for camping trips.";
  spec.features = {"save lists."};
  const std::string text = render_query(spec);
  CHECK(text.find("- Goal: Track gear for camping trips.\n") != std::string::npos);
  CHECK(text.find("trips..") == std::string::npos);
  CHECK(text.find("lists..") == std::string::npos);
}

TEST_CASE("render_query round-trips through the parse-back oracle") {
  const std::vector<std::string> words = {"alpha", "Beta",  "gamma", "Delta20",
                                          "echo",  "fox y", "grid",  "hud"};
  std::mt19937 rng(20260814);
  auto pick_phrase = [&](int max_words) {
    std::uniform_int_distribution<int> count(1, max_words);
    std::uniform_int_distribution<std::size_t> idx(0, words.size() - 1);
    std::string phrase;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      if (i) phrase += ' ';
      phrase += words[idx(rng)];
    }
    return phrase;
  };
  for (int iter = 0; iter < 300; ++iter) {
    AppSpec spec;
    spec.id = "app";
    spec.name = pick_phrase(3);
    spec.goal = pick_phrase(5);
    spec.theme = pick_phrase(4);
    std::uniform_int_distribution<int> feature_count(1, 5);
    const int n = feature_count(rng);
    for (int i = 0; i < n; ++i) spec.features.push_back(pick_phrase(2));
    const ParsedQuery back = parse_query_back(render_query(spec));
    CHECK(back.name == spec.name);
    CHECK(back.goal == spec.goal);
    CHECK(back.features == spec.features);
    CHECK(back.theme == spec.theme);
  }
}

// ---------------------------------------------------------------------------
// task sets
// ---------------------------------------------------------------------------

TEST_CASE("load_task_set reads the 30-task fixture") {
  std::vector<TaskSetWarning> warnings;
  const std::vector<Task> tasks =
      load_task_set(fixture_path("tasks/meal_planner_tasks.json"), &warnings);
  CHECK(tasks.size() == 30);
  CHECK(warnings.empty());
  CHECK(tasks[0].id == 1);
  CHECK(tasks[0].category == TaskCategory::CoreFunction);
  CHECK(tasks[1].description == "Add five meals to today's plan.");
  CHECK(tasks[29].category == TaskCategory::EdgeCase);
  for (const Task& task : tasks) CHECK(task.enabled);
}

TEST_CASE("parse_task_set warns on an empty tasks array") {
  std::vector<TaskSetWarning> warnings;
  const std::vector<Task> tasks = parse_task_set(R"({"tasks": []})", &warnings);
  CHECK(tasks.empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].message.find("no tasks") != std::string::npos);
}

TEST_CASE("parse_task_set rejects duplicate ids naming both entries") {
  const std::string text = R"({"tasks": [
    {"id": 3, "description": "a", "category": "core_function", "expected_outcome": "x"},
    {"id": 4, "description": "b", "category": "core_function", "expected_outcome": "y"},
    {"id": 3, "description": "c", "category": "edge_case", "expected_outcome": "z"}
  ]})";
  bool threw = false;
  try {
    parse_task_set(text);
  } catch (const ValidationError& e) {
    threw = true;
    const std::string what = e.what();
    CHECK(what.find("duplicate task id 3") != std::string::npos);
    CHECK(what.find("0") != std::string::npos);  // first entry index
    CHECK(what.find("2") != std::string::npos);  // second entry index
  }
  CHECK(threw);
}

TEST_CASE("parse_task_set rejects documents without a tasks array") {
  CHECK_THROWS_AS(parse_task_set("[1, 2, 3]"), ValidationError);
  CHECK_THROWS_AS(parse_task_set(R"({"items": []})"), ValidationError);
  CHECK_THROWS(parse_task_set("not json at all"));
}

TEST_CASE("unknown task fields survive a save/load round-trip") {
  const std::string text = R"({"tasks": [
    {"id": 1, "description": "a", "category": "core_function",
     "expected_outcome": "x", "difficulty": "hard", "hints": [1, 2]}
  ]})";
  const std::vector<Task> tasks = parse_task_set(text);
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].extra_fields.at("difficulty") == "hard");
  CHECK(tasks[0].extra_fields.at("hints") == nlohmann::json({1, 2}));

  const fs::path tmp = fs::temp_directory_path() / "uigym_tasks_roundtrip.json";
  save_task_set(tmp, "App", tasks);
  const std::vector<Task> back = load_task_set(tmp);
  REQUIRE(back.size() == 1);
  CHECK(back[0].extra_fields == tasks[0].extra_fields);
  CHECK(back[0].description == "a");
  fs::remove(tmp);
}

TEST_CASE("disabled tasks are retained and flagged") {
  const std::string text = R"({"tasks": [
    {"id": 1, "description": "a", "category": "core_function",
     "expected_outcome": "x", "enabled": false}
  ]})";
  const std::vector<Task> tasks = parse_task_set(text);
  REQUIRE(tasks.size() == 1);
  CHECK_FALSE(tasks[0].enabled);
}

// ---------------------------------------------------------------------------
// serialization round-trips
// ---------------------------------------------------------------------------

TEST_CASE("json round-trips are byte-identical after one normalization") {
  using nlohmann::json;

  AppSpec spec = camping_spec();
  const std::string s1 = json(spec).dump();
  const std::string s2 = json(json::parse(s1).get<AppSpec>()).dump();
  CHECK(s1 == s2);

  Task task;
  task.id = 7;
  task.description = "desc";
  task.category = TaskCategory::UserWorkflow;
  task.expected_outcome = "outcome";
  task.enabled = false;
  task.extra_fields = json{{"k", "v"}};
  const std::string t1 = json(task).dump();
  const std::string t2 = json(json::parse(t1).get<Task>()).dump();
  CHECK(t1 == t2);

  SolvabilityVerdict verdict;
  verdict.task_id = 7;
  verdict.solvable = true;
  verdict.checker = "#count >= 5";
  const std::string v1 = json(verdict).dump();
  const std::string v2 = json(json::parse(v1).get<SolvabilityVerdict>()).dump();
  CHECK(v1 == v2);

  TaskOutcome outcome;
  outcome.task_id = 7;
  outcome.status = OutcomeStatus::Success;
  outcome.steps_used = 4;
  outcome.trajectory_ref = "rounds/0/trajectories/task_7";
  const std::string o1 = json(outcome).dump();
  const std::string o2 = json(json::parse(o1).get<TaskOutcome>()).dump();
  CHECK(o1 == o2);

  const EnvironmentVersion env = make_environment_version(
      "<!DOCTYPE html><html><body>hi</body></html>", 0, Provenance::Initial);
  const std::string e1 = json(env).dump();
  const std::string e2 = json(json::parse(e1).get<EnvironmentVersion>()).dump();
  CHECK(e1 == e2);
}

TEST_CASE("enum names round-trip") {
  for (DomainTag tag : report_domain_order())
    CHECK(domain_tag_from_string(to_string(tag)) == tag);
  for (TaskCategory c : {TaskCategory::CoreFunction, TaskCategory::UserWorkflow,
                         TaskCategory::EdgeCase})
    CHECK(task_category_from_string(to_string(c)) == c);
  for (Provenance p : {Provenance::Initial, Provenance::SolvabilityRevision,
                       Provenance::NavigationRevision, Provenance::IntegratedRevision})
    CHECK(provenance_from_string(to_string(p)) == p);
  for (OutcomeStatus s : {OutcomeStatus::Success, OutcomeStatus::Failure,
                          OutcomeStatus::UnsolvableSkipped, OutcomeStatus::Error})
    CHECK(outcome_status_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(domain_tag_from_string("bogus"), ValidationError);
}

TEST_CASE("report_domain_order is the fixed report column order") {
  const std::vector<DomainTag> order = report_domain_order();
  REQUIRE(order.size() == 6);
  CHECK(order[0] == DomainTag::Landing);
  CHECK(order[1] == DomainTag::Game);
  CHECK(order[2] == DomainTag::App);
  CHECK(order[3] == DomainTag::Utility);
  CHECK(order[4] == DomainTag::Interactive);
  CHECK(order[5] == DomainTag::Tool);
}

// ---------------------------------------------------------------------------
// environment extraction and versioning
// ---------------------------------------------------------------------------

TEST_CASE("validate_environment strips markdown fences") {
  const std::string reply = read_file(fixture_path("replies/fenced_counter.txt"));
  const EnvironmentVersion env = validate_environment(reply);
  CHECK(env.html.rfind("<!DOCTYPE html>", 0) == 0);
  CHECK(env.html.find("```") == std::string::npos);
  CHECK(env.html.find("</html>") != std::string::npos);
  CHECK(env.round == 0);
  CHECK(env.provenance == Provenance::Initial);
}

TEST_CASE("extract_html_document rejects malformed replies") {
  CHECK_THROWS_AS(extract_html_document("<div>hi</div>"), ValidationError);
  CHECK_THROWS_AS(extract_html_document(""), ValidationError);
  CHECK_THROWS_AS(extract_html_document("<!DOCTYPE html><html><body>"), ValidationError);
  const std::string two_docs =
      "<!DOCTYPE html><html><body>a</body></html>\n"
      "<!DOCTYPE html><html><body>b</body></html>";
  bool threw = false;
  try {
    extract_html_document(two_docs);
  } catch (const ValidationError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("more than one complete document") !=
          std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("extract_html_document keeps trailing prose out of the document") {
  const std::string reply =
      "Here is the app:\n<!DOCTYPE html>\n<html><body>ok</body></html>\nHope it helps!";
  const std::string html = extract_html_document(reply);
  CHECK(html.rfind("<!DOCTYPE html>", 0) == 0);
  CHECK(html.find("Hope it helps") == std::string::npos);
}

TEST_CASE("environment chains are round-monotone") {
  auto e0 = std::make_shared<EnvironmentVersion>(make_environment_version(
      "<!DOCTYPE html><html><body>0</body></html>", 0, Provenance::Initial));
  const EnvironmentVersion e1 = make_environment_version(
      "<!DOCTYPE html><html><body>1</body></html>", 1,
      Provenance::SolvabilityRevision, e0);
  CHECK(e1.parent == e0);
  CHECK(e1.round == 1);
  CHECK_THROWS_AS(make_environment_version(
                      "<!DOCTYPE html><html><body>x</body></html>", 0,
                      Provenance::SolvabilityRevision, e0),
                  ValidationError);
  CHECK_THROWS_AS(make_environment_version(
                      "<!DOCTYPE html><html><body>x</body></html>", -1,
                      Provenance::Initial),
                  ValidationError);
}

// ---------------------------------------------------------------------------
// validation rules
// ---------------------------------------------------------------------------

TEST_CASE("verdict validation ties checkers to solvability") {
  SolvabilityVerdict verdict;
  verdict.task_id = 1;
  verdict.solvable = true;
  CHECK_THROWS_AS(verdict.validate(), ValidationError);
  verdict.checker = "#x exists";
  CHECK_NOTHROW(verdict.validate());
  verdict.solvable = false;
  CHECK_THROWS_AS(verdict.validate(), ValidationError);
  verdict.checker.reset();
  CHECK_NOTHROW(verdict.validate());
}

TEST_CASE("task and outcome validation") {
  Task task;
  task.id = 0;
  task.description = "d";
  task.expected_outcome = "o";
  CHECK_THROWS_AS(task.validate(), ValidationError);
  task.id = 1;
  CHECK_NOTHROW(task.validate());
  task.description.clear();
  CHECK_THROWS_AS(task.validate(), ValidationError);

  TaskOutcome outcome;
  outcome.task_id = 1;
  outcome.steps_used = -1;
  CHECK_THROWS_AS(outcome.validate(), ValidationError);
  outcome.steps_used = 0;
  CHECK_NOTHROW(outcome.validate());
}
