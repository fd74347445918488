#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "support/paths.hpp"
#include "support/subprocess.hpp"

using nlohmann::json;
using testsupport::run_command;

namespace {

std::string cli() { return CPSARCH_CLI_PATH; }

std::string fixture(const std::string& name) {
  return testsupport::fixture_path(name);
}

}  // namespace

TEST_CASE("analyze: nested6 reports depth 7") {
  auto result =
      run_command(cli() + " analyze " + fixture("nested6.json"));
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["HD"] == 7);
  CHECK(doc["Total BC"] == 11);
}

TEST_CASE("analyze: missing file exits 2") {
  CHECK(run_command(cli() + " analyze /no/such/file.json").exit_code == 2);
}

TEST_CASE("analyze: empty model succeeds with zero counts") {
  auto result = run_command(cli() + " analyze " + fixture("empty.json"));
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["Total BC"] == 0);
  CHECK(doc["HD"] == 1);
}

TEST_CASE("analyze: malformed model exits 2") {
  auto result = run_command(cli() + " analyze " +
                            fixture("tablev_values.json"));
  CHECK(result.exit_code == 2);
}

TEST_CASE("compare: model against itself is all zeros") {
  auto result = run_command(cli() + " compare " + fixture("accsim.json") +
                            " " + fixture("accsim.json"));
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  for (const auto& [type, diff] : doc["per_block_type"].items()) {
    CHECK(diff.get<long long>() == 0);
  }
}

TEST_CASE("compare: swapping arguments negates the report") {
  auto ai_first = run_command(cli() + " compare " + fixture("pair_ai.json") +
                              " " + fixture("pair_trad.json"));
  auto trad_first = run_command(cli() + " compare " +
                                fixture("pair_trad.json") + " " +
                                fixture("pair_ai.json"));
  REQUIRE(ai_first.exit_code == 0);
  REQUIRE(trad_first.exit_code == 0);
  json a = json::parse(ai_first.output);
  json b = json::parse(trad_first.output);
  CHECK(a["per_block_type"]["Integrator"] == 2);
  CHECK(b["per_block_type"]["Integrator"] == -2);
  for (const auto& [type, diff] : a["per_block_type"].items()) {
    CHECK(diff.get<long long>() ==
          -b["per_block_type"][type].get<long long>());
  }
}

TEST_CASE("corpus: values-only manifest reproduces the average row") {
  auto result =
      run_command(cli() + " corpus " + fixture("tablev_values.json"));
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("Average,T,288.75,116.50,306.00,274.25,6.38") !=
        std::string::npos);
  CHECK(result.output.find("Average,AI,349.13,141.50,350.13,312.00,7.75") !=
        std::string::npos);
}

TEST_CASE("corpus: model-file manifest") {
  std::string manifest = testsupport::scratch_path("pair_manifest.json");
  {
    std::ofstream out(manifest);
    out << R"({"systems":[{"id":"pair","traditional":")"
        << fixture("pair_trad.json")
        << R"(","ai":")" << fixture("pair_ai.json") << R"("}]})";
  }
  auto result = run_command(cli() + " corpus " + manifest);
  REQUIRE(result.exit_code == 0);
  // pair_trad: 4 blocks / 3 relevant; pair_ai: 8 blocks / 7 relevant
  CHECK(result.output.find("pair,T,4,3,3,3,1") != std::string::npos);
  CHECK(result.output.find("pair,AI,8,7,8,8,1") != std::string::npos);
}

TEST_CASE("corpus: empty manifest exits 2") {
  std::string manifest = testsupport::scratch_path("empty_manifest.json");
  {
    std::ofstream out(manifest);
    out << R"({"systems":[]})";
  }
  CHECK(run_command(cli() + " corpus " + manifest).exit_code == 2);
}

TEST_CASE("corpus: unreadable entry fails fast with exit 2") {
  std::string manifest = testsupport::scratch_path("broken_manifest.json");
  {
    std::ofstream out(manifest);
    out << R"({"systems":[{"id":"x","traditional":"missing_t.json",)"
        << R"("ai":"missing_a.json"}]})";
  }
  CHECK(run_command(cli() + " corpus " + manifest).exit_code == 2);
}

TEST_CASE("graph: dot output lists the aggregated edge") {
  auto result = run_command(cli() + " graph " + fixture("nested6.json"));
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.rfind("digraph {", 0) == 0);
  CHECK(result.output.find("\"Inport\" -> \"Gain\"") != std::string::npos);
}

TEST_CASE("graph: exclude-ports drops the port edge") {
  auto result = run_command(cli() + " graph " + fixture("nested6.json") +
                            " --exclude-ports");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("\"Inport\"") == std::string::npos);
}

TEST_CASE("stl-check: builtin requirement over the steady trace") {
  auto result = run_command(cli() + " stl-check --trace " +
                            fixture("sc_trace.csv") + " --requirement SC");
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["verdict"] == "Satisfied");
  CHECK(doc["robustness"].get<double>() == 0.25);
}

TEST_CASE("stl-check: inline formula over trace columns") {
  auto result = run_command(cli() + " stl-check --trace " +
                            fixture("sc_trace.csv") +
                            " --formula 'G[0,35] (pressure > 90)'");
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["verdict"] == "Violated");
}

TEST_CASE("stl-check: formula naming an absent signal exits 2") {
  auto result = run_command(cli() + " stl-check --trace " +
                            fixture("sc_trace.csv") +
                            " --formula 'G[0,35] (speed > 90)'");
  CHECK(result.exit_code == 2);
}

TEST_CASE("stl-check: needs a requirement or formula") {
  CHECK(run_command(cli() + " stl-check --trace " +
                    fixture("sc_trace.csv")).exit_code == 2);
}

TEST_CASE("falsify: single-iteration run on an always-violated formula") {
  std::string config = testsupport::scratch_path("quick_falsify.json");
  {
    std::ofstream out(config);
    out << R"js({"sut": "sc-pid", "formula": "G[0,35] (pressure < -1000000000)",)js"
        << R"js("schedule": {"max_iterations": 1, "seed": 5},)js"
        << R"js("executions": 1})js";
  }
  auto result = run_command(cli() + " falsify " + config);
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["violated_executions"] == 1);
  CHECK(doc["falsified"] == true);
  CHECK(doc["results"][0]["iterations_used"] == 1);
  CHECK_FALSE(doc.contains("avg_time_seconds"));
}

TEST_CASE("falsify: requirement with undeclared signal exits 2") {
  std::string config = testsupport::scratch_path("bad_falsify.json");
  {
    std::ofstream out(config);
    out << R"({"sut": "sc-pid", "requirement": "WT1",)"
        << R"("executions": 1})";
  }
  CHECK(run_command(cli() + " falsify " + config).exit_code == 2);
}

TEST_CASE("unknown subcommand exits 2") {
  CHECK(run_command(cli() + " frobnicate").exit_code == 2);
  CHECK(run_command(cli()).exit_code == 2);
}

TEST_CASE("help exits 0") {
  CHECK(run_command(cli() + " --help").exit_code == 0);
  CHECK(run_command(cli() + " analyze --help").exit_code == 0);
}

TEST_CASE("catalog override via flag changes relevance") {
  std::string catalog = testsupport::scratch_path("tiny_catalog.json");
  {
    std::ofstream out(catalog);
    out << R"({"Gain":"C5"})";
  }
  auto result = run_command(cli() + " analyze " + fixture("nested6.json") +
                            " --catalog " + catalog);
  REQUIRE(result.exit_code == 0);
  json doc = json::parse(result.output);
  CHECK(doc["Relevant BC"] == 1);  // only the Gain remains relevant
}

TEST_CASE("catalog override via environment variable") {
  std::string catalog = testsupport::scratch_path("tiny_catalog.json");
  auto result = run_command("CPSARCH_CATALOG=" + catalog + " " + cli() +
                            " analyze " + fixture("nested6.json"));
  REQUIRE(result.exit_code == 0);
  CHECK(json::parse(result.output)["Relevant BC"] == 1);
}
