// cpsarch: command-line front end for block-diagram architecture analysis
// and STL falsification. Exit codes: 0 success, 2 usage/input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpsarch/catalog.hpp"
#include "cpsarch/falsify.hpp"
#include "cpsarch/flowgraph.hpp"
#include "cpsarch/json_io.hpp"
#include "cpsarch/metrics.hpp"
#include "cpsarch/model.hpp"
#include "cpsarch/slx.hpp"
#include "cpsarch/stl.hpp"
#include "cpsarch/trace.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& output_path, const std::string& data) {
  if (output_path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + output_path + "'");
  }
  out << data;
}

cpsarch::Model load_model(const fs::path& path) {
  if (path.extension() == ".slx") {
    return cpsarch::parse_slx(path);
  }
  return cpsarch::parse_json_model(read_file(path));
}

/// Catalog resolution order: --catalog flag, CPSARCH_CATALOG env var,
/// compiled-in default.
cpsarch::CatalogTable resolve_catalog(const std::string& flag_path) {
  if (!flag_path.empty()) {
    return cpsarch::load_catalog(read_file(flag_path));
  }
  if (const char* env = std::getenv("CPSARCH_CATALOG")) {
    if (*env != '\0') return cpsarch::load_catalog(read_file(env));
  }
  return cpsarch::builtin_catalog();
}

cpsarch::MetricsRow parse_values_row(const json& j, const std::string& where) {
  cpsarch::MetricsRow row;
  auto get = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw cpsarch::SchemaError("corpus manifest: entry '" + where +
                                 "' lacks numeric '" + key + "'");
    }
    return j[key].get<long long>();
  };
  row.total_bc = get("Total BC");
  row.relevant_bc = get("Relevant BC");
  row.total_cc = get("Total CC");
  row.relevant_cc = get("Relevant CC");
  row.hd = static_cast<int>(get("HD"));
  return row;
}

int cmd_analyze(const std::string& model_path, const std::string& catalog,
                const std::string& format, const std::string& output) {
  cpsarch::Model model = load_model(model_path);
  cpsarch::CatalogTable table = resolve_catalog(catalog);
  cpsarch::MetricsReport report = cpsarch::compute_metrics(model, table);
  write_output(output, format == "csv"
                           ? cpsarch::metrics_to_csv(report, model.name)
                           : cpsarch::metrics_to_json(report, model.name));
  return 0;
}

int cmd_compare(const std::string& ai_path, const std::string& trad_path,
                const std::string& catalog, const std::string& format,
                const std::string& output) {
  cpsarch::Model ai = load_model(ai_path);
  cpsarch::Model trad = load_model(trad_path);
  cpsarch::CatalogTable table = resolve_catalog(catalog);
  cpsarch::DifferenceReport report = cpsarch::difference(ai, trad, table);
  write_output(output, format == "csv" ? cpsarch::difference_to_csv(report)
                                       : cpsarch::difference_to_json(report));
  return 0;
}

int cmd_corpus(const std::string& manifest_path, const std::string& catalog,
               const std::string& format, const std::string& output) {
  json manifest = json::parse(read_file(manifest_path));
  if (!manifest.is_object() || !manifest.contains("systems") ||
      !manifest["systems"].is_array()) {
    throw cpsarch::SchemaError("corpus manifest: needs a 'systems' array");
  }
  const bool values_only =
      manifest.contains("values_only") && manifest["values_only"].is_boolean()
          ? manifest["values_only"].get<bool>()
          : false;
  const fs::path base = fs::path(manifest_path).parent_path();

  std::vector<cpsarch::CorpusEntry> rows;
  std::optional<cpsarch::CatalogTable> table;
  for (const json& entry : manifest["systems"]) {
    if (!entry.is_object() || !entry.contains("id") ||
        !entry.contains("traditional") || !entry.contains("ai")) {
      throw cpsarch::SchemaError(
          "corpus manifest: entries need id, traditional, ai");
    }
    cpsarch::CorpusEntry row;
    row.system_id = entry["id"].get<std::string>();
    if (values_only) {
      row.traditional = parse_values_row(entry["traditional"], row.system_id);
      row.ai = parse_values_row(entry["ai"], row.system_id);
    } else {
      if (!table) table = resolve_catalog(catalog);
      auto resolve = [&base](const std::string& p) {
        fs::path path(p);
        return path.is_absolute() ? path : base / path;
      };
      cpsarch::Model trad =
          load_model(resolve(entry["traditional"].get<std::string>()));
      cpsarch::Model ai = load_model(resolve(entry["ai"].get<std::string>()));
      row.traditional = cpsarch::row_of(cpsarch::compute_metrics(trad, *table));
      row.ai = cpsarch::row_of(cpsarch::compute_metrics(ai, *table));
    }
    rows.push_back(std::move(row));
  }

  cpsarch::CorpusAggregate aggregate =
      cpsarch::aggregate_corpus(std::move(rows));
  write_output(output, format == "json" ? cpsarch::corpus_to_json(aggregate)
                                        : cpsarch::corpus_to_csv(aggregate));
  return 0;
}

int cmd_graph(const std::string& model_path, const std::string& catalog,
              bool relevant_only, bool exclude_ports,
              const std::string& format, const std::string& output) {
  cpsarch::Model model = load_model(model_path);
  cpsarch::CatalogTable table = resolve_catalog(catalog);
  cpsarch::FlowGraph graph = cpsarch::build_flow_graph(
      model, table, {relevant_only, exclude_ports});
  write_output(output, format == "json" ? cpsarch::emit_json(graph)
                                        : cpsarch::emit_dot(graph));
  return 0;
}

int cmd_stl_check(const std::string& trace_path,
                  const std::string& requirement_id,
                  const std::string& formula_text,
                  const std::string& output) {
  cpsarch::Trace trace = cpsarch::read_trace_csv(read_file(trace_path));

  cpsarch::stl::StlFormula formula;
  if (!requirement_id.empty()) {
    const auto& reqs = cpsarch::stl::builtin_requirements();
    auto it = reqs.find(requirement_id);
    if (it == reqs.end()) {
      throw cpsarch::SchemaError("no builtin requirement '" + requirement_id +
                                 "'");
    }
    formula = it->second.formula;
  } else {
    cpsarch::stl::SignalDeclarations decls;
    for (const auto& [name, series] : trace.signals) decls.push_back({name, ""});
    formula = cpsarch::stl::parse_stl(formula_text, decls);
  }

  cpsarch::stl::CheckResult result = cpsarch::stl::check(formula, trace);
  json doc;
  switch (result.verdict) {
    case cpsarch::stl::Verdict::Satisfied:
      doc["verdict"] = "Satisfied";
      break;
    case cpsarch::stl::Verdict::Violated:
      doc["verdict"] = "Violated";
      break;
    case cpsarch::stl::Verdict::Boundary:
      doc["verdict"] = "Boundary";
      break;
  }
  doc["robustness"] = result.robustness;
  write_output(output, doc.dump(2) + "\n");
  return 0;
}

int cmd_falsify(const std::string& config_path, const std::string& format,
                const std::string& output, bool timing) {
  cpsarch::CampaignConfig config =
      cpsarch::parse_campaign_config(read_file(config_path));
  if (!config.sut_file.empty()) {
    fs::path p(config.sut_file);
    if (!p.is_absolute()) {
      config.sut_file = (fs::path(config_path).parent_path() / p).string();
    }
  }
  cpsarch::ResolvedCampaign campaign = cpsarch::resolve_campaign(config);
  cpsarch::CampaignResult result =
      cpsarch::run_campaign(*campaign.sut, campaign.formula, campaign.input,
                            campaign.schedule, campaign.executions);
  write_output(output,
               format == "csv"
                   ? cpsarch::campaign_to_csv(campaign, result, timing)
                   : cpsarch::campaign_to_json(campaign, result, timing));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-diagram architecture metrics and STL falsification"};
  app.require_subcommand(1);

  std::string model_path, second_path, catalog_path, output_path;
  std::string format_json = "json";
  std::string format_csv = "csv";
  std::string format_dot = "dot";
  bool relevant_only = false, exclude_ports = false, timing = false;
  std::string requirement_id, formula_text, trace_path;

  auto* analyze = app.add_subcommand(
      "analyze", "Compute block/connection/depth metrics for one model");
  analyze->add_option("model", model_path, "model file (.json or .slx)")
      ->required();
  analyze->add_option("--catalog", catalog_path, "catalog JSON override");
  analyze->add_option("--format", format_json, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--output", output_path, "output file (default stdout)");

  auto* compare = app.add_subcommand(
      "compare", "Per-block-type difference between an AI-driven and a "
                 "traditional model (AI minus traditional)");
  compare->add_option("ai_model", model_path, "AI-driven model")->required();
  compare->add_option("trad_model", second_path, "traditional model")
      ->required();
  compare->add_option("--catalog", catalog_path, "catalog JSON override");
  compare->add_option("--format", format_json, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  compare->add_option("--output", output_path, "output file");

  auto* corpus = app.add_subcommand(
      "corpus", "Aggregate paired traditional/AI metrics over a manifest");
  corpus->add_option("manifest", model_path, "manifest JSON")->required();
  corpus->add_option("--catalog", catalog_path, "catalog JSON override");
  corpus->add_option("--format", format_csv, "csv|json")
      ->check(CLI::IsMember({"json", "csv"}));
  corpus->add_option("--output", output_path, "output file");

  auto* graph = app.add_subcommand(
      "graph", "Emit the type-aggregated flow graph of a model");
  graph->add_option("model", model_path, "model file (.json or .slx)")
      ->required();
  graph->add_option("--catalog", catalog_path, "catalog JSON override");
  graph->add_flag("--relevant-only", relevant_only,
                  "keep only connections with a relevant endpoint");
  graph->add_flag("--exclude-ports", exclude_ports,
                  "drop Inport/Outport blocks and their connections");
  graph->add_option("--format", format_dot, "dot|json")
      ->check(CLI::IsMember({"dot", "json"}));
  graph->add_option("--output", output_path, "output file");

  auto* stl_check = app.add_subcommand(
      "stl-check", "Robustness of an STL requirement over a trace CSV");
  stl_check->add_option("--trace", trace_path, "trace CSV (time,<signal>...)")
      ->required();
  auto* req_opt = stl_check->add_option("--requirement", requirement_id,
                                        "builtin requirement id");
  stl_check->add_option("--formula", formula_text,
                        "inline STL over the trace signals")
      ->excludes(req_opt);
  stl_check->add_option("--output", output_path, "output file");

  auto* falsify = app.add_subcommand(
      "falsify", "Run a simulated-annealing falsification campaign");
  falsify->add_option("config", model_path, "campaign config JSON")
      ->required();
  falsify->add_option("--format", format_json, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  falsify->add_option("--output", output_path, "output file");
  falsify->add_flag("--timing", timing,
                    "include wall-time fields (reruns stop being "
                    "byte-identical)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(analyze)) {
      return cmd_analyze(model_path, catalog_path, format_json, output_path);
    }
    if (app.got_subcommand(compare)) {
      return cmd_compare(model_path, second_path, catalog_path, format_json,
                         output_path);
    }
    if (app.got_subcommand(corpus)) {
      return cmd_corpus(model_path, catalog_path, format_csv, output_path);
    }
    if (app.got_subcommand(graph)) {
      return cmd_graph(model_path, catalog_path, relevant_only, exclude_ports,
                       format_dot, output_path);
    }
    if (app.got_subcommand(stl_check)) {
      if (requirement_id.empty() && formula_text.empty()) {
        std::cerr << "stl-check: need --requirement or --formula\n";
        return 2;
      }
      return cmd_stl_check(trace_path, requirement_id, formula_text,
                           output_path);
    }
    if (app.got_subcommand(falsify)) {
      return cmd_falsify(model_path, format_json, output_path, timing);
    }
  } catch (const std::exception& e) {
    std::cerr << "cpsarch: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
