#include "cpsarch/flowgraph.hpp"

#include <sstream>

#include <json.hpp>

#include "cpsarch/errors.hpp"

namespace cpsarch {

using nlohmann::json;

namespace {

bool is_port_type(std::string_view type) {
  return type == "Inport" || type == "Outport";
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

FlowGraph build_flow_graph(const Model& model, const CatalogTable& table,
                           const FlowGraphOptions& options) {
  FlowGraph graph;
  if (options.exclude_ports) {
    graph.excluded_types = {"Inport", "Outport"};
  }

  std::map<std::string_view, const Block*> by_id;
  for (const Block& b : model.blocks) by_id.emplace(b.id, &b);

  auto dropped = [&](const Block& b) {
    return options.exclude_ports && is_port_type(b.block_type);
  };
  auto relevant = [&](const Block& b) {
    return relevance(b.block_type, table) == RelevanceClass::Relevant;
  };

  for (const Connection& c : model.connections) {
    const Block& src = *by_id.at(c.src_block);
    const Block& dst = *by_id.at(c.dst_block);
    if (dropped(src) || dropped(dst)) continue;
    if (options.relevant_only && !relevant(src) && !relevant(dst)) continue;
    ++graph.edges[{src.block_type, dst.block_type}];
    graph.nodes.insert(src.block_type);
    graph.nodes.insert(dst.block_type);
  }

  for (const Block& b : model.blocks) {
    if (dropped(b)) continue;
    if (options.relevant_only && !relevant(b)) continue;
    graph.nodes.insert(b.block_type);
  }

  return graph;
}

std::string emit_dot(const FlowGraph& graph) {
  std::ostringstream os;
  os << "digraph {\n";
  for (const std::string& node : graph.nodes) {
    os << "  " << dot_quote(node) << ";\n";
  }
  for (const auto& [edge, weight] : graph.edges) {
    double penwidth = static_cast<double>(weight);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", penwidth);
    os << "  " << dot_quote(edge.first) << " -> " << dot_quote(edge.second)
       << " [weight=" << weight << ", penwidth=" << buf << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string emit_json(const FlowGraph& graph) {
  json doc;
  doc["nodes"] = graph.nodes;
  json edges = json::array();
  for (const auto& [edge, weight] : graph.edges) {
    edges.push_back(
        {{"src", edge.first}, {"dst", edge.second}, {"weight", weight}});
  }
  doc["edges"] = std::move(edges);
  doc["excluded_types"] = graph.excluded_types;
  return doc.dump(2) + "\n";
}

FlowGraph load_flow_graph(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("flow graph: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
    throw SchemaError("flow graph: expected object with nodes and edges");
  }

  FlowGraph graph;
  for (const json& n : doc["nodes"]) {
    if (!n.is_string()) throw SchemaError("flow graph: nodes must be strings");
    graph.nodes.insert(n.get<std::string>());
  }
  for (const json& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("src") || !e.contains("dst") ||
        !e.contains("weight")) {
      throw SchemaError("flow graph: edge entries need src, dst, weight");
    }
    long long w = e["weight"].get<long long>();
    if (w < 1) throw SchemaError("flow graph: edge weights must be >= 1");
    graph.edges[{e["src"].get<std::string>(), e["dst"].get<std::string>()}] =
        w;
  }
  if (doc.contains("excluded_types")) {
    for (const json& t : doc["excluded_types"]) {
      graph.excluded_types.insert(t.get<std::string>());
    }
  }
  for (const auto& [edge, w] : graph.edges) {
    if (!graph.nodes.contains(edge.first) ||
        !graph.nodes.contains(edge.second)) {
      throw SchemaError("flow graph: edge endpoint missing from nodes");
    }
  }
  return graph;
}

}  // namespace cpsarch
