#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "cpsarch/catalog.hpp"
#include "cpsarch/model.hpp"

namespace cpsarch {

/// Type-aggregated flow graph: one node per block type, one weighted edge
/// per (source type, destination type) pair of connections.
struct FlowGraph {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, long long> edges;
  std::set<std::string> excluded_types;

  long long total_weight() const {
    long long sum = 0;
    for (const auto& [edge, w] : edges) sum += w;
    return sum;
  }

  friend bool operator==(const FlowGraph&, const FlowGraph&) = default;
};

struct FlowGraphOptions {
  /// Keep only connections with at least one relevant endpoint; block types
  /// that are irrelevant and touch no kept connection drop out.
  bool relevant_only = false;
  /// Drop Inport/Outport blocks and every connection touching them. A
  /// connection crossing a subsystem boundary through a port simply
  /// disappears; it is not re-stitched end to end.
  bool exclude_ports = false;
};

FlowGraph build_flow_graph(const Model& model, const CatalogTable& table,
                           const FlowGraphOptions& options);

/// Graphviz digraph, lexicographically ordered statements, edge penwidth
/// proportional to weight (weight 1 -> 1.0). Byte-deterministic.
std::string emit_dot(const FlowGraph& graph);

/// JSON form with sorted node and edge arrays; round-trips through
/// load_flow_graph.
std::string emit_json(const FlowGraph& graph);

FlowGraph load_flow_graph(std::string_view bytes);

}  // namespace cpsarch
