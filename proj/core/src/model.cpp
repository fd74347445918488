#include "cpsarch/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace cpsarch {

const Block* Model::find_block(std::string_view id) const {
  for (const Block& b : blocks) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

bool structurally_equal(const Model& a, const Model& b) {
  if (a.name != b.name) return false;
  auto sorted_blocks = [](const Model& m) {
    std::vector<Block> out = m.blocks;
    std::sort(out.begin(), out.end(),
              [](const Block& x, const Block& y) { return x.id < y.id; });
    return out;
  };
  auto sorted_connections = [](const Model& m) {
    std::vector<Connection> out = m.connections;
    std::sort(out.begin(), out.end());
    return out;
  };
  return sorted_blocks(a) == sorted_blocks(b) &&
         sorted_connections(a) == sorted_connections(b);
}

namespace {

std::string describe(const Connection& c) {
  std::ostringstream os;
  os << c.src_block << ':' << c.src_port << " -> " << c.dst_block << ':'
     << c.dst_port;
  return os.str();
}

}  // namespace

ValidationReport validate(const Model& model) {
  ValidationReport report;
  auto add = [&report](std::string kind, std::string subject,
                       std::string message) {
    report.violations.push_back(
        {std::move(kind), std::move(subject), std::move(message)});
  };

  std::unordered_map<std::string_view, const Block*> by_id;
  for (const Block& b : model.blocks) {
    auto [it, inserted] = by_id.emplace(b.id, &b);
    if (!inserted) {
      add("duplicate id", b.id, "block id occurs more than once");
    }
  }

  for (const Block& b : model.blocks) {
    if (b.parent == kRootId) continue;
    auto it = by_id.find(b.parent);
    if (it == by_id.end()) {
      add("bad parent", b.id, "parent '" + b.parent + "' does not exist");
    } else if (!it->second->is_subsystem()) {
      add("bad parent", b.id,
          "parent '" + b.parent + "' is not a " + std::string(kSubsystemType));
    }
  }

  std::set<std::tuple<std::string, int, std::string, int>> seen_edges;
  for (const Connection& c : model.connections) {
    if (!by_id.contains(c.src_block)) {
      add("dangling endpoint", describe(c),
          "src block '" + c.src_block + "' does not exist");
    }
    if (!by_id.contains(c.dst_block)) {
      add("dangling endpoint", describe(c),
          "dst block '" + c.dst_block + "' does not exist");
    }
    if (!seen_edges.emplace(c.src_block, c.src_port, c.dst_block, c.dst_port)
             .second) {
      add("duplicate connection", describe(c),
          "connection tuple occurs more than once");
    }
  }

  // Containment must reach the root without revisiting a block. Each block
  // has one parent edge, so walking the chain and revisiting a node means a
  // cycle. One violation per distinct cycle; blocks with a reported bad
  // parent terminate their chain there, the problem is already on record.
  std::unordered_set<std::string_view> resolved;
  std::unordered_set<std::string_view> on_cycle;
  for (const Block& b : model.blocks) {
    std::vector<std::string_view> chain;
    std::unordered_set<std::string_view> in_chain;
    const Block* cur = &b;
    while (cur->parent != kRootId) {
      chain.push_back(cur->id);
      in_chain.insert(cur->id);
      if (resolved.contains(cur->id)) break;
      auto it = by_id.find(cur->parent);
      if (it == by_id.end() || !it->second->is_subsystem()) break;
      cur = it->second;
      if (in_chain.contains(cur->id)) {
        auto first = std::find(chain.begin(), chain.end(), cur->id);
        std::vector<std::string_view> cycle(first, chain.end());
        if (!on_cycle.contains(cur->id)) {
          for (std::string_view id : cycle) on_cycle.insert(id);
          add("containment not a tree",
              std::string(*std::min_element(cycle.begin(), cycle.end())),
              "subsystem containment contains a cycle");
        }
        break;
      }
    }
    for (std::string_view id : chain) resolved.insert(id);
  }

  return report;
}

namespace {

SubsystemNode build_node(
    const std::string& id, int depth,
    const std::map<std::string, std::vector<std::string>>& children_of) {
  SubsystemNode node{id, depth, {}};
  auto it = children_of.find(id);
  if (it != children_of.end()) {
    for (const std::string& child : it->second) {
      node.children.push_back(build_node(child, depth + 1, children_of));
    }
  }
  return node;
}

}  // namespace

SubsystemNode subsystem_tree(const Model& model) {
  ValidationReport report = validate(model);
  if (!report.ok()) {
    throw InvalidModel("model '" + model.name + "' is not well-formed: " +
                       report.violations.front().kind + " (" +
                       report.violations.front().subject + ")");
  }

  // Map each subsystem (and the root) to its directly contained subsystems,
  // sorted by id for a deterministic tree.
  std::map<std::string, std::vector<std::string>> children_of;
  for (const Block& b : model.blocks) {
    if (b.is_subsystem()) {
      children_of[b.parent].push_back(b.id);
    }
  }
  for (auto& [parent, kids] : children_of) {
    std::sort(kids.begin(), kids.end());
  }

  return build_node(std::string(kRootId), 1, children_of);
}

int tree_depth(const SubsystemNode& root) {
  int depth = root.depth;
  for (const SubsystemNode& child : root.children) {
    depth = std::max(depth, tree_depth(child));
  }
  return depth;
}

std::vector<Block> blocks_in(const Model& model, const SubsystemNode& subtree) {
  if (subtree.block != kRootId) {
    const Block* b = model.find_block(subtree.block);
    if (b == nullptr || !b->is_subsystem()) {
      throw UnknownSubsystem("no subsystem with id '" + subtree.block + "'");
    }
  }

  std::unordered_map<std::string_view, const Block*> by_id;
  for (const Block& b : model.blocks) by_id.emplace(b.id, &b);

  std::vector<Block> result;
  for (const Block& b : model.blocks) {
    if (subtree.block == kRootId) {
      result.push_back(b);
      continue;
    }
    for (const Block* cur = &b; cur->parent != kRootId;) {
      if (cur->parent == subtree.block) {
        result.push_back(b);
        break;
      }
      cur = by_id.at(cur->parent);
    }
  }
  return result;
}

}  // namespace cpsarch
