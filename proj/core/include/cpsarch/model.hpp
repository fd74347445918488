#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cpsarch {

/// Parent marker for blocks that live directly in the top-level system.
inline constexpr std::string_view kRootId = "__root__";

/// The block type that may contain other blocks.
inline constexpr std::string_view kSubsystemType = "SubSystem";

/// One block of a block-diagram model. Identity is the explicit `id`:
/// display names collide across subsystems, ids do not.
struct Block {
  std::string id;
  std::string name;
  std::string block_type;
  std::string parent;  // id of a SubSystem block, or kRootId
  std::map<std::string, std::string> params;  // opaque pass-through

  bool is_subsystem() const { return block_type == kSubsystemType; }
  friend bool operator==(const Block&, const Block&) = default;
};

/// Directed signal connection between two block ports.
struct Connection {
  std::string src_block;
  int src_port = 0;
  std::string dst_block;
  int dst_port = 0;

  friend auto operator<=>(const Connection&, const Connection&) = default;
};

/// A hierarchical block-diagram model. Immutable by convention once built;
/// all analyses take it by const reference.
struct Model {
  std::string name;
  std::vector<Block> blocks;
  std::vector<Connection> connections;

  /// nullptr when no block carries that id.
  const Block* find_block(std::string_view id) const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Equality up to block/connection ordering (blocks keyed by id,
/// connections by their full tuple). This is the round-trip contract of
/// the serializers, which emit canonical sorted order.
bool structurally_equal(const Model& a, const Model& b);

struct Violation {
  std::string kind;     // stable machine-readable tag, see validate()
  std::string subject;  // offending block id / connection description
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every model invariant and reports all violations (never throws).
/// Violation kinds: "duplicate id", "bad parent", "dangling endpoint",
/// "duplicate connection", "containment not a tree".
ValidationReport validate(const Model& model);

/// Node of the subsystem containment tree. The root is virtual (kRootId)
/// and has depth 1; children are sorted by block id.
struct SubsystemNode {
  std::string block;
  int depth = 1;
  std::vector<SubsystemNode> children;

  friend bool operator==(const SubsystemNode&, const SubsystemNode&) = default;
};

class InvalidModel : public std::runtime_error {
 public:
  explicit InvalidModel(const std::string& what) : std::runtime_error(what) {}
};

class UnknownSubsystem : public std::runtime_error {
 public:
  explicit UnknownSubsystem(const std::string& what)
      : std::runtime_error(what) {}
};

/// Builds the containment tree of a valid model. Every SubSystem block
/// appears exactly once; each child's depth is its parent's depth + 1.
/// Throws InvalidModel when validate(model) is non-empty.
SubsystemNode subsystem_tree(const Model& model);

/// Maximum depth over the subsystem tree (>= 1).
int tree_depth(const SubsystemNode& root);

/// Blocks whose containment chain passes through `subtree.block`. For the
/// root node this is every block of the model. The subsystem block itself
/// is not part of its own subtree. Throws UnknownSubsystem when the node
/// does not name the root or a SubSystem block of the model.
std::vector<Block> blocks_in(const Model& model, const SubsystemNode& subtree);

}  // namespace cpsarch
