#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vdgslice/vdg.hpp"

namespace vdgslice {

enum class Direction { Goal, Start };
enum class Marker { Normal, RedundantRef, CycleCut, BoundaryCut };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view s);
std::string_view marker_name(Marker m);

inline constexpr std::uint32_t kNoTreeNode = 0xffffffffu;
inline constexpr std::size_t kDefaultTreeLimit = 500000;

struct TreeNode {
  NodeIndex vdg_node = kNoNode;
  std::optional<EdgeKind> edge;  // absent at the root
  std::uint32_t parent = kNoTreeNode;
  std::uint32_t depth = 0;
  std::vector<std::uint32_t> children;
  Marker marker = Marker::Normal;
  std::uint32_t ref_target = kNoTreeNode;  // RedundantRef only
};

/// Nodes are stored in preorder; nodes[0] is the root.
struct DepTree {
  Direction direction = Direction::Goal;
  bool folded = false;
  std::vector<TreeNode> nodes;

  std::size_t node_count() const { return nodes.size(); }
};

/// Depth-first expansion over incoming (goal) or outgoing (start) edges.
/// Children are ordered by edge kind, then by node id. A node repeating on
/// the current root path becomes a cycle-cut leaf. Throws UnknownNode or
/// TreeTooLarge.
DepTree extract_tree(const Vdg& vdg, NodeIndex root, Direction direction, std::size_t limit = kDefaultTreeLimit);
DepTree extract_goal_tree(const Vdg& vdg, NodeIndex root, std::size_t limit = kDefaultTreeLimit);
DepTree extract_start_tree(const Vdg& vdg, NodeIndex root, std::size_t limit = kDefaultTreeLimit);

/// Replaces every repeated subtree that has children with a reference to
/// its first occurrence in preorder.
DepTree fold_redundant(const DepTree& tree);
DepTree unfold(const DepTree& tree);

/// Copies `tree` keeping only nodes for which `keep_children` allows
/// descent; nodes refused descent stay as leaves with `marker`.
DepTree prune(const DepTree& tree, const std::function<bool(const TreeNode&)>& keep_children, Marker marker);

struct FunctionGroup {
  std::uint32_t path = 0;
  TraceId trace = 0;
  SymbolId function = kNoSymbol;
  std::vector<std::uint32_t> members;  // tree node indices, preorder
};

struct GroupedTree {
  std::vector<FunctionGroup> groups;                       // first appearance order
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // parent group -> child group
  std::vector<std::uint32_t> group_of;                      // per tree node
};

GroupedTree gather_by_function(const DepTree& tree, const Vdg& vdg);

/// One line per node: indentation, edge-kind letter ('r' at the root),
/// node id and marker.
std::string export_tree_text(const DepTree& tree, const Vdg& vdg);

}  // namespace vdgslice
