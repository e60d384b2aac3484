#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "vdgslice/errors.hpp"
#include "vdgslice/trees.hpp"

namespace vdgslice {

std::string_view direction_name(Direction d) { return d == Direction::Goal ? "goal" : "start"; }

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "goal") return Direction::Goal;
  if (s == "start") return Direction::Start;
  return std::nullopt;
}

std::string_view marker_name(Marker m) {
  switch (m) {
    case Marker::Normal: return "normal";
    case Marker::RedundantRef: return "redundant-ref";
    case Marker::CycleCut: return "cycle-cut";
    case Marker::BoundaryCut: return "boundary-cut";
  }
  return "?";
}

namespace {

struct Step {
  NodeIndex node;
  EdgeKind kind;
};

std::vector<Step> neighbours(const Vdg& vdg, NodeIndex n, Direction dir) {
  std::vector<Step> out;
  const auto& list = dir == Direction::Goal ? vdg.in_edges(n) : vdg.out_edges(n);
  out.reserve(list.size());
  for (std::uint32_t e : list) {
    const VdgEdge& edge = vdg.edges[e];
    out.push_back(Step{dir == Direction::Goal ? edge.from : edge.to, edge.kind});
  }
  std::sort(out.begin(), out.end(), [&](const Step& a, const Step& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return vdg.rank(a.node) < vdg.rank(b.node);
  });
  return out;
}

}  // namespace

DepTree extract_tree(const Vdg& vdg, NodeIndex root, Direction direction, std::size_t limit) {
  if (root >= vdg.nodes.size()) throw UnknownNode("node index " + std::to_string(root));
  DepTree tree;
  tree.direction = direction;
  std::unordered_set<NodeIndex> on_path;

  struct Frame {
    std::uint32_t tree_index;
    std::vector<Step> steps;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;

  auto add = [&](NodeIndex v, std::optional<EdgeKind> kind, std::uint32_t parent) {
    if (tree.nodes.size() >= limit)
      throw TreeTooLarge("tree from " + vdg.nodes[root].id + " exceeds " + std::to_string(limit) + " nodes");
    TreeNode t;
    t.vdg_node = v;
    t.edge = kind;
    t.parent = parent;
    if (parent != kNoTreeNode) {
      t.depth = tree.nodes[parent].depth + 1;
      tree.nodes[parent].children.push_back(static_cast<std::uint32_t>(tree.nodes.size()));
    }
    tree.nodes.push_back(std::move(t));
    return static_cast<std::uint32_t>(tree.nodes.size() - 1);
  };

  std::uint32_t r = add(root, std::nullopt, kNoTreeNode);
  on_path.insert(root);
  stack.push_back(Frame{r, neighbours(vdg, root, direction)});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == f.steps.size()) {
      on_path.erase(tree.nodes[f.tree_index].vdg_node);
      stack.pop_back();
      continue;
    }
    Step s = f.steps[f.next++];
    std::uint32_t parent = f.tree_index;
    std::uint32_t child = add(s.node, s.kind, parent);
    if (on_path.count(s.node)) {
      tree.nodes[child].marker = Marker::CycleCut;
      continue;
    }
    on_path.insert(s.node);
    stack.push_back(Frame{child, neighbours(vdg, s.node, direction)});
  }
  return tree;
}

DepTree extract_goal_tree(const Vdg& vdg, NodeIndex root, std::size_t limit) {
  return extract_tree(vdg, root, Direction::Goal, limit);
}

DepTree extract_start_tree(const Vdg& vdg, NodeIndex root, std::size_t limit) {
  return extract_tree(vdg, root, Direction::Start, limit);
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h * 0x100000001b3ull;
}

// Structural equality of the subtrees at a and b, ignoring the edge into them.
bool same_subtree(const DepTree& t, std::uint32_t a, std::uint32_t b) {
  const TreeNode& x = t.nodes[a];
  const TreeNode& y = t.nodes[b];
  if (x.vdg_node != y.vdg_node || x.marker != y.marker || x.ref_target != y.ref_target ||
      x.children.size() != y.children.size())
    return false;
  for (std::size_t k = 0; k < x.children.size(); ++k) {
    if (t.nodes[x.children[k]].edge != t.nodes[y.children[k]].edge) return false;
    if (!same_subtree(t, x.children[k], y.children[k])) return false;
  }
  return true;
}

// Copies the subtree at `src` of `from` under `parent` of `to`, resolving
// references through `expand` when set.
std::uint32_t copy_subtree(const DepTree& from, std::uint32_t src, DepTree& to, std::uint32_t parent,
                           std::optional<EdgeKind> edge, bool expand) {
  const TreeNode& s = from.nodes[src];
  if (expand && s.marker == Marker::RedundantRef) {
    std::uint32_t idx = copy_subtree(from, s.ref_target, to, parent, edge, true);
    return idx;
  }
  TreeNode n;
  n.vdg_node = s.vdg_node;
  n.edge = edge;
  n.parent = parent;
  n.depth = parent == kNoTreeNode ? 0 : to.nodes[parent].depth + 1;
  n.marker = s.marker;
  n.ref_target = s.ref_target;
  if (parent != kNoTreeNode) to.nodes[parent].children.push_back(static_cast<std::uint32_t>(to.nodes.size()));
  to.nodes.push_back(std::move(n));
  std::uint32_t idx = static_cast<std::uint32_t>(to.nodes.size() - 1);
  for (std::uint32_t c : s.children) copy_subtree(from, c, to, idx, from.nodes[c].edge, expand);
  return idx;
}

}  // namespace

DepTree fold_redundant(const DepTree& tree) {
  DepTree out;
  out.direction = tree.direction;
  out.folded = true;
  if (tree.nodes.empty()) return out;
  std::vector<std::uint64_t> hash(tree.nodes.size());
  for (std::size_t i = tree.nodes.size(); i-- > 0;) {
    const TreeNode& n = tree.nodes[i];
    std::uint64_t h = mix(mix(mix(1469598103934665603ull, n.vdg_node), static_cast<std::uint64_t>(n.marker)), n.ref_target);
    for (std::uint32_t c : n.children) h = mix(mix(h, static_cast<std::uint64_t>(*tree.nodes[c].edge)), hash[c]);
    hash[i] = h;
  }
  // hash -> (source index, emitted index) of first occurrences
  std::unordered_multimap<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> seen;
  std::function<void(std::uint32_t, std::uint32_t)> emit = [&](std::uint32_t src, std::uint32_t parent) {
    const TreeNode& s = tree.nodes[src];
    if (!s.children.empty() && src != 0) {
      auto range = seen.equal_range(hash[src]);
      for (auto it = range.first; it != range.second; ++it) {
        if (!same_subtree(tree, it->second.first, src)) continue;
        TreeNode ref;
        ref.vdg_node = s.vdg_node;
        ref.edge = s.edge;
        ref.parent = parent;
        ref.depth = out.nodes[parent].depth + 1;
        ref.marker = Marker::RedundantRef;
        ref.ref_target = it->second.second;
        out.nodes[parent].children.push_back(static_cast<std::uint32_t>(out.nodes.size()));
        out.nodes.push_back(std::move(ref));
        return;
      }
    }
    TreeNode n;
    n.vdg_node = s.vdg_node;
    n.edge = s.edge;
    n.parent = parent;
    n.depth = parent == kNoTreeNode ? 0 : out.nodes[parent].depth + 1;
    n.marker = s.marker;
    n.ref_target = s.ref_target;
    if (parent != kNoTreeNode) out.nodes[parent].children.push_back(static_cast<std::uint32_t>(out.nodes.size()));
    out.nodes.push_back(std::move(n));
    std::uint32_t idx = static_cast<std::uint32_t>(out.nodes.size() - 1);
    if (!s.children.empty()) seen.emplace(hash[src], std::make_pair(src, idx));
    for (std::uint32_t c : s.children) emit(c, idx);
  };
  emit(0, kNoTreeNode);
  return out;
}

DepTree unfold(const DepTree& tree) {
  DepTree out;
  out.direction = tree.direction;
  out.folded = false;
  if (tree.nodes.empty()) return out;
  copy_subtree(tree, 0, out, kNoTreeNode, std::nullopt, true);
  return out;
}

DepTree prune(const DepTree& tree, const std::function<bool(const TreeNode&)>& keep_children, Marker marker) {
  DepTree out;
  out.direction = tree.direction;
  out.folded = tree.folded;
  if (tree.nodes.empty()) return out;
  std::vector<std::uint32_t> remap(tree.nodes.size(), kNoTreeNode);
  std::function<void(std::uint32_t, std::uint32_t)> visit = [&](std::uint32_t src, std::uint32_t parent) {
    const TreeNode& s = tree.nodes[src];
    TreeNode n;
    n.vdg_node = s.vdg_node;
    n.edge = s.edge;
    n.parent = parent;
    n.depth = parent == kNoTreeNode ? 0 : out.nodes[parent].depth + 1;
    n.marker = s.marker;
    n.ref_target = s.ref_target;
    bool descend = keep_children(s);
    if (!descend) {
      n.marker = marker;
      n.ref_target = kNoTreeNode;
    }
    if (parent != kNoTreeNode) out.nodes[parent].children.push_back(static_cast<std::uint32_t>(out.nodes.size()));
    out.nodes.push_back(std::move(n));
    std::uint32_t idx = static_cast<std::uint32_t>(out.nodes.size() - 1);
    remap[src] = idx;
    if (descend)
      for (std::uint32_t c : s.children) visit(c, idx);
  };
  visit(0, kNoTreeNode);
  // References whose target was pruned away lose their marker.
  for (auto& n : out.nodes) {
    if (n.marker != Marker::RedundantRef) continue;
    n.ref_target = remap[n.ref_target];
    if (n.ref_target == kNoTreeNode) n.marker = Marker::Normal;
  }
  return out;
}

GroupedTree gather_by_function(const DepTree& tree, const Vdg& vdg) {
  GroupedTree g;
  g.group_of.assign(tree.nodes.size(), 0);
  std::map<std::tuple<std::uint32_t, TraceId, SymbolId>, std::uint32_t> index;
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < tree.nodes.size(); ++i) {
    const VdgNode& v = vdg.nodes[tree.nodes[i].vdg_node];
    auto key = std::make_tuple(v.path, v.trace, v.function);
    auto [it, inserted] = index.emplace(key, static_cast<std::uint32_t>(g.groups.size()));
    if (inserted) g.groups.push_back(FunctionGroup{v.path, v.trace, v.function, {}});
    g.groups[it->second].members.push_back(i);
    g.group_of[i] = it->second;
    std::uint32_t parent = tree.nodes[i].parent;
    if (parent != kNoTreeNode && g.group_of[parent] != it->second) {
      auto e = std::make_pair(g.group_of[parent], it->second);
      if (edges.insert(e).second) g.edges.push_back(e);
    }
  }
  return g;
}

std::string export_tree_text(const DepTree& tree, const Vdg& vdg) {
  std::string out;
  for (const auto& n : tree.nodes) {
    out.append(2 * n.depth, ' ');
    out += n.edge ? edge_letter(*n.edge) : 'r';
    out += ' ';
    out += vdg.nodes[n.vdg_node].id;
    switch (n.marker) {
      case Marker::Normal: break;
      case Marker::RedundantRef: out += " [redundant-ref #" + std::to_string(n.ref_target) + "]"; break;
      case Marker::CycleCut: out += " [cycle-cut]"; break;
      case Marker::BoundaryCut: out += " [boundary-cut]"; break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace vdgslice
