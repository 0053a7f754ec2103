#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usergraph/corpus.hpp"
#include "usergraph/rules.hpp"

namespace usergraph {

enum class NodeKind : std::uint8_t { User = 0, Desc = 1, Type = 2 };

struct NodeId {
  NodeKind kind{};
  std::int32_t index = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

inline NodeId user_node(int i) { return {NodeKind::User, i}; }
inline NodeId desc_node(int i) { return {NodeKind::Desc, i}; }
inline NodeId type_node(int t) { return {NodeKind::Type, t}; }

enum class EdgeKind : std::uint8_t { DescType = 0, UserType = 1, DescUser = 2, UserUser = 3 };
inline constexpr int kNumEdgeKinds = 4;

enum class Provenance : std::uint8_t { Observed, Inferred };

// Which edge kinds a graph carries: Des drops UserUser, Net drops DescUser.
enum class GraphView { Des, Net, DesNet };

const char* to_string(NodeKind k);
const char* to_string(EdgeKind k);
const char* to_string(Provenance p);
const char* to_string(GraphView v);
GraphView view_from_string(const std::string& s);

struct AdjEntry {
  NodeId other;
  EdgeKind kind;
  Provenance prov;
};

struct EdgeRec {
  NodeId a, b;  // canonical: a < b
  EdgeKind kind;
  Provenance prov;
};

struct GraphStats {
  int user_nodes = 0;
  int desc_nodes = 0;
  int type_nodes = 0;
  std::array<int, kNumEdgeKinds> observed_by_kind{};
  std::array<int, kNumEdgeKinds> inferred_by_kind{};
  int observed_total() const;
  int inferred_total() const;
  int edge_total() const { return observed_total() + inferred_total(); }
};

// Undirected heterogeneous graph over one user/description node pair per
// corpus user plus the two type nodes. No self-loops, no parallel edges;
// endpoint kinds are enforced per EdgeKind, and the view constrains which
// kinds may exist at all.
class InfoGraph {
 public:
  InfoGraph(int n_users, GraphView view);

  int n_users() const { return n_users_; }
  int n_nodes() const { return 2 * n_users_ + kNumTypes; }
  GraphView view() const { return view_; }

  // Returns false (and leaves the graph unchanged) when the edge already
  // exists. Throws on self-loops, endpoint/kind mismatches, out-of-range
  // indices, or a kind excluded by the view.
  bool add_edge(NodeId a, NodeId b, EdgeKind kind, Provenance prov);
  bool add_inferred_edge(NodeId a, NodeId b, EdgeKind kind) {
    return add_edge(a, b, kind, Provenance::Inferred);
  }

  bool has_edge(NodeId a, NodeId b) const;

  // Index-ordered (User < Desc < Type, then index), optionally filtered.
  std::vector<NodeId> neighbors(NodeId n, std::optional<EdgeKind> filter = {}) const;
  const std::vector<AdjEntry>& adjacency(NodeId n) const;
  int degree(NodeId n) const;

  // The type a user is connected to, if any. At most one by construction.
  std::optional<int> user_type(int user_index) const;

  // Insertion order; stable across identical build sequences.
  const std::vector<EdgeRec>& edges() const { return edges_; }

  GraphStats stats() const;

 private:
  int flat(NodeId n) const;
  void check_node(NodeId n) const;

  int n_users_;
  GraphView view_;
  std::vector<std::vector<AdjEntry>> adj_;
  std::vector<EdgeRec> edges_;
};

// Assembles the observed graph: one DescUser edge per user (unless Net),
// one UserUser edge per mention pair in either direction (unless Des), and
// a DescType plus UserType edge for every weakly labeled user.
// Throws if a weak label references a user absent from the corpus.
InfoGraph build_graph(const Corpus& corpus, const WeakLabeling& weak, GraphView view);

std::string graph_to_json(const InfoGraph& graph);
InfoGraph graph_from_json(const std::string& text);

}  // namespace usergraph
