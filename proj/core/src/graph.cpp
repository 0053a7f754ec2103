#include "usergraph/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace usergraph {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::User: return "user";
    case NodeKind::Desc: return "desc";
    case NodeKind::Type: return "type";
  }
  return "?";
}

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::DescType: return "desc_type";
    case EdgeKind::UserType: return "user_type";
    case EdgeKind::DescUser: return "desc_user";
    case EdgeKind::UserUser: return "user_user";
  }
  return "?";
}

const char* to_string(Provenance p) {
  return p == Provenance::Observed ? "observed" : "inferred";
}

const char* to_string(GraphView v) {
  switch (v) {
    case GraphView::Des: return "des";
    case GraphView::Net: return "net";
    case GraphView::DesNet: return "desnet";
  }
  return "?";
}

GraphView view_from_string(const std::string& s) {
  if (s == "des") return GraphView::Des;
  if (s == "net") return GraphView::Net;
  if (s == "desnet" || s == "des+net") return GraphView::DesNet;
  throw std::runtime_error("unknown graph view \"" + s + "\" (expected des|net|desnet)");
}

namespace {

// Endpoint kinds per edge kind, order-insensitive.
constexpr std::array<std::pair<NodeKind, NodeKind>, kNumEdgeKinds> kEndpoints = {{
    {NodeKind::Desc, NodeKind::Type},   // DescType
    {NodeKind::User, NodeKind::Type},   // UserType
    {NodeKind::Desc, NodeKind::User},   // DescUser
    {NodeKind::User, NodeKind::User},   // UserUser
}};

bool kind_allows(EdgeKind kind, NodeKind a, NodeKind b) {
  const auto [x, y] = kEndpoints[static_cast<int>(kind)];
  return (a == x && b == y) || (a == y && b == x);
}

bool view_allows(GraphView view, EdgeKind kind) {
  if (view == GraphView::Des && kind == EdgeKind::UserUser) return false;
  if (view == GraphView::Net && kind == EdgeKind::DescUser) return false;
  return true;
}

}  // namespace

int GraphStats::observed_total() const {
  int s = 0;
  for (int v : observed_by_kind) s += v;
  return s;
}

int GraphStats::inferred_total() const {
  int s = 0;
  for (int v : inferred_by_kind) s += v;
  return s;
}

InfoGraph::InfoGraph(int n_users, GraphView view) : n_users_(n_users), view_(view) {
  if (n_users < 0) throw std::invalid_argument("graph: negative user count");
  adj_.resize(static_cast<std::size_t>(n_nodes()));
}

int InfoGraph::flat(NodeId n) const {
  switch (n.kind) {
    case NodeKind::User: return n.index;
    case NodeKind::Desc: return n_users_ + n.index;
    case NodeKind::Type: return 2 * n_users_ + n.index;
  }
  throw std::invalid_argument("graph: bad node kind");
}

void InfoGraph::check_node(NodeId n) const {
  const int limit = (n.kind == NodeKind::Type) ? kNumTypes : n_users_;
  if (n.index < 0 || n.index >= limit) {
    throw std::out_of_range("graph: node index " + std::to_string(n.index) +
                            " out of range for kind " + to_string(n.kind));
  }
}

bool InfoGraph::add_edge(NodeId a, NodeId b, EdgeKind kind, Provenance prov) {
  check_node(a);
  check_node(b);
  if (a == b) throw std::invalid_argument("graph: self-loop rejected");
  if (!kind_allows(kind, a.kind, b.kind)) {
    throw std::invalid_argument(std::string("graph: edge kind ") + to_string(kind) +
                                " cannot connect " + to_string(a.kind) + " and " +
                                to_string(b.kind));
  }
  if (!view_allows(view_, kind)) {
    throw std::invalid_argument(std::string("graph: view ") + to_string(view_) +
                                " excludes " + to_string(kind) + " edges");
  }
  if (has_edge(a, b)) return false;

  if (b < a) std::swap(a, b);
  edges_.push_back({a, b, kind, prov});
  auto insert_sorted = [&](NodeId at, NodeId other) {
    auto& list = adj_[static_cast<std::size_t>(flat(at))];
    AdjEntry entry{other, kind, prov};
    auto pos = std::lower_bound(list.begin(), list.end(), other,
                                [](const AdjEntry& e, NodeId v) { return e.other < v; });
    list.insert(pos, entry);
  };
  insert_sorted(a, b);
  insert_sorted(b, a);
  return true;
}

bool InfoGraph::has_edge(NodeId a, NodeId b) const {
  check_node(a);
  check_node(b);
  const auto& list = adj_[static_cast<std::size_t>(flat(a))];
  auto pos = std::lower_bound(list.begin(), list.end(), b,
                              [](const AdjEntry& e, NodeId v) { return e.other < v; });
  return pos != list.end() && pos->other == b;
}

std::vector<NodeId> InfoGraph::neighbors(NodeId n, std::optional<EdgeKind> filter) const {
  check_node(n);
  std::vector<NodeId> out;
  for (const AdjEntry& e : adj_[static_cast<std::size_t>(flat(n))]) {
    if (filter && e.kind != *filter) continue;
    out.push_back(e.other);
  }
  return out;
}

const std::vector<AdjEntry>& InfoGraph::adjacency(NodeId n) const {
  check_node(n);
  return adj_[static_cast<std::size_t>(flat(n))];
}

int InfoGraph::degree(NodeId n) const {
  return static_cast<int>(adjacency(n).size());
}

std::optional<int> InfoGraph::user_type(int user_index) const {
  for (const AdjEntry& e : adjacency(user_node(user_index))) {
    if (e.kind == EdgeKind::UserType) return e.other.index;
  }
  return std::nullopt;
}

GraphStats InfoGraph::stats() const {
  GraphStats s;
  s.user_nodes = n_users_;
  s.desc_nodes = n_users_;
  s.type_nodes = kNumTypes;
  for (const EdgeRec& e : edges_) {
    auto& bucket = (e.prov == Provenance::Observed) ? s.observed_by_kind : s.inferred_by_kind;
    ++bucket[static_cast<int>(e.kind)];
  }
  return s;
}

InfoGraph build_graph(const Corpus& corpus, const WeakLabeling& weak, GraphView view) {
  const int n = static_cast<int>(corpus.users.size());
  InfoGraph g(n, view);

  if (view != GraphView::Net) {
    for (int i = 0; i < n; ++i) {
      g.add_edge(desc_node(i), user_node(i), EdgeKind::DescUser, Provenance::Observed);
    }
  }
  if (view != GraphView::Des) {
    // An edge exists when either user mentioned the other; add_edge dedups
    // the two directions.
    for (int i = 0; i < n; ++i) {
      for (int j : corpus.users[i].mentions) {
        g.add_edge(user_node(i), user_node(j), EdgeKind::UserUser, Provenance::Observed);
      }
    }
  }
  for (const auto& [user_id, label] : weak.labels) {
    const int i = corpus.index_of(user_id);
    if (i < 0) {
      throw std::runtime_error("weak label references unknown user \"" + user_id + "\"");
    }
    if (label < 0 || label >= kNumTypes) {
      throw std::runtime_error("weak label for \"" + user_id + "\" is out of range");
    }
    g.add_edge(desc_node(i), type_node(label), EdgeKind::DescType, Provenance::Observed);
    g.add_edge(user_node(i), type_node(label), EdgeKind::UserType, Provenance::Observed);
  }
  return g;
}

namespace {

std::string node_to_string(NodeId n) {
  std::string prefix;
  switch (n.kind) {
    case NodeKind::User: prefix = "u"; break;
    case NodeKind::Desc: prefix = "d"; break;
    case NodeKind::Type: prefix = "t"; break;
  }
  return prefix + ":" + std::to_string(n.index);
}

NodeId node_from_string(const std::string& s) {
  if (s.size() < 3 || s[1] != ':') throw std::runtime_error("bad node id \"" + s + "\"");
  NodeKind kind;
  switch (s[0]) {
    case 'u': kind = NodeKind::User; break;
    case 'd': kind = NodeKind::Desc; break;
    case 't': kind = NodeKind::Type; break;
    default: throw std::runtime_error("bad node id \"" + s + "\"");
  }
  return {kind, std::stoi(s.substr(2))};
}

EdgeKind edge_kind_from_string(const std::string& s) {
  for (int k = 0; k < kNumEdgeKinds; ++k) {
    if (s == to_string(static_cast<EdgeKind>(k))) return static_cast<EdgeKind>(k);
  }
  throw std::runtime_error("unknown edge kind \"" + s + "\"");
}

}  // namespace

std::string graph_to_json(const InfoGraph& graph) {
  ordered_json j;
  j["n_users"] = graph.n_users();
  j["view"] = to_string(graph.view());
  j["edges"] = json::array();
  for (const EdgeRec& e : graph.edges()) {
    ordered_json ej;
    ej["a"] = node_to_string(e.a);
    ej["b"] = node_to_string(e.b);
    ej["kind"] = to_string(e.kind);
    ej["prov"] = to_string(e.prov);
    j["edges"].push_back(std::move(ej));
  }
  return j.dump(2);
}

InfoGraph graph_from_json(const std::string& text) {
  json j = json::parse(text);
  InfoGraph g(j.at("n_users").get<int>(), view_from_string(j.at("view").get<std::string>()));
  for (const auto& ej : j.at("edges")) {
    g.add_edge(node_from_string(ej.at("a").get<std::string>()),
               node_from_string(ej.at("b").get<std::string>()),
               edge_kind_from_string(ej.at("kind").get<std::string>()),
               ej.at("prov").get<std::string>() == "observed" ? Provenance::Observed
                                                              : Provenance::Inferred);
  }
  return g;
}

}  // namespace usergraph
