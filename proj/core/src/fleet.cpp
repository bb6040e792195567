#include "vccopt/fleet.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "vccopt/errors.hpp"

namespace vccopt {

std::optional<FleetIssue> validate_fleet(const DataCenterFleet& fleet) {
  const int d = fleet.dc_count;
  if (d < 1) {
    return FleetIssue{"InvalidEdgeEndpoint", "dc_count must be >= 1"};
  }
  for (std::size_t i = 0; i < fleet.edges.size(); ++i) {
    const FiberEdge& e = fleet.edges[i];
    if (e.a < 1 || e.a > d || e.b < 1 || e.b > d || e.a == e.b) {
      return FleetIssue{"InvalidEdgeEndpoint",
                        "edge " + std::to_string(i) + " has endpoints (" + std::to_string(e.a) +
                            "," + std::to_string(e.b) + ") outside 1.." + std::to_string(d) +
                            " or a self-loop"};
    }
    if (e.price < 0.0) {
      return FleetIssue{"NegativePrice",
                        "edge " + std::to_string(i) + " has price " + std::to_string(e.price)};
    }
  }
  // Connectivity by BFS from DC 1.
  std::vector<char> seen(static_cast<std::size_t>(d), 0);
  std::queue<int> frontier;
  frontier.push(1);
  seen[0] = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const FiberEdge& e : fleet.edges) {
      int v = 0;
      if (e.a == u) v = e.b;
      else if (e.b == u) v = e.a;
      else continue;
      if (!seen[static_cast<std::size_t>(v - 1)]) {
        seen[static_cast<std::size_t>(v - 1)] = 1;
        frontier.push(v);
      }
    }
  }
  for (int v = 1; v <= d; ++v) {
    if (!seen[static_cast<std::size_t>(v - 1)]) {
      return FleetIssue{"DisconnectedGraph", "DC " + std::to_string(v) + " is unreachable from DC 1"};
    }
  }
  return std::nullopt;
}

namespace {

// Path label used for deterministic tie-breaking: total price, then hop
// count, then the full node sequence compared lexicographically.
struct PathLabel {
  double price = std::numeric_limits<double>::infinity();
  int hops = std::numeric_limits<int>::max();
  std::vector<int> nodes;  // node sequence from source, inclusive

  bool better_than(const PathLabel& other) const {
    if (price != other.price) return price < other.price;
    if (hops != other.hops) return hops < other.hops;
    return nodes < other.nodes;
  }
};

}  // namespace

std::vector<MigrationPath> shortest_paths_from(const DataCenterFleet& fleet, DcId source) {
  if (auto issue = validate_fleet(fleet)) {
    throw ValidationError("shortest_paths_from: invalid fleet: " + issue->code + ": " + issue->message);
  }
  if (source < 1 || source > fleet.dc_count) {
    throw ValidationError("shortest_paths_from: source DC out of range");
  }

  const int d = fleet.dc_count;
  std::vector<PathLabel> label(static_cast<std::size_t>(d));
  std::vector<int> via_edge(static_cast<std::size_t>(d), -1);  // edge used to enter node
  std::vector<char> done(static_cast<std::size_t>(d), 0);
  label[static_cast<std::size_t>(source - 1)] = PathLabel{0.0, 0, {source}};

  // Dijkstra with a full scan per step; D is small and the compound
  // tie-breaking key makes a heap no simpler.
  for (int round = 0; round < d; ++round) {
    int u = -1;
    for (int v = 1; v <= d; ++v) {
      if (done[static_cast<std::size_t>(v - 1)]) continue;
      if (label[static_cast<std::size_t>(v - 1)].nodes.empty()) continue;  // unreached
      if (u == -1 || label[static_cast<std::size_t>(v - 1)].better_than(label[static_cast<std::size_t>(u - 1)])) {
        u = v;
      }
    }
    if (u == -1) break;
    done[static_cast<std::size_t>(u - 1)] = 1;
    const PathLabel& lu = label[static_cast<std::size_t>(u - 1)];
    for (std::size_t ei = 0; ei < fleet.edges.size(); ++ei) {
      const FiberEdge& e = fleet.edges[ei];
      int v = 0;
      if (e.a == u) v = e.b;
      else if (e.b == u) v = e.a;
      else continue;
      if (done[static_cast<std::size_t>(v - 1)]) continue;
      PathLabel cand;
      cand.price = lu.price + e.price;
      cand.hops = lu.hops + 1;
      cand.nodes = lu.nodes;
      cand.nodes.push_back(v);
      if (cand.better_than(label[static_cast<std::size_t>(v - 1)])) {
        label[static_cast<std::size_t>(v - 1)] = std::move(cand);
        via_edge[static_cast<std::size_t>(v - 1)] = static_cast<int>(ei);
      }
    }
  }

  std::vector<MigrationPath> out(static_cast<std::size_t>(d));
  for (int v = 1; v <= d; ++v) {
    MigrationPath& p = out[static_cast<std::size_t>(v - 1)];
    p.source = source;
    p.target = v;
    p.base_price = 0.0;
    if (v == source) continue;
    // Walk predecessors back to the source.
    std::vector<int> rev;
    int cur = v;
    while (cur != source) {
      const int ei = via_edge[static_cast<std::size_t>(cur - 1)];
      rev.push_back(ei);
      const FiberEdge& e = fleet.edges[static_cast<std::size_t>(ei)];
      cur = (e.a == cur) ? e.b : e.a;
    }
    std::reverse(rev.begin(), rev.end());
    p.edge_sequence = std::move(rev);
    for (int ei : p.edge_sequence) p.base_price += fleet.edges[static_cast<std::size_t>(ei)].price;
  }
  return out;
}

}  // namespace vccopt
