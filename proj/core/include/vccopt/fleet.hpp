#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vccopt {

/// Data centers are identified by 1-based ids in [1, dc_count].
using DcId = int;

/// Undirected fiber link between two data centers with a nonnegative
/// migration price per unit of compute volume.
struct FiberEdge {
  DcId a = 0;
  DcId b = 0;
  double price = 0.0;
};

/// The physical fleet: an undirected, connected graph of data centers plus
/// the per-DC physical compute capacity available in one time step.
///
/// Immutable after construction; safe for concurrent reads.
struct DataCenterFleet {
  int dc_count = 0;
  std::vector<FiberEdge> edges;
  std::vector<double> physical_capacity;  // indexed by dc-1, volume per step
};

/// First invariant violation found by validate_fleet.
struct FleetIssue {
  std::string code;     // "DisconnectedGraph" | "InvalidEdgeEndpoint" | "NegativePrice" | ...
  std::string message;  // human readable detail
};

/// Checks the fleet invariants (valid endpoints, no self-loops, nonnegative
/// prices, connected graph). Returns the first violation found, or nullopt
/// if the fleet is valid.
std::optional<FleetIssue> validate_fleet(const DataCenterFleet& fleet);

/// A frozen migration route from one DC to another. edge_sequence holds
/// indices into DataCenterFleet::edges forming a contiguous walk; base_price
/// is the exact sum of edge prices along it. The path from a DC to itself is
/// empty with price 0.
struct MigrationPath {
  DcId source = 0;
  DcId target = 0;
  std::vector<int> edge_sequence;
  double base_price = 0.0;
};

/// Minimum-price path from `source` to every DC, indexed by target-1.
/// Ties are broken by fewest edges, then by lexicographically smallest node
/// sequence, so the result is a deterministic function of the fleet.
/// Requires a valid fleet (throws ValidationError otherwise).
std::vector<MigrationPath> shortest_paths_from(const DataCenterFleet& fleet, DcId source);

}  // namespace vccopt
