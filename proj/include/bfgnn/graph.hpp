#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bfgnn {

/// Thrown when an input violates a documented precondition (bad graph,
/// mismatched shapes, malformed files).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation refuses to run (e.g. exhaustive oracle asked to
/// enumerate a graph that is too large, or an unmet certificate hypothesis).
struct RefusalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatch between two configured shapes (manifest vs model, checkpoint vs
/// architecture).
struct ConfigMismatchError : ValidationError {
  using ValidationError::ValidationError;
};

/// Non-finite values where finite ones are required (diverged training,
/// broken gradients).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
};

/// Undirected weighted graph whose node features hold running shortest-path
/// estimates. `beta` is the per-graph sentinel for "not reached yet"; it must
/// exceed the total edge weight. Self-loops of weight zero are implicit and
/// never stored. `step_tag` records which relaxation step the features encode
/// (metadata only).
struct AttributedGraph {
  int n = 0;
  double beta = 1.0;
  std::optional<int> step_tag;
  std::vector<double> features;
  std::vector<Edge> edges;  // canonical: u < v, sorted lexicographically
};

struct NeighborView {
  int node = 0;
  // (neighbor id, edge weight), ascending by id, always containing
  // (node, 0.0) for the implicit self-loop.
  std::vector<std::pair<int, double>> neighbors;
};

/// Sorts edges into canonical order and flips pairs so that u < v.
void normalize_edges(AttributedGraph& g);

/// Throws ValidationError unless all graph invariants hold.
void validate(const AttributedGraph& g);

NeighborView neighbors(const AttributedGraph& g, int node);

/// Adjacency for every node at once; each list is a NeighborView list.
std::vector<std::vector<std::pair<int, double>>> adjacency(const AttributedGraph& g);

/// One relaxation pass: every feature becomes the minimum of
/// (neighbor feature + edge weight) over the closed neighborhood.
AttributedGraph bf_step(const AttributedGraph& g);

/// k-fold composition of bf_step.
AttributedGraph bf_k(const AttributedGraph& g, int k);

/// Nodes whose feature differs from beta, ascending.
std::vector<int> reachable_nodes(const AttributedGraph& g);

/// Independent oracle: per-node minimum total weight over all walks with at
/// most k edges, starting from any node and charging that node's feature as
/// the initial cost. Computed by exhaustive walk enumeration, never by the
/// relaxation recurrence. Refuses graphs with more than 8 nodes or k > 6.
std::vector<double> brute_force_khop(const AttributedGraph& g, int k);

nlohmann::ordered_json graph_to_json(const AttributedGraph& g);
AttributedGraph graph_from_json(const nlohmann::json& j);

std::string graph_to_string(const AttributedGraph& g);
AttributedGraph graph_from_string(const std::string& text);

}  // namespace bfgnn
