#pragma once

#include <vector>

#include "bfcs/types.hpp"

namespace bfcs {

// Anisotropic TV. EdgeComplete sums |differences| over every 4-neighbor grid
// edge; Literal restricts both sums to the first N-1 rows and L-1 columns.
enum class TvMode { EdgeComplete, Literal };

double tv(const Matrix& x, TvMode mode = TvMode::EdgeComplete);

// Keeps the k largest-magnitude entries, zeros the rest. Ties broken by
// row-major position, earlier index wins.
Matrix project_k_sparse(const Matrix& v, int k);

// Edge between two nodes, as indices into a component's node/value vectors.
struct GraphEdge {
  int a = 0;
  int b = 0;
};

struct Component {
  std::vector<Coord> nodes;      // row-major sorted
  std::vector<GraphEdge> edges;  // 4-neighbor pairs within the component
};

struct ComponentDecomposition {
  std::vector<Component> components;  // ordered by smallest row-major node
};

// Maximal 4-connected components of the nonzero support of v.
ComponentDecomposition connected_components(const Matrix& v);

// Sum of |v_a - v_b| over the edges; the graph-TV of a value vector.
double graph_tv(const std::vector<double>& values,
                const std::vector<GraphEdge>& edges);

// graph_tv / |edges|; 0 for an isolated node (no edges).
double normalized_tv(const std::vector<double>& values,
                     const std::vector<GraphEdge>& edges);

// Reusable state for repeated TV-ball projections of slowly changing inputs
// (multiplier and dual edge variables of the previous solve).
struct GraphTvWarmStart {
  double lambda = 0.0;
  std::vector<double> dual;
};

// Euclidean projection of a value vector onto {v : graph_tv(v) <= radius}
// over a connected edge graph. Bisection on the TV multiplier; each inner
// prox is solved by projected gradient on the dual edge variables with step
// 1/(2 max-degree). Feasible inputs are returned unchanged, bit for bit.
std::vector<double> project_graph_tv_ball(const std::vector<double>& values,
                                          const std::vector<GraphEdge>& edges,
                                          double radius, double tol = 1e-6,
                                          GraphTvWarmStart* warm = nullptr);

// All 4-neighbor edges of a rows x cols grid, nodes indexed row-major.
std::vector<GraphEdge> grid_edges(int rows, int cols);

// Projection onto {X : tv(X) <= epsilon} (edge-complete TV).
Matrix project_tv_ball(const Matrix& v, double epsilon, double tol = 1e-6,
                       GraphTvWarmStart* warm = nullptr);

// Projection of one support component onto the epsilon-radius normalized TV
// ball, i.e. the graph-TV ball of radius epsilon * |edges|. Isolated nodes
// are returned unchanged.
std::vector<double> project_normalized_tv_ball(
    const std::vector<double>& values, const std::vector<GraphEdge>& edges,
    double epsilon, double tol = 1e-6);

// Two-step fused projection: k-sparse first, then every 4-connected nonzero
// component onto the epsilon-radius normalized TV ball, zeros preserved.
Matrix project_fused(const Matrix& v, int k, double epsilon, double tol = 1e-6);

Matrix project_unit_sphere(const Matrix& x);

Matrix project_nonneg(const Matrix& x);

// Values of v at a component's nodes, in node order.
std::vector<double> component_values(const Matrix& v, const Component& c);

}  // namespace bfcs
