#include "bfcs/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

namespace bfcs {

double tv(const Matrix& x, TvMode mode) {
  require_finite(x, "tv");
  const Eigen::Index n = x.rows();
  const Eigen::Index l = x.cols();
  double total = 0.0;
  if (mode == TvMode::EdgeComplete) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = 0; j < l; ++j) {
        total += std::abs(x(i + 1, j) - x(i, j));
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j + 1 < l; ++j) {
        total += std::abs(x(i, j + 1) - x(i, j));
      }
    }
  } else {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = 0; j + 1 < l; ++j) {
        total += std::abs(x(i + 1, j) - x(i, j));
        total += std::abs(x(i, j + 1) - x(i, j));
      }
    }
  }
  return total;
}

Matrix project_k_sparse(const Matrix& v, int k) {
  const auto size = static_cast<long long>(v.rows()) * v.cols();
  if (k < 1 || k > size) {
    throw InvalidInput("project_k_sparse: K out of range");
  }
  require_finite(v, "project_k_sparse");
  const Eigen::Index cols = v.cols();
  std::vector<int> order(static_cast<std::size_t>(size));
  std::iota(order.begin(), order.end(), 0);
  auto magnitude = [&](int idx) {
    return std::abs(v(idx / cols, idx % cols));
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](int a, int b) {
                      const double ma = magnitude(a);
                      const double mb = magnitude(b);
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  Matrix out = Matrix::Zero(v.rows(), v.cols());
  for (int t = 0; t < k; ++t) {
    const int idx = order[t];
    out(idx / cols, idx % cols) = v(idx / cols, idx % cols);
  }
  return out;
}

ComponentDecomposition connected_components(const Matrix& v) {
  require_finite(v, "connected_components");
  const int n = static_cast<int>(v.rows());
  const int l = static_cast<int>(v.cols());
  std::vector<int> label(static_cast<std::size_t>(n) * l, -1);
  auto at = [&](int i, int j) -> int& { return label[i * l + j]; };

  ComponentDecomposition out;
  for (int si = 0; si < n; ++si) {
    for (int sj = 0; sj < l; ++sj) {
      if (v(si, sj) == 0.0 || at(si, sj) >= 0) continue;
      const int id = static_cast<int>(out.components.size());
      Component comp;
      std::queue<Coord> frontier;
      frontier.push({si, sj});
      at(si, sj) = id;
      while (!frontier.empty()) {
        const Coord c = frontier.front();
        frontier.pop();
        comp.nodes.push_back(c);
        const int di[4] = {-1, 1, 0, 0};
        const int dj[4] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
          const int i = c.row + di[d];
          const int j = c.col + dj[d];
          if (i < 0 || i >= n || j < 0 || j >= l) continue;
          if (v(i, j) == 0.0 || at(i, j) >= 0) continue;
          at(i, j) = id;
          frontier.push({i, j});
        }
      }
      std::sort(comp.nodes.begin(), comp.nodes.end(),
                [](const Coord& a, const Coord& b) {
                  return a.row != b.row ? a.row < b.row : a.col < b.col;
                });
      out.components.push_back(std::move(comp));
    }
  }

  // Induced edges, using the final node ordering of each component.
  std::vector<int> local(static_cast<std::size_t>(n) * l, -1);
  for (const Component& comp : out.components) {
    for (std::size_t t = 0; t < comp.nodes.size(); ++t) {
      local[comp.nodes[t].row * l + comp.nodes[t].col] = static_cast<int>(t);
    }
  }
  for (Component& comp : out.components) {
    for (std::size_t t = 0; t < comp.nodes.size(); ++t) {
      const Coord c = comp.nodes[t];
      if (c.row + 1 < n && v(c.row + 1, c.col) != 0.0 &&
          at(c.row + 1, c.col) == at(c.row, c.col)) {
        comp.edges.push_back(
            {static_cast<int>(t), local[(c.row + 1) * l + c.col]});
      }
      if (c.col + 1 < l && v(c.row, c.col + 1) != 0.0 &&
          at(c.row, c.col + 1) == at(c.row, c.col)) {
        comp.edges.push_back(
            {static_cast<int>(t), local[c.row * l + c.col + 1]});
      }
    }
  }
  return out;
}

double graph_tv(const std::vector<double>& values,
                const std::vector<GraphEdge>& edges) {
  double total = 0.0;
  for (const GraphEdge& e : edges) {
    total += std::abs(values[e.a] - values[e.b]);
  }
  return total;
}

double normalized_tv(const std::vector<double>& values,
                     const std::vector<GraphEdge>& edges) {
  if (edges.empty()) return 0.0;
  return graph_tv(values, edges) / static_cast<double>(edges.size());
}

namespace {

// Union-find over the nodes touched by the edge set; nodes without edges
// remain singletons.
std::vector<int> connected_parts(std::size_t n_nodes,
                                 const std::vector<GraphEdge>& edges) {
  std::vector<int> parent(n_nodes);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const GraphEdge& e : edges) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    if (ra != rb) parent[ra] = rb;
  }
  std::vector<int> root(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) root[i] = find(static_cast<int>(i));
  return root;
}

// Replaces each connected part by values scaled toward its mean so the graph
// TV contracts by exactly `factor`.
void contract_toward_means(std::vector<double>& x,
                           const std::vector<GraphEdge>& edges, double factor) {
  const std::vector<int> root = connected_parts(x.size(), edges);
  std::vector<double> sum(x.size(), 0.0);
  std::vector<int> count(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum[root[i]] += x[i];
    count[root[i]] += 1;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mean = sum[root[i]] / count[root[i]];
    x[i] = mean + factor * (x[i] - mean);
  }
}

// One dual solve of the TV prox
//   min_x 1/2 ||x - v||^2 + lambda * graph_tv(x)
// with x = v - D^T q and |q_e| <= lambda. Projected gradient on the dual
// edge variables with step 1/(2 max-degree) and Nesterov extrapolation.
void tv_prox(const std::vector<double>& v, const std::vector<GraphEdge>& edges,
             double lambda, std::vector<double>& q, std::vector<double>& x,
             double inner_tol, int inner_cap) {
  const std::size_t n = v.size();
  std::vector<int> degree(n, 0);
  for (const GraphEdge& e : edges) {
    degree[e.a] += 1;
    degree[e.b] += 1;
  }
  const int max_degree = *std::max_element(degree.begin(), degree.end());
  const double step = 1.0 / (2.0 * std::max(1, max_degree));

  auto rebuild_x = [&](const std::vector<double>& dual) {
    x.assign(v.begin(), v.end());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      x[edges[e].a] -= dual[e];
      x[edges[e].b] += dual[e];
    }
  };
  for (double& qe : q) qe = std::clamp(qe, -lambda, lambda);
  rebuild_x(q);

  std::vector<double> q_prev = q;
  std::vector<double> extrapolated(edges.size());
  std::vector<double> x_prev(n);
  double t = 1.0;
  for (int it = 0; it < inner_cap; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    t = t_next;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      extrapolated[e] = q[e] + beta * (q[e] - q_prev[e]);
    }
    rebuild_x(extrapolated);
    q_prev.swap(q);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double g = x[edges[e].a] - x[edges[e].b];
      q[e] = std::clamp(extrapolated[e] + step * g, -lambda, lambda);
    }
    x_prev.swap(x);
    rebuild_x(q);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta = std::max(delta, std::abs(x[i] - x_prev[i]));
    }
    if (delta <= inner_tol) break;
  }
}

// Exact prox of lambda * 1D total variation on a chain, computed in one
// forward pass (Condat-style taut-string tracking of the feasible segment
// value range [vmin, vmax] and its slack [umin, umax]).
void tv1d_prox(const double* y, int n, double lambda, double* x) {
  if (n <= 0) return;
  if (n == 1 || lambda <= 0.0) {
    std::copy(y, y + n, x);
    return;
  }
  const int last = n - 1;
  int k = 0;       // current scan position
  int k0 = 0;      // start of the current segment
  int km = 0;      // last position where umin hit +lambda
  int kp = 0;      // last position where umax hit -lambda
  double vmin = y[0] - lambda;
  double vmax = y[0] + lambda;
  double umin = lambda;
  double umax = -lambda;
  for (;;) {
    if (k == last) {
      if (umin < 0.0) {  // lower bound violated: emit the segment at vmin
        for (int i = k0; i <= km; ++i) x[i] = vmin;
        k = k0 = km = km + 1;
        vmin = y[k];
        umin = lambda;
        umax = y[k] + lambda - vmax;
        if (k == last) {
          x[last] = vmin + umin;
          return;
        }
        continue;
      }
      if (umax > 0.0) {  // upper bound violated: emit the segment at vmax
        for (int i = k0; i <= kp; ++i) x[i] = vmax;
        k = k0 = kp = kp + 1;
        vmax = y[k];
        umax = -lambda;
        umin = y[k] - lambda - vmin;
        if (k == last) {
          x[last] = vmax + umax;
          return;
        }
        continue;
      }
      const double value = vmin + umin / (k - k0 + 1);
      for (int i = k0; i <= last; ++i) x[i] = value;
      return;
    }
    if (y[k + 1] + umin < vmin - lambda) {  // forced negative jump
      for (int i = k0; i <= km; ++i) x[i] = vmin;
      k = k0 = km = kp = km + 1;
      vmin = y[k];
      vmax = y[k] + 2.0 * lambda;
      umin = lambda;
      umax = -lambda;
    } else if (y[k + 1] + umax > vmax + lambda) {  // forced positive jump
      for (int i = k0; i <= kp; ++i) x[i] = vmax;
      k = k0 = km = kp = kp + 1;
      vmin = y[k] - 2.0 * lambda;
      vmax = y[k];
      umin = lambda;
      umax = -lambda;
    } else {  // extend the current segment
      k += 1;
      umin += y[k] - vmin;
      umax += y[k] - vmax;
      if (umin >= lambda) {
        vmin += (umin - lambda) / (k - k0 + 1);
        umin = lambda;
        km = k;
      }
      if (umax <= -lambda) {
        vmax += (umax + lambda) / (k - k0 + 1);
        umax = -lambda;
        kp = k;
      }
    }
  }
}

// Prox of lambda * grid TV via Dykstra splitting into row chains and
// column chains, each solved exactly by tv1d_prox. The correction terms
// p (rows) and q (columns) may be warm-started; they are overwritten.
void grid_tv_prox(const Matrix& v, double lambda, Matrix& x, Matrix& p,
                  Matrix& q, double inner_tol, int inner_cap) {
  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  Matrix t(rows, cols);
  Matrix y(rows, cols);
  Matrix x_prev(rows, cols);
  std::vector<double> in(static_cast<std::size_t>(std::max(rows, cols)));
  std::vector<double> out(in.size());
  x = v;
  for (int it = 0; it < inner_cap; ++it) {
    t = x + p;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) in[j] = t(i, j);
      tv1d_prox(in.data(), cols, lambda, out.data());
      for (int j = 0; j < cols; ++j) y(i, j) = out[j];
    }
    p = t - y;
    t = y + q;
    x_prev.swap(x);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) in[i] = t(i, j);
      tv1d_prox(in.data(), rows, lambda, out.data());
      for (int i = 0; i < rows; ++i) x(i, j) = out[i];
    }
    q = t - x;
    if (it > 0 && (x - x_prev).cwiseAbs().maxCoeff() <= inner_tol) break;
  }
}

}  // namespace

std::vector<double> project_graph_tv_ball(const std::vector<double>& values,
                                          const std::vector<GraphEdge>& edges,
                                          double radius, double tol,
                                          GraphTvWarmStart* warm) {
  if (radius < 0.0) throw InvalidInput("graph TV ball: negative radius");
  const double tv0 = graph_tv(values, edges);
  if (tv0 <= radius) return values;

  if (radius == 0.0) {
    std::vector<double> x = values;
    contract_toward_means(x, edges, 0.0);
    return x;
  }

  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double inner_tol = tol * 1e-2 * std::max(scale, 1e-30);
  constexpr int kInnerCap = 10000;
  constexpr int kBisectCap = 100;

  std::vector<double> q(edges.size(), 0.0);
  // Rough multiplier scale: contracting each edge difference by a uniform
  // factor removes about 2*lambda*|E| of TV per unit of multiplier.
  double lam = (tv0 - radius) / (2.0 * static_cast<double>(edges.size()));
  lam = std::max(lam, 1e-12 * std::max(scale, 1e-30));
  if (warm != nullptr && warm->lambda > 0.0 &&
      warm->dual.size() == edges.size()) {
    q = warm->dual;
    lam = warm->lambda;
  }

  std::vector<double> x;
  double lo = 0.0;
  double hi = -1.0;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  double best_tv = tv0;

  auto evaluate = [&](double lambda) {
    tv_prox(values, edges, lambda, q, x, inner_tol, kInnerCap);
    const double t = graph_tv(x, edges);
    if (std::abs(t - radius) < best_gap) {
      best_gap = std::abs(t - radius);
      best_x = x;
      best_tv = t;
    }
    return t;
  };

  for (int grow = 0; grow < 200 && hi < 0.0; ++grow) {
    const double t = evaluate(lam);
    if (t <= radius) {
      hi = lam;
    } else {
      lo = lam;
      lam *= 2.0;
    }
  }
  if (hi < 0.0) {
    throw ProjectionError("graph TV ball: multiplier bracket not found",
                          best_x, best_tv - radius);
  }

  for (int it = 0; it < kBisectCap && best_gap > tol * radius; ++it) {
    lam = 0.5 * (lo + hi);
    const double t = evaluate(lam);
    if (t <= radius) {
      hi = lam;
    } else {
      lo = lam;
    }
    if (hi - lo <= 1e-14 * hi) break;
  }

  if (warm != nullptr) {
    warm->lambda = hi;
    warm->dual = q;
  }
  if (best_tv > radius) {
    // Exact feasibility snap: contracting toward part means scales TV
    // linearly, and best_tv is within tol of the radius.
    contract_toward_means(best_x, edges, radius / best_tv);
  }
  return best_x;
}

std::vector<GraphEdge> grid_edges(int rows, int cols) {
  std::vector<GraphEdge> edges;
  edges.reserve(static_cast<std::size_t>(2 * rows * cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int idx = i * cols + j;
      if (i + 1 < rows) edges.push_back({idx, idx + cols});
      if (j + 1 < cols) edges.push_back({idx, idx + 1});
    }
  }
  return edges;
}

Matrix project_tv_ball(const Matrix& v, double epsilon, double tol,
                       GraphTvWarmStart* warm) {
  if (epsilon < 0.0) throw InvalidInput("project_tv_ball: negative epsilon");
  require_finite(v, "project_tv_ball");
  const double tv0 = tv(v);
  if (tv0 <= epsilon) return v;

  const int rows = static_cast<int>(v.rows());
  const int cols = static_cast<int>(v.cols());
  const double mean = v.mean();
  if (epsilon == 0.0) return Matrix::Constant(rows, cols, mean);

  double scale = v.cwiseAbs().maxCoeff();
  const double inner_tol = tol * 1e-1 * std::max(scale, 1e-30);
  constexpr int kInnerCap = 10000;
  constexpr int kSearchCap = 100;
  const double n_edges = static_cast<double>(2 * rows * cols - rows - cols);

  Matrix p(rows, cols);
  Matrix q(rows, cols);
  double lam0 = std::max((tv0 - epsilon) / (2.0 * std::max(n_edges, 1.0)),
                         1e-12 * std::max(scale, 1e-30));
  if (warm != nullptr && warm->lambda > 0.0) lam0 = warm->lambda;

  Matrix x;
  double best_gap = std::numeric_limits<double>::infinity();
  Matrix best_x;
  double best_tv = tv0;

  auto evaluate = [&](double lambda) {
    // Dykstra's corrections must start at zero for the prox to be exact.
    p.setZero();
    q.setZero();
    grid_tv_prox(v, lambda, x, p, q, inner_tol, kInnerCap);
    const double t = tv(x);
    if (std::abs(t - epsilon) < best_gap) {
      best_gap = std::abs(t - epsilon);
      best_x = x;
      best_tv = t;
    }
    return t;
  };

  // lambda = 0 is always a valid infeasible bracket end (tv0 > epsilon).
  double lo = 0.0;
  double tv_lo = tv0;
  double hi = -1.0;
  double tv_hi = 0.0;
  double lam = lam0;
  for (int grow = 0; grow < 200 && hi < 0.0; ++grow) {
    const double t = evaluate(lam);
    if (t <= epsilon) {
      hi = lam;
      tv_hi = t;
    } else {
      lo = lam;
      tv_lo = t;
      lam *= 2.0;
    }
  }
  if (hi < 0.0) {
    std::vector<double> flat(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) flat[i * cols + j] = best_x(i, j);
    }
    throw ProjectionError("grid TV ball: multiplier bracket not found", flat,
                          best_tv - epsilon);
  }

  // If the first guess was already feasible (typical with a warm
  // multiplier), probe just below it to tighten the bracket cheaply.
  if (hi == lam0 && lo == 0.0 && best_gap > tol * epsilon) {
    const double t = evaluate(0.8 * lam0);
    if (t <= epsilon) {
      hi = 0.8 * lam0;
      tv_hi = t;
    } else {
      lo = 0.8 * lam0;
      tv_lo = t;
    }
  }

  // False position on the monotone lambda -> tv curve, with the step
  // clamped away from the bracket ends so it cannot stagnate.
  for (int it = 0; it < kSearchCap && best_gap > tol * epsilon; ++it) {
    double frac = (tv_lo - epsilon) / std::max(tv_lo - tv_hi, 1e-300);
    frac = std::clamp(frac, 0.05, 0.95);
    lam = lo + frac * (hi - lo);
    const double t = evaluate(lam);
    if (t <= epsilon) {
      hi = lam;
      tv_hi = t;
    } else {
      lo = lam;
      tv_lo = t;
    }
    if (hi - lo <= tol * hi) break;
  }

  if (warm != nullptr) warm->lambda = hi;
  if (best_tv > epsilon && best_tv > 0.0) {
    // Exact feasibility snap: the grid is connected, so contracting toward
    // the global mean scales TV linearly.
    const double factor = epsilon / best_tv;
    const double center = best_x.mean();
    best_x = ((best_x.array() - center) * factor + center).matrix();
  }
  return best_x;
}

std::vector<double> project_normalized_tv_ball(
    const std::vector<double>& values, const std::vector<GraphEdge>& edges,
    double epsilon, double tol) {
  if (epsilon < 0.0) {
    throw InvalidInput("project_normalized_tv_ball: negative epsilon");
  }
  if (edges.empty()) return values;  // isolated node, normalized TV is 0
  const double radius = epsilon * static_cast<double>(edges.size());
  return project_graph_tv_ball(values, edges, radius, tol);
}

Matrix project_fused(const Matrix& v, int k, double epsilon, double tol) {
  Matrix u = project_k_sparse(v, k);
  if (std::isinf(epsilon)) return u;
  const ComponentDecomposition decomposition = connected_components(u);
  for (const Component& comp : decomposition.components) {
    const std::vector<double> projected = project_normalized_tv_ball(
        component_values(u, comp), comp.edges, epsilon, tol);
    for (std::size_t t = 0; t < comp.nodes.size(); ++t) {
      u(comp.nodes[t].row, comp.nodes[t].col) = projected[t];
    }
  }
  return u;
}

Matrix project_unit_sphere(const Matrix& x) {
  const double norm = x.norm();
  if (norm == 0.0) throw InvalidInput("project_unit_sphere: zero input");
  return x / norm;
}

Matrix project_nonneg(const Matrix& x) { return x.cwiseMax(0.0); }

std::vector<double> component_values(const Matrix& v, const Component& c) {
  std::vector<double> values;
  values.reserve(c.nodes.size());
  for (const Coord& node : c.nodes) {
    values.push_back(v(node.row, node.col));
  }
  return values;
}

}  // namespace bfcs
