#include <algorithm>
#include <cmath>
#include <limits>

#include "figkit/analysis.hpp"
#include "figkit/error.hpp"

namespace figkit {

std::pair<int, int> grid_shape(std::size_t n) {
  if (n == 0) return {0, 0};
  auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (cols * cols < n) ++cols;
  while (cols > 1 && (cols - 1) * (cols - 1) >= n) --cols;
  const std::size_t rows = (n + cols - 1) / cols;
  return {static_cast<int>(rows), static_cast<int>(cols)};
}

std::vector<double> normalized_coords(const Embedding2D& emb) {
  std::vector<double> out(emb.coords.size());
  for (int axis = 0; axis < 2; ++axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < emb.n; ++i) {
      lo = std::min(lo, emb.coords[2 * i + axis]);
      hi = std::max(hi, emb.coords[2 * i + axis]);
    }
    for (std::size_t i = 0; i < emb.n; ++i) {
      out[2 * i + axis] = hi > lo ? (emb.coords[2 * i + axis] - lo) / (hi - lo) : 0.5;
    }
  }
  return out;
}

namespace {

double cell_cost(const std::vector<double>& pts, std::size_t i, int row, int col, int rows,
                 int cols) {
  const double cx = (col + 0.5) / cols;
  const double cy = (row + 0.5) / rows;
  const double dx = pts[2 * i] - cx;
  const double dy = pts[2 * i + 1] - cy;
  return dx * dx + dy * dy;
}

}  // namespace

double layout_cost(const Embedding2D& emb, const GridLayout& layout) {
  if (layout.cells.size() != emb.n) {
    throw Error(ErrorCode::LayoutMismatch, "layout does not cover the embedding");
  }
  const auto pts = normalized_coords(emb);
  double total = 0.0;
  for (std::size_t i = 0; i < emb.n; ++i) {
    total += cell_cost(pts, i, layout.cells[i].first, layout.cells[i].second, layout.rows,
                       layout.cols);
  }
  return total;
}

std::vector<int> solve_assignment(std::span<const double> cost, int rows, int cols) {
  if (rows > cols || cost.size() != static_cast<std::size_t>(rows) * cols) {
    throw Error(ErrorCode::InvalidArgument, "assignment needs a rows x cols matrix, rows <= cols");
  }
  // Hungarian method with row/column potentials; 1-based with a virtual
  // column 0 holding the row being augmented.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> match(cols + 1, 0), way(cols + 1, 0);
  std::vector<double> minv(cols + 1);
  std::vector<char> used(cols + 1);
  for (int i = 1; i <= rows; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (int j = 1; j <= cols; ++j) {
    if (match[j] != 0) out[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  }
  return out;
}

GridLayout grid_assign(const Embedding2D& emb) {
  if (emb.n == 0) throw Error(ErrorCode::EmptySet, "grid_assign needs at least one point");
  GridLayout layout;
  std::tie(layout.rows, layout.cols) = grid_shape(emb.n);
  const int cells = layout.rows * layout.cols;
  const auto pts = normalized_coords(emb);
  const int n = static_cast<int>(emb.n);
  std::vector<double> cost(static_cast<std::size_t>(n) * cells);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < cells; ++c) {
      cost[static_cast<std::size_t>(i) * cells + c] =
          cell_cost(pts, static_cast<std::size_t>(i), c / layout.cols, c % layout.cols,
                    layout.rows, layout.cols);
    }
  }
  const auto assignment = solve_assignment(cost, n, cells);
  layout.cells.reserve(emb.n);
  for (int c : assignment) layout.cells.emplace_back(c / layout.cols, c % layout.cols);
  return layout;
}

}  // namespace figkit
