#include "wavecoh/contours.hpp"

#include <map>
#include <utility>

namespace wavecoh {

namespace {

// Integer lattice corner (u, j) stands for (u - 0.5, j - 0.5).
using Corner = std::pair<long, long>;

struct Edge {
  Corner from;
  Corner to;
};

// Direction index: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
int direction(const Edge& e) {
  const long dx = e.to.first - e.from.first;
  const long dy = e.to.second - e.from.second;
  if (dx > 0) return 0;
  if (dy > 0) return 1;
  if (dx < 0) return 2;
  return 3;
}

}  // namespace

std::vector<Contour> boundary_loops(const Matrix<std::uint8_t>& mask) {
  const long rows = static_cast<long>(mask.rows());
  const long cols = static_cast<long>(mask.cols());
  auto set = [&](long j, long u) {
    return j >= 0 && u >= 0 && j < rows && u < cols &&
           mask(static_cast<std::size_t>(j), static_cast<std::size_t>(u)) != 0;
  };

  // Directed boundary edges; each set cell is walked +x, +y, -x, -y.
  std::vector<Edge> edges;
  for (long j = 0; j < rows; ++j) {
    for (long u = 0; u < cols; ++u) {
      if (!set(j, u)) continue;
      if (!set(j - 1, u)) edges.push_back({{u, j}, {u + 1, j}});
      if (!set(j, u + 1)) edges.push_back({{u + 1, j}, {u + 1, j + 1}});
      if (!set(j + 1, u)) edges.push_back({{u + 1, j + 1}, {u, j + 1}});
      if (!set(j, u - 1)) edges.push_back({{u, j + 1}, {u, j}});
    }
  }

  std::multimap<Corner, std::size_t> outgoing;
  for (std::size_t i = 0; i < edges.size(); ++i) outgoing.emplace(edges[i].from, i);
  std::vector<bool> used(edges.size(), false);

  std::vector<Contour> loops;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::size_t> chain;
    std::size_t current = start;
    while (true) {
      used[current] = true;
      chain.push_back(current);
      const Corner at = edges[current].to;
      if (at == edges[start].from) break;
      // At a saddle two edges leave the corner; the cell-wrapping turn keeps to the current cell.
      const int heading = direction(edges[current]);
      std::size_t best = edges.size();
      int best_turn = 4;
      auto [lo, hi] = outgoing.equal_range(at);
      for (auto it = lo; it != hi; ++it) {
        if (used[it->second]) continue;
        // turn 1 wraps the current cell, 0 continues straight.
        const int turn = (direction(edges[it->second]) - heading + 4) % 4;
        const int rank = turn == 1 ? 0 : turn == 0 ? 1 : 2;
        if (rank < best_turn) {
          best_turn = rank;
          best = it->second;
        }
      }
      if (best == edges.size()) break;
      current = best;
    }

    Contour loop;
    const std::size_t m = chain.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Edge& in = edges[chain[(i + m - 1) % m]];
      const Edge& out = edges[chain[i]];
      if (direction(in) == direction(out)) continue;
      loop.points.push_back({static_cast<double>(out.from.first) - 0.5,
                             static_cast<double>(out.from.second) - 0.5});
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<Contour> significance_contours(const SignificanceField& sig) {
  return boundary_loops(sig.significant);
}

}  // namespace wavecoh
