#pragma once

#include <cstdint>
#include <vector>

#include "wavecoh/matrix.hpp"
#include "wavecoh/significance.hpp"

namespace wavecoh {

/// Vertex in grid coordinates: x is the time index, y the scale index.
/// Cell (j, u) spans [u - 0.5, u + 0.5] x [j - 0.5, j + 0.5].
struct ContourPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ContourPoint&, const ContourPoint&) = default;
};

/// Closed loop; the segment from the last vertex back to the first is implied.
/// Collinear vertices are removed, so a lone cell yields exactly four vertices.
struct Contour {
  std::vector<ContourPoint> points;
};

/// Boundaries between set and unset cells of `mask`. Every loop has the set
/// cells on the same side. Diagonally touching cells get separate loops.
std::vector<Contour> boundary_loops(const Matrix<std::uint8_t>& mask);

std::vector<Contour> significance_contours(const SignificanceField& sig);

}  // namespace wavecoh
