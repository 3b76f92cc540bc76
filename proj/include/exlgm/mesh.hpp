#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

namespace exlgm {

struct BoundingBox {
  double xmin, ymin, xmax, ymax;
};

/// Regular rectangular lattice used to discretize the spatial random effects.
/// Nodes are ordered row-major: node(i, j) = j*nx + i at
/// (x0 + i*spacing, y0 + j*spacing).
struct LatticeMesh {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double spacing = 0.0;

  int node_count() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  Eigen::Vector2d node(int k) const {
    return {x0 + (k % nx) * spacing, y0 + (k / nx) * spacing};
  }
  double x_max() const { return x0 + (nx - 1) * spacing; }
  double y_max() const { return y0 + (ny - 1) * spacing; }
  bool contains(double x, double y) const {
    return x >= x0 && x <= x_max() && y >= y0 && y <= y_max();
  }
};

/// Lattice covering bbox expanded by margin on every side. The margin
/// mitigates boundary effects of the SPDE discretization; 2x the spacing is a
/// reasonable default.
LatticeMesh build_mesh(const BoundingBox& bbox, double spacing, double margin);

/// Sparse N x node_count matrix of bilinear interpolation weights from mesh
/// nodes to sites. Rows sum to one; exact zeros are pruned, so a site on a
/// node yields a single unit entry. Throws out_of_hull when a site falls
/// outside the lattice.
Eigen::SparseMatrix<double> build_projection(const LatticeMesh& mesh,
                                             const std::vector<Eigen::Vector2d>& sites);

}  // namespace exlgm
