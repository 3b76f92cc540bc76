#include "exlgm/mesh.hpp"

#include <cmath>
#include <string>

#include "exlgm/errors.hpp"

namespace exlgm {

LatticeMesh build_mesh(const BoundingBox& bbox, double spacing, double margin) {
  if (!(spacing > 0.0)) throw invalid_input("mesh spacing must be positive");
  if (!(margin >= 0.0)) throw invalid_input("mesh margin must be nonnegative");
  if (!(bbox.xmax > bbox.xmin) || !(bbox.ymax > bbox.ymin))
    throw invalid_input("mesh bounding box is degenerate");
  const double wx = bbox.xmax - bbox.xmin + 2.0 * margin;
  const double wy = bbox.ymax - bbox.ymin + 2.0 * margin;
  if (spacing > wx || spacing > wy)
    throw invalid_input("mesh spacing exceeds the (expanded) bounding box extent");

  LatticeMesh m;
  m.spacing = spacing;
  m.x0 = bbox.xmin - margin;
  m.y0 = bbox.ymin - margin;
  // enough intervals to cover the expanded box; tolerance absorbs exact multiples
  m.nx = static_cast<int>(std::ceil(wx / spacing - 1e-9)) + 1;
  m.ny = static_cast<int>(std::ceil(wy / spacing - 1e-9)) + 1;
  if (m.node_count() < 4) throw invalid_input("mesh must contain at least 4 nodes");
  return m;
}

Eigen::SparseMatrix<double> build_projection(const LatticeMesh& mesh,
                                             const std::vector<Eigen::Vector2d>& sites) {
  const double eps = 1e-9 * mesh.spacing;
  std::string offenders;
  for (std::size_t r = 0; r < sites.size(); ++r) {
    const auto& s = sites[r];
    if (s.x() < mesh.x0 - eps || s.x() > mesh.x_max() + eps || s.y() < mesh.y0 - eps ||
        s.y() > mesh.y_max() + eps)
      offenders += (offenders.empty() ? "" : ", ") + std::to_string(r);
  }
  if (!offenders.empty())
    throw out_of_hull("sites outside the mesh hull (row indices): " + offenders);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * sites.size());
  for (std::size_t r = 0; r < sites.size(); ++r) {
    double fx = (sites[r].x() - mesh.x0) / mesh.spacing;
    double fy = (sites[r].y() - mesh.y0) / mesh.spacing;
    int ix = std::min(std::max(static_cast<int>(std::floor(fx)), 0), mesh.nx - 2);
    int iy = std::min(std::max(static_cast<int>(std::floor(fy)), 0), mesh.ny - 2);
    const double ax = std::min(std::max(fx - ix, 0.0), 1.0);
    const double ay = std::min(std::max(fy - iy, 0.0), 1.0);
    const double w[4] = {(1.0 - ax) * (1.0 - ay), ax * (1.0 - ay), (1.0 - ax) * ay, ax * ay};
    const int cols[4] = {mesh.index(ix, iy), mesh.index(ix + 1, iy), mesh.index(ix, iy + 1),
                         mesh.index(ix + 1, iy + 1)};
    for (int k = 0; k < 4; ++k)
      if (w[k] != 0.0) trips.emplace_back(static_cast<int>(r), cols[k], w[k]);
  }
  Eigen::SparseMatrix<double> A(static_cast<int>(sites.size()), mesh.node_count());
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace exlgm
