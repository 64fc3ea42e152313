#pragma once

#include "tresca/types.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace tresca {

/// Boundary parts with their exported integer codes.
enum class FacetTag : int { gamma0 = 0, gamma1 = 1, lateral = 2 };

/// Channel Omega = {x' in omega, 0 < x_d < h(x')} with omega a box.
struct ChannelDomain {
  int dim = 2;
  Vec lower;       ///< size dim - 1
  Vec upper;       ///< size dim - 1
  ScalarFn height; ///< h(x), evaluated with x_d = 0
  int resolution = 4;
};

struct BoundaryFacet {
  std::array<int, 3> vertices{};  ///< dim entries used
  int cell = -1;
  FacetTag tag = FacetTag::lateral;
  Vec normal;  ///< outward unit normal
  double measure = 0.0;
};

/// Conforming simplicial mesh of a channel. Immutable after construction.
class Mesh {
 public:
  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  int vertices_per_cell() const { return dim_ + 1; }

  const Vec& vertex(std::size_t i) const { return vertices_[i]; }
  const std::array<int, 4>& cell(std::size_t c) const { return cells_[c]; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }

  /// Row i is the (constant) gradient of barycentric coordinate i on cell c.
  const Eigen::Matrix<double, 4, 3>& barycentric_gradients(std::size_t c) const {
    return grad_lambda_[c];
  }
  double cell_volume(std::size_t c) const { return volume_[c]; }
  Vec point(std::size_t c, const Eigen::Vector4d& bary) const;
  Eigen::Vector4d barycentric(std::size_t c, const Vec& x) const;

  double omega_measure() const;
  double boundary_measure(FacetTag tag) const;
  double min_cell_diameter() const;
  double max_cell_diameter() const;
  int resolution() const { return resolution_; }

  friend Mesh build_mesh(const ChannelDomain& domain);

 private:
  int dim_ = 2;
  int resolution_ = 0;
  std::vector<Vec> vertices_;
  std::vector<std::array<int, 4>> cells_;
  std::vector<BoundaryFacet> facets_;
  std::vector<Eigen::Matrix<double, 4, 3>> grad_lambda_;
  std::vector<double> volume_;
};

/// Structured mesh: `resolution` cells along every direction, quads split
/// into 2 triangles (d = 2) or cubes into 6 Kuhn tetrahedra (d = 3), then
/// mapped vertically onto 0 < x_d < h(x').
Mesh build_mesh(const ChannelDomain& domain);

/// Legacy VTK ASCII unstructured grid holding the volume cells followed by
/// the boundary facets. Cell field `facet_tag` is -1 on volume cells and
/// 0 (Gamma0), 1 (Gamma1) or 2 (lateral) on facets.
void write_mesh_vtk(const Mesh& mesh, std::ostream& out);

}  // namespace tresca
