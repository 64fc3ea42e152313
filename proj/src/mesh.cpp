#include "tresca/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace tresca {

namespace {

struct GridVertex {
  std::array<int, 3> index{};  // structured indices, last one vertical
};

// Kuhn subdivision of the unit cube: one tetrahedron per axis permutation.
constexpr std::array<std::array<int, 3>, 6> kPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

}  // namespace

Vec Mesh::point(std::size_t c, const Eigen::Vector4d& bary) const {
  Vec x = Vec::Zero(dim_);
  for (int i = 0; i <= dim_; ++i) x += bary(i) * vertices_[cells_[c][i]];
  return x;
}

Eigen::Vector4d Mesh::barycentric(std::size_t c, const Vec& x) const {
  Eigen::Vector4d l = Eigen::Vector4d::Zero();
  const Vec& x0 = vertices_[cells_[c][0]];
  double rest = 1.0;
  for (int i = 1; i <= dim_; ++i) {
    l(i) = grad_lambda_[c].row(i).head(dim_).dot(x - x0);
    rest -= l(i);
  }
  l(0) = rest;
  return l;
}

double Mesh::omega_measure() const {
  double s = 0.0;
  for (double v : volume_) s += v;
  return s;
}

double Mesh::boundary_measure(FacetTag tag) const {
  double s = 0.0;
  for (const auto& f : facets_)
    if (f.tag == tag) s += f.measure;
  return s;
}

double Mesh::min_cell_diameter() const {
  double h = std::numeric_limits<double>::max();
  for (std::size_t c = 0; c < cells_.size(); ++c)
    for (int i = 0; i <= dim_; ++i)
      for (int j = i + 1; j <= dim_; ++j)
        h = std::min(h, (vertices_[cells_[c][i]] - vertices_[cells_[c][j]]).norm());
  return h;
}

double Mesh::max_cell_diameter() const {
  double h = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c)
    for (int i = 0; i <= dim_; ++i)
      for (int j = i + 1; j <= dim_; ++j)
        h = std::max(h, (vertices_[cells_[c][i]] - vertices_[cells_[c][j]]).norm());
  return h;
}

Mesh build_mesh(const ChannelDomain& domain) {
  const int d = domain.dim;
  if (d != 2 && d != 3) throw DomainError("channel dimension must be 2 or 3");
  if (domain.resolution < 1) throw DomainError("mesh resolution must be >= 1");
  if (domain.lower.size() != d - 1 || domain.upper.size() != d - 1)
    throw DomainError("omega extents must have d - 1 components");
  for (int i = 0; i < d - 1; ++i)
    if (!(domain.upper(i) > domain.lower(i))) throw DomainError("omega extents must be increasing");
  if (!domain.height) throw DomainError("height function missing");

  const int n = domain.resolution;
  const int ny = d == 3 ? n : 0;  // second horizontal direction
  Mesh mesh;
  mesh.dim_ = d;
  mesh.resolution_ = n;

  auto vid = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (n + 1) + i; };
  std::vector<GridVertex> grid;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= n; ++i) {
        Vec x(d);
        x(0) = domain.lower(0) + (domain.upper(0) - domain.lower(0)) * i / n;
        if (d == 3) x(1) = domain.lower(1) + (domain.upper(1) - domain.lower(1)) * j / n;
        x(d - 1) = 0.0;
        const double h = domain.height(x);
        if (!(h > 0.0) || !std::isfinite(h))
          throw DomainError("channel height must be positive at every sample");
        x(d - 1) = h * k / n;
        mesh.vertices_.push_back(x);
        grid.push_back(GridVertex{{i, j, k}});
      }

  if (d == 2) {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const int a = vid(i, 0, k), b = vid(i + 1, 0, k), c = vid(i + 1, 0, k + 1),
                  e = vid(i, 0, k + 1);
        mesh.cells_.push_back({a, b, c, -1});
        mesh.cells_.push_back({a, c, e, -1});
      }
  } else {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          for (const auto& perm : kPermutations) {
            std::array<int, 3> pos = {i, j, k};
            std::array<int, 4> tet{};
            tet[0] = vid(pos[0], pos[1], pos[2]);
            for (int s = 0; s < 3; ++s) {
              ++pos[perm[s]];
              tet[s + 1] = vid(pos[0], pos[1], pos[2]);
            }
            mesh.cells_.push_back(tet);
          }
  }

  // Geometry; reorient to positive volume.
  for (auto& cell : mesh.cells_) {
    Mat J(d, d);
    for (int i = 0; i < d; ++i) J.col(i) = mesh.vertices_[cell[i + 1]] - mesh.vertices_[cell[0]];
    double det = J.determinant();
    if (det < 0) {
      std::swap(cell[1], cell[2]);
      for (int i = 0; i < d; ++i) J.col(i) = mesh.vertices_[cell[i + 1]] - mesh.vertices_[cell[0]];
      det = J.determinant();
    }
    const Mat Jinv_t = J.inverse().transpose();
    Eigen::Matrix<double, 4, 3> g = Eigen::Matrix<double, 4, 3>::Zero();
    Vec sum = Vec::Zero(d);
    for (int i = 1; i <= d; ++i) {
      const Vec gi = Jinv_t.col(i - 1);
      g.row(i).head(d) = gi.transpose();
      sum += gi;
    }
    g.row(0).head(d) = -sum.transpose();
    mesh.grad_lambda_.push_back(g);
    mesh.volume_.push_back(std::abs(det) / (d == 2 ? 2.0 : 6.0));
  }

  // Boundary facets: facets owned by exactly one cell.
  std::map<std::array<int, 3>, std::pair<int, int>> owners;  // key -> (cell, count)
  for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
    for (int skip = 0; skip <= d; ++skip) {
      std::array<int, 3> key = {-1, -1, -1};
      int m = 0;
      for (int i = 0; i <= d; ++i)
        if (i != skip) key[m++] = mesh.cells_[c][i];
      std::sort(key.begin(), key.begin() + d);
      auto [it, inserted] = owners.try_emplace(key, static_cast<int>(c), 0);
      ++it->second.second;
    }
  }
  for (const auto& [key, owner] : owners) {
    if (owner.second != 1) continue;
    BoundaryFacet f;
    f.vertices = key;
    f.cell = owner.first;
    bool bottom = true, top = true;
    for (int i = 0; i < d; ++i) {
      bottom = bottom && grid[key[i]].index[2] == 0;
      top = top && grid[key[i]].index[2] == n;
    }
    f.tag = bottom ? FacetTag::gamma0 : (top ? FacetTag::gamma1 : FacetTag::lateral);

    const Vec& p0 = mesh.vertices_[key[0]];
    Vec normal(d);
    if (d == 2) {
      const Vec t = mesh.vertices_[key[1]] - p0;
      normal << t(1), -t(0);
      f.measure = t.norm();
    } else {
      const Eigen::Vector3d a = mesh.vertices_[key[1]] - p0;
      const Eigen::Vector3d b = mesh.vertices_[key[2]] - p0;
      const Eigen::Vector3d cr = a.cross(b);
      normal = cr;
      f.measure = 0.5 * cr.norm();
    }
    normal /= normal.norm();
    // orient away from the opposite vertex of the owning cell
    const auto& cell = mesh.cells_[f.cell];
    for (int i = 0; i <= d; ++i) {
      const int v = cell[i];
      if (std::find(key.begin(), key.begin() + d, v) == key.begin() + d) {
        if (normal.dot(mesh.vertices_[v] - p0) > 0) normal = -normal;
        break;
      }
    }
    f.normal = normal;
    mesh.facets_.push_back(f);
  }
  return mesh;
}

void write_mesh_vtk(const Mesh& mesh, std::ostream& out) {
  const int d = mesh.dim();
  out.precision(17);
  out << "# vtk DataFile Version 3.0\nchannel mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const Vec& x = mesh.vertex(i);
    out << x(0) << ' ' << x(1) << ' ' << (d == 3 ? x(2) : 0.0) << '\n';
  }
  const std::size_t nc = mesh.num_cells(), nf = mesh.facets().size();
  out << "CELLS " << nc + nf << ' ' << nc * (d + 2) + nf * (d + 1) << '\n';
  for (std::size_t c = 0; c < nc; ++c) {
    out << d + 1;
    for (int i = 0; i <= d; ++i) out << ' ' << mesh.cell(c)[i];
    out << '\n';
  }
  for (const auto& f : mesh.facets()) {
    out << d;
    for (int i = 0; i < d; ++i) out << ' ' << f.vertices[i];
    out << '\n';
  }
  out << "CELL_TYPES " << nc + nf << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << (d == 2 ? 5 : 10) << '\n';
  for (std::size_t i = 0; i < nf; ++i) out << (d == 2 ? 3 : 5) << '\n';
  out << "CELL_DATA " << nc + nf << "\nSCALARS facet_tag int 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < nc; ++c) out << -1 << '\n';
  for (const auto& f : mesh.facets()) out << static_cast<int>(f.tag) << '\n';
}

}  // namespace tresca
