#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace kgm {

enum class NodeClass : std::uint8_t { interior, boundary };

// Face order is the canonical one: a node on several faces (edge/corner)
// is attributed to the lowest-index face.
enum class Face : std::uint8_t { xlo = 0, xhi, ylo, yhi, zlo, zhi };

enum class NormKind { L2, L4, Linf, gradL2, H1 };

// Uniform tensor grid on the box [0,L1]x[0,L2]x[0,L3], nodes at the
// Cartesian product of equispaced points including both endpoints.
// Quadrature is the tensor trapezoidal rule; surface weights are the
// per-face 2-D trapezoidal weights summed over incident faces, so they
// partition |dOmega| exactly.
class Grid {
public:
  Grid(std::array<double, 3> lengths, std::array<int, 3> counts);

  static std::shared_ptr<const Grid> make(std::array<double, 3> lengths,
                                          std::array<int, 3> counts) {
    return std::make_shared<const Grid>(lengths, counts);
  }

  const std::array<double, 3>& lengths() const { return lengths_; }
  const std::array<int, 3>& counts() const { return counts_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  double max_spacing() const;

  std::size_t node_count() const { return volume_weight_.size(); }
  std::size_t boundary_count() const { return boundary_nodes_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(counts_[0]) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(counts_[1]) * static_cast<std::size_t>(k));
  }
  std::array<int, 3> coords(std::size_t n) const;
  std::array<double, 3> position(std::size_t n) const;

  NodeClass node_class(std::size_t n) const { return node_class_[n]; }
  bool is_boundary(std::size_t n) const { return node_class_[n] == NodeClass::boundary; }

  double volume_weight(std::size_t n) const { return volume_weight_[n]; }

  // Boundary nodes in ascending node-index order; BoundaryData values are
  // stored parallel to this list.
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_nodes_; }
  // Surface weight / canonical face of the b-th boundary node.
  double surface_weight(std::size_t b) const { return surface_weight_[b]; }
  Face face_id(std::size_t b) const { return face_id_[b]; }
  // Map node index -> position in boundary_nodes(), or npos for interior.
  std::size_t boundary_slot(std::size_t n) const { return boundary_slot_[n]; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  double volume() const { return volume_; }
  double surface_area() const { return surface_area_; }

  // Per-axis trapezoid weight of index i along axis a.
  double axis_weight(int a, int i) const;

private:
  std::array<double, 3> lengths_;
  std::array<int, 3> counts_;
  std::array<double, 3> spacing_;
  double volume_;
  double surface_area_;
  std::vector<NodeClass> node_class_;
  std::vector<double> volume_weight_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<std::size_t> boundary_slot_;
  std::vector<double> surface_weight_;
  std::vector<Face> face_id_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Nodal scalar field. Values are stored x-fastest, matching Grid::index.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t n) { return values_[n]; }
  double operator[](std::size_t n) const { return values_[n]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // True when every boundary node carries exactly 0.
  bool dirichlet_conforming() const;
  void zero_boundary();

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

// Neumann datum h sampled at boundary nodes, with the compatibility
// constant kappa = (surface integral of h) / |Omega| derived at build time.
class BoundaryData {
public:
  explicit BoundaryData(GridPtr grid, double fill = 0.0);
  BoundaryData(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t b) { dirty_ = true; return values_[b]; }
  double operator[](std::size_t b) const { return values_[b]; }
  const std::vector<double>& values() const { return values_; }

  double kappa() const;

private:
  GridPtr grid_;
  std::vector<double> values_;
  mutable double kappa_ = 0.0;
  mutable bool dirty_ = true;
};

// Volume quadrature of f (tensor trapezoid; exact for per-axis-linear f).
double integrate(const ScalarField& f);
// Quadrature inner product sum_n w_n f_n g_n.
double inner(const ScalarField& f, const ScalarField& g);
// Surface quadrature of the boundary datum.
double boundary_integral(const BoundaryData& h);
// integrate(f) / |Omega|.
double average(const ScalarField& f);
// L2/L4/Linf quadrature norms; gradL2 uses centered differences at interior
// nodes and one-sided differences at the boundary; H1 per the working norm
// (grad part plus squared average).
double norm(const ScalarField& f, NormKind kind);

}  // namespace kgm
