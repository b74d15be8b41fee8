#include "kgm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kgm {

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid() &&
      (!a.grid() || !b.grid() || a.grid()->counts() != b.grid()->counts() ||
       a.grid()->lengths() != b.grid()->lengths())) {
    throw std::invalid_argument("scalar fields live on different grids");
  }
}

}  // namespace

Grid::Grid(std::array<double, 3> lengths, std::array<int, 3> counts)
    : lengths_(lengths), counts_(counts) {
  for (int a = 0; a < 3; ++a) {
    if (!(lengths_[a] > 0.0)) throw std::invalid_argument("grid lengths must be positive");
    if (counts_[a] < 3) throw std::invalid_argument("grid needs at least 3 nodes per axis");
    spacing_[a] = lengths_[a] / static_cast<double>(counts_[a] - 1);
  }
  volume_ = lengths_[0] * lengths_[1] * lengths_[2];
  surface_area_ = 2.0 * (lengths_[0] * lengths_[1] + lengths_[1] * lengths_[2] +
                         lengths_[0] * lengths_[2]);

  const std::size_t n = static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2];
  node_class_.resize(n);
  volume_weight_.resize(n);
  boundary_slot_.assign(n, npos);

  for (int k = 0; k < counts_[2]; ++k) {
    for (int j = 0; j < counts_[1]; ++j) {
      for (int i = 0; i < counts_[0]; ++i) {
        const std::size_t id = index(i, j, k);
        volume_weight_[id] = axis_weight(0, i) * axis_weight(1, j) * axis_weight(2, k);

        // Lowest-index face wins as the canonical tag.
        Face face = Face::xlo;
        int incident = 0;
        double sweight = 0.0;
        auto touch = [&](bool on, Face f, double w) {
          if (!on) return;
          if (incident == 0) face = f;
          ++incident;
          sweight += w;
        };
        const double wyz = axis_weight(1, j) * axis_weight(2, k);
        const double wxz = axis_weight(0, i) * axis_weight(2, k);
        const double wxy = axis_weight(0, i) * axis_weight(1, j);
        touch(i == 0, Face::xlo, wyz);
        touch(i == counts_[0] - 1, Face::xhi, wyz);
        touch(j == 0, Face::ylo, wxz);
        touch(j == counts_[1] - 1, Face::yhi, wxz);
        touch(k == 0, Face::zlo, wxy);
        touch(k == counts_[2] - 1, Face::zhi, wxy);

        if (incident > 0) {
          node_class_[id] = NodeClass::boundary;
          boundary_slot_[id] = boundary_nodes_.size();
          boundary_nodes_.push_back(id);
          surface_weight_.push_back(sweight);
          face_id_.push_back(face);
        } else {
          node_class_[id] = NodeClass::interior;
        }
      }
    }
  }
}

double Grid::max_spacing() const {
  return std::max({spacing_[0], spacing_[1], spacing_[2]});
}

double Grid::axis_weight(int a, int i) const {
  const bool edge = (i == 0 || i == counts_[a] - 1);
  return edge ? 0.5 * spacing_[a] : spacing_[a];
}

std::array<int, 3> Grid::coords(std::size_t n) const {
  const int nx = counts_[0];
  const int ny = counts_[1];
  const int i = static_cast<int>(n % nx);
  const int j = static_cast<int>((n / nx) % ny);
  const int k = static_cast<int>(n / (static_cast<std::size_t>(nx) * ny));
  return {i, j, k};
}

std::array<double, 3> Grid::position(std::size_t n) const {
  const auto c = coords(n);
  return {c[0] * spacing_[0], c[1] * spacing_[1], c[2] * spacing_[2]};
}

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->node_count(), fill) {}

bool ScalarField::dirichlet_conforming() const {
  for (std::size_t n : grid_->boundary_nodes())
    if (values_[n] != 0.0) return false;
  return true;
}

void ScalarField::zero_boundary() {
  for (std::size_t n : grid_->boundary_nodes()) values_[n] = 0.0;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other[n];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other[n];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

BoundaryData::BoundaryData(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->boundary_count(), fill) {}

BoundaryData::BoundaryData(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->boundary_count())
    throw std::invalid_argument("boundary data size does not match grid");
}

double BoundaryData::kappa() const {
  if (dirty_) {
    const double raw = boundary_integral(*this) / grid_->volume();
    // Snap quadrature roundoff to an exactly compatible datum: a mean-zero
    // profile must yield kappa = 0, not 1e-17.
    double scale = 0.0;
    for (std::size_t b = 0; b < values_.size(); ++b)
      scale += grid_->surface_weight(b) * std::abs(values_[b]);
    scale /= grid_->volume();
    kappa_ = (std::abs(raw) <= 1e-14 * scale) ? 0.0 : raw;
    dirty_ = false;
  }
  return kappa_;
}

double integrate(const ScalarField& f) {
  if (!f.grid()) throw std::invalid_argument("field has no grid");
  const Grid& g = *f.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) s += g.volume_weight(n) * f[n];
  return s;
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  const Grid& gr = *f.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) s += gr.volume_weight(n) * f[n] * g[n];
  return s;
}

double boundary_integral(const BoundaryData& h) {
  const Grid& g = *h.grid();
  double s = 0.0;
  for (std::size_t b = 0; b < h.size(); ++b) s += g.surface_weight(b) * h[b];
  return s;
}

double average(const ScalarField& f) { return integrate(f) / f.grid()->volume(); }

namespace {

// Squared gradient by axis-wise centered differences (one-sided at the two
// end planes), integrated with the volume weights.
double grad_l2_squared(const ScalarField& f) {
  const Grid& g = *f.grid();
  const auto& c = g.counts();
  const auto& h = g.spacing();
  double total = 0.0;
  for (int k = 0; k < c[2]; ++k) {
    for (int j = 0; j < c[1]; ++j) {
      for (int i = 0; i < c[0]; ++i) {
        const std::size_t id = g.index(i, j, k);
        double gx, gy, gz;
        if (i == 0)
          gx = (f[g.index(1, j, k)] - f[id]) / h[0];
        else if (i == c[0] - 1)
          gx = (f[id] - f[g.index(i - 1, j, k)]) / h[0];
        else
          gx = (f[g.index(i + 1, j, k)] - f[g.index(i - 1, j, k)]) / (2.0 * h[0]);
        if (j == 0)
          gy = (f[g.index(i, 1, k)] - f[id]) / h[1];
        else if (j == c[1] - 1)
          gy = (f[id] - f[g.index(i, j - 1, k)]) / h[1];
        else
          gy = (f[g.index(i, j + 1, k)] - f[g.index(i, j - 1, k)]) / (2.0 * h[1]);
        if (k == 0)
          gz = (f[g.index(i, j, 1)] - f[id]) / h[2];
        else if (k == c[2] - 1)
          gz = (f[id] - f[g.index(i, j, k - 1)]) / h[2];
        else
          gz = (f[g.index(i, j, k + 1)] - f[g.index(i, j, k - 1)]) / (2.0 * h[2]);
        total += g.volume_weight(id) * (gx * gx + gy * gy + gz * gz);
      }
    }
  }
  return total;
}

}  // namespace

double norm(const ScalarField& f, NormKind kind) {
  const Grid& g = *f.grid();
  switch (kind) {
    case NormKind::L2: {
      double s = 0.0;
      for (std::size_t n = 0; n < f.size(); ++n) s += g.volume_weight(n) * f[n] * f[n];
      return std::sqrt(s);
    }
    case NormKind::L4: {
      double s = 0.0;
      for (std::size_t n = 0; n < f.size(); ++n) {
        const double v2 = f[n] * f[n];
        s += g.volume_weight(n) * v2 * v2;
      }
      return std::pow(s, 0.25);
    }
    case NormKind::Linf: {
      double s = 0.0;
      for (std::size_t n = 0; n < f.size(); ++n) s = std::max(s, std::abs(f[n]));
      return s;
    }
    case NormKind::gradL2:
      return std::sqrt(grad_l2_squared(f));
    case NormKind::H1: {
      const double a = average(f);
      return std::sqrt(grad_l2_squared(f) + a * a);
    }
  }
  throw std::invalid_argument("unknown norm kind");
}

}  // namespace kgm
