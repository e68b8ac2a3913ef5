#pragma once

// Deterministic quadrature grids: tensor Gauss-Legendre cells over the
// cutoff support ball, and a product rule on the unit sphere.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "diracres/common.hpp"
#include "diracres/hashing.hpp"

namespace diracres {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Legendre nodes by Newton iteration on P_n; deterministic to the bit.
inline GaussRule gauss_legendre(int n) {
  if (n < 1 || n > 256) throw InvalidResolution("gauss_legendre: order out of range");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

struct VolumeCell {
  Eigen::Vector3i index;  // cell coordinates in the cube
  Vec3 corner;            // lower corner
  int first_node;         // offset into the node list
};

struct VolumeQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  std::vector<int> node_cell;  // cell id per node
  std::vector<VolumeCell> cells;
  double R_outer = 0.0;  // support radius of chi
  double h = 0.0;        // cell edge length
  int cells_per_axis = 0;
  int gauss_order = 0;
  double covered_volume = 0.0;  // exact volume of kept cells
  std::string hash;

  int nodes_per_cell() const { return gauss_order * gauss_order * gauss_order; }
};

// Tensor Gauss-Legendre nodes over [-(R0+m), R0+m]^3; cells wholly
// outside the ball |x| <= R0+m are discarded.
inline VolumeQuadrature build_volume_quadrature(double R0, double margin,
                                                int cells_per_axis,
                                                int gauss_order) {
  if (cells_per_axis < 2 || gauss_order < 1 || gauss_order > 6)
    throw InvalidResolution("build_volume_quadrature: bad resolution");
  if (!(R0 > 0.0) || !(margin > 0.0))
    throw NonPositiveRadius("build_volume_quadrature: R0, margin must be positive");

  VolumeQuadrature q;
  q.R_outer = R0 + margin;
  q.cells_per_axis = cells_per_axis;
  q.gauss_order = gauss_order;
  q.h = 2.0 * q.R_outer / cells_per_axis;

  const GaussRule g = gauss_legendre(gauss_order);
  const double half = 0.5 * q.h;

  for (int cx = 0; cx < cells_per_axis; ++cx)
    for (int cy = 0; cy < cells_per_axis; ++cy)
      for (int cz = 0; cz < cells_per_axis; ++cz) {
        const Vec3 corner(-q.R_outer + cx * q.h, -q.R_outer + cy * q.h,
                          -q.R_outer + cz * q.h);
        // nearest point of the cell to the origin
        Vec3 nearest;
        for (int a = 0; a < 3; ++a)
          nearest[a] = std::clamp(0.0, corner[a], corner[a] + q.h);
        if (nearest.norm() > q.R_outer) continue;  // cell wholly outside ball

        VolumeCell cell;
        cell.index = Eigen::Vector3i(cx, cy, cz);
        cell.corner = corner;
        cell.first_node = static_cast<int>(q.nodes.size());
        const int cell_id = static_cast<int>(q.cells.size());
        for (int i = 0; i < gauss_order; ++i)
          for (int j = 0; j < gauss_order; ++j)
            for (int k = 0; k < gauss_order; ++k) {
              const Vec3 x = corner + Vec3(half * (g.nodes[i] + 1.0),
                                           half * (g.nodes[j] + 1.0),
                                           half * (g.nodes[k] + 1.0));
              q.nodes.push_back(x);
              q.weights.push_back(g.weights[i] * g.weights[j] * g.weights[k] *
                                  half * half * half);
              q.node_cell.push_back(cell_id);
            }
        q.cells.push_back(cell);
        q.covered_volume += q.h * q.h * q.h;
      }

  Fnv1a hash;
  hash.feed(R0);
  hash.feed(margin);
  hash.feed(cells_per_axis);
  hash.feed(gauss_order);
  q.hash = hash.hex();
  return q;
}

struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // sum to 4 pi
  int polar_order = 0;
  int azimuthal_count = 0;
};

// Product rule: Gauss-Legendre in cos(theta) x uniform in phi.
inline SphereQuadrature build_sphere_quadrature(int polar_order,
                                                int azimuthal_count) {
  if (polar_order < 4 || azimuthal_count < 8)
    throw InvalidResolution("build_sphere_quadrature: order too low");
  SphereQuadrature s;
  s.polar_order = polar_order;
  s.azimuthal_count = azimuthal_count;
  const GaussRule g = gauss_legendre(polar_order);
  const double dphi = 2.0 * pi / azimuthal_count;
  for (int i = 0; i < polar_order; ++i) {
    const double c = g.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < azimuthal_count; ++j) {
      const double phi = dphi * j;
      s.nodes.emplace_back(st * std::cos(phi), st * std::sin(phi), c);
      s.weights.push_back(g.weights[i] * dphi);
    }
  }
  return s;
}

}  // namespace diracres
