#pragma once

// Nystrom discretization of K(lambda) = V R0(lambda) chi on the volume
// grid.  Far pairs use the plain quadrature rule; same-cell pairs are
// product-integrated with a polar (Duffy) subdivision around the target
// node, and nearest-neighbor cells get one level of dyadic refinement.

#include <string>
#include <vector>

#include "diracres/branch.hpp"
#include "diracres/common.hpp"
#include "diracres/determinant.hpp"
#include "diracres/hashing.hpp"
#include "diracres/potential.hpp"
#include "diracres/quadrature.hpp"
#include "diracres/resolvent.hpp"

namespace diracres {

enum class SupportFilter {
  Full,              // all quadrature nodes (spec block structure)
  PotentialSupport,  // rows/cols restricted to supp V; same determinant
};

struct NystromOperator {
  CMat matrix;  // 4N x 4N over the active nodes
  SpectralParameter sp;
  std::string potential_hash;
  std::string grid_hash;
  std::vector<int> active;  // active node indices into the quadrature
};

inline std::string potential_hash(const MatrixPotential& V) {
  Fnv1a h;
  h.feed(static_cast<int>(V.channel));
  h.feed(V.g);
  h.feed(V.R0);
  if (V.channel == PotentialChannel::CustomHermitian)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h.feed(Complex(V.custom(i, j)));
  return h.hex();
}

namespace detail {

// Evaluates all nodes_per_cell tensor Lagrange basis functions of a cell
// at physical point y.  Basis ordering matches node ordering (i,j,k).
struct CellBasis {
  const GaussRule& rule;
  Vec3 corner;
  double h;

  CellBasis(const GaussRule& r, const Vec3& c, double h_)
      : rule(r), corner(c), h(h_) {}

  void eval(const Vec3& y, double* out) const {
    const int q = static_cast<int>(rule.nodes.size());
    double bx[8], by[8], bz[8], axis[8];
    for (int a = 0; a < 3; ++a) {
      for (int j = 0; j < q; ++j)
        axis[j] = corner[a] + 0.5 * h * (rule.nodes[j] + 1.0);
      double* dst = a == 0 ? bx : (a == 1 ? by : bz);
      for (int j = 0; j < q; ++j) {
        double v = 1.0;
        for (int k = 0; k < q; ++k)
          if (k != j) v *= (y[a] - axis[k]) / (axis[j] - axis[k]);
        dst[j] = v;
      }
    }
    int idx = 0;
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        for (int k = 0; k < q; ++k) out[idx++] = bx[i] * by[j] * bz[k];
  }
};

// Accumulates int_cell R0(x_i, y) l_j(y) chi(y) dy for all basis columns j
// of one cell, with x_i inside the cell: six pyramids from x_i to the cell
// faces, polar-in-t transform cancelling the kernel singularity.
inline void duffy_cell_row(const SpectralParameter& sp, const Vec3& xi,
                           const VolumeCell& cell, double h,
                           const CellBasis& basis, const CutoffProfile& chi,
                           int q_duffy, const GaussRule& gd, int ncols,
                           Mat4* out) {
  for (int c = 0; c < ncols; ++c) out[c].setZero();
  std::vector<double> bvals(ncols);
  // faces: (axis, side)
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double plane = cell.corner[axis] + side * h;
      const double delta = std::abs(plane - xi[axis]);
      if (delta < 1e-14) continue;  // node on the face plane: degenerate pyramid
      const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
      for (int iu = 0; iu < q_duffy; ++iu) {
        const double u = cell.corner[u_axis] + 0.5 * h * (gd.nodes[iu] + 1.0);
        for (int iv = 0; iv < q_duffy; ++iv) {
          const double v = cell.corner[v_axis] + 0.5 * h * (gd.nodes[iv] + 1.0);
          Vec3 f;
          f[axis] = plane;
          f[u_axis] = u;
          f[v_axis] = v;
          const Vec3 d = f - xi;
          for (int it = 0; it < q_duffy; ++it) {
            const double t = 0.5 * (gd.nodes[it] + 1.0);
            const Vec3 y = xi + t * d;
            const double jac = t * t * 0.25 * h * h * delta * 0.5;
            const double w =
                gd.weights[iu] * gd.weights[iv] * gd.weights[it] * jac;
            const double cy = chi(y.norm());
            if (cy == 0.0) continue;
            const Mat4 ker = dirac_resolvent_kernel(sp, xi, y);
            basis.eval(y, bvals.data());
            for (int c = 0; c < ncols; ++c)
              if (bvals[c] != 0.0) out[c] += (w * cy * bvals[c]) * ker;
          }
        }
      }
    }
  }
}

// Accumulates int_{cell'} R0(x_i, y) l_j(y) chi(y) dy for a neighbor cell
// via one dyadic subdivision (8 subcells, ambient-order Gauss each).
inline void refined_cell_row(const SpectralParameter& sp, const Vec3& xi,
                             const VolumeCell& cell, double h,
                             const CellBasis& basis, const CutoffProfile& chi,
                             const GaussRule& g, int ncols, Mat4* out) {
  for (int c = 0; c < ncols; ++c) out[c].setZero();
  const int q = static_cast<int>(g.nodes.size());
  std::vector<double> bvals(ncols);
  const double hh = 0.5 * h;
  for (int sx = 0; sx < 2; ++sx)
    for (int sy = 0; sy < 2; ++sy)
      for (int sz = 0; sz < 2; ++sz) {
        const Vec3 corner = cell.corner + Vec3(sx * hh, sy * hh, sz * hh);
        for (int i = 0; i < q; ++i)
          for (int j = 0; j < q; ++j)
            for (int k = 0; k < q; ++k) {
              const Vec3 y = corner + Vec3(0.5 * hh * (g.nodes[i] + 1.0),
                                           0.5 * hh * (g.nodes[j] + 1.0),
                                           0.5 * hh * (g.nodes[k] + 1.0));
              const double w = g.weights[i] * g.weights[j] * g.weights[k] *
                               0.125 * hh * hh * hh;
              const double cy = chi(y.norm());
              if (cy == 0.0) continue;
              const Mat4 ker = dirac_resolvent_kernel(sp, xi, y);
              basis.eval(y, bvals.data());
              for (int c = 0; c < ncols; ++c)
                if (bvals[c] != 0.0) out[c] += (w * cy * bvals[c]) * ker;
            }
      }
}

}  // namespace detail

inline NystromOperator assemble_K(const SpectralParameter& sp,
                                  const MatrixPotential& V,
                                  const CutoffProfile& chi,
                                  const VolumeQuadrature& quad,
                                  SupportFilter filter = SupportFilter::PotentialSupport) {
  if (quad.nodes.empty()) throw InvalidResolution("assemble_K: empty quadrature");

  NystromOperator op;
  op.sp = sp;
  op.potential_hash = potential_hash(V);
  op.grid_hash = quad.hash;

  const int n_all = static_cast<int>(quad.nodes.size());
  std::vector<int> active;
  active.reserve(n_all);
  for (int i = 0; i < n_all; ++i) {
    if (filter == SupportFilter::Full || V.scalar(quad.nodes[i].norm()) != 0.0)
      active.push_back(i);
  }
  op.active = active;
  const int n = static_cast<int>(active.size());
  if (4 * n > 40000)
    throw AllocationFailure("assemble_K: 4N exceeds the 40000 guard");
  std::vector<int> slot(n_all, -1);
  for (int a = 0; a < n; ++a) slot[active[a]] = a;

  op.matrix = CMat::Zero(4 * n, 4 * n);
  if (V.g == 0.0) return op;

  const Mat4 mfac = V.matrix_factor();
  const GaussRule g_ambient = gauss_legendre(quad.gauss_order);
  const int q_duffy = 2 * quad.gauss_order;
  const GaussRule g_duffy = gauss_legendre(q_duffy);
  const int npc = quad.nodes_per_cell();
  std::vector<Mat4> cols(npc);

  for (int a = 0; a < n; ++a) {
    const int i = active[a];
    const Vec3& xi = quad.nodes[i];
    const double vi = V.scalar(xi.norm());
    if (vi == 0.0) continue;
    const Mat4 vmat = vi * mfac;
    const Eigen::Vector3i ci = quad.cells[quad.node_cell[i]].index;

    for (const VolumeCell& cell : quad.cells) {
      const int jcell = static_cast<int>(&cell - quad.cells.data());
      const Eigen::Vector3i dc = (cell.index - ci).cwiseAbs();
      const int cheb = dc.maxCoeff();

      if (cheb <= 1) {
        // local product integration against the cell's Lagrange basis
        detail::CellBasis basis(g_ambient, cell.corner, quad.h);
        if (jcell == quad.node_cell[i])
          detail::duffy_cell_row(sp, xi, cell, quad.h, basis, chi, q_duffy,
                                 g_duffy, npc, cols.data());
        else
          detail::refined_cell_row(sp, xi, cell, quad.h, basis, chi, g_ambient,
                                   npc, cols.data());
        for (int local = 0; local < npc; ++local) {
          const int j = cell.first_node + local;
          const int b = slot[j];
          if (b < 0) continue;
          op.matrix.block<4, 4>(4 * a, 4 * b) = vmat * cols[local];
        }
      } else {
        for (int local = 0; local < npc; ++local) {
          const int j = cell.first_node + local;
          const int b = slot[j];
          if (b < 0) continue;
          const double cj = chi(quad.nodes[j].norm());
          if (cj == 0.0) continue;
          op.matrix.block<4, 4>(4 * a, 4 * b) =
              vmat * dirac_resolvent_kernel(sp, xi, quad.nodes[j]) *
              (cj * quad.weights[j]);
        }
      }
    }
  }
  return op;
}

enum class DetVariant { IdPlusK, IdMinusK4 };

inline LogDet fredholm_logdet(const NystromOperator& K,
                              DetVariant variant = DetVariant::IdPlusK) {
  const Eigen::Index n = K.matrix.rows();
  if (variant == DetVariant::IdPlusK) {
    CMat m = K.matrix;
    m += CMat::Identity(n, n);
    return logdet_lu(std::move(m));
  }
  // det(I - K^4) = det(I+K) det(I-K) det(I+K^2)
  CMat k2(n, n);
  k2.noalias() = K.matrix * K.matrix;
  CMat m = K.matrix + CMat::Identity(n, n);
  const LogDet a = logdet_lu(m);
  m = CMat::Identity(n, n) - K.matrix;
  const LogDet b = logdet_lu(std::move(m));
  k2 += CMat::Identity(n, n);
  const LogDet c = logdet_lu(std::move(k2));
  LogDet out;
  out.log_abs = a.log_abs + b.log_abs + c.log_abs;
  out.arg = std::remainder(a.arg + b.arg + c.arg, 2.0 * pi);
  return out;
}

inline Complex fredholm_det(const NystromOperator& K,
                            DetVariant variant = DetVariant::IdPlusK) {
  return fredholm_logdet(K, variant).value();
}

inline double operator_norm(const NystromOperator& K) {
  return operator_norm_dense(K.matrix);
}

}  // namespace diracres
