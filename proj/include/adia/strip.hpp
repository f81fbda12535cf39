#ifndef ADIA_STRIP_HPP
#define ADIA_STRIP_HPP

#include <Eigen/Dense>

#include "adia/catalog.hpp"
#include "adia/chart.hpp"
#include "adia/morse.hpp"

namespace adia {

/// Adiabatic graph boundary data: bottom p = eps*a(q), top p = eps*(a+df)(q).
struct AdiabaticData {
  OneForm a_form;
  MorseData f;
  double eps = 0.0;

  Vec2 bottom_target(const Vec2& q) const { return Vec2(eps * a_form.a(q)); }
  Vec2 top_target(const Vec2& q) const { return Vec2(eps * (a_form.a(q) + f.df(q))); }

  /// Max |d1 a2 - d2 a1| over a sample grid (0 identically for d=1).
  double closedness_defect(const MetricChart& chart, int samples = 32) const;
};

/// Discretized map u = (Q, P) on a node-centered grid over [-r,r] x [0,1].
/// Q is stored as lifted real values (no torus wrapping inside a field).
struct StripField {
  double r = 1.0;
  int Ns = 0, Nt = 0;
  // component-major storage, arrays are (Ns+1) x (Nt+1)
  std::array<Eigen::ArrayXXd, 2> q;
  std::array<Eigen::ArrayXXd, 2> p;

  StripField() = default;
  StripField(double r_, int Ns_, int Nt_);

  double hs() const { return 2.0 * r / Ns; }
  double ht() const { return 1.0 / Nt; }
  double s_of(int i) const { return -r + i * hs(); }
  double t_of(int j) const { return j * ht(); }

  Vec2 Q(int i, int j) const { return Vec2(q[0](i, j), q[1](i, j)); }
  Vec2 P(int i, int j) const { return Vec2(p[0](i, j), p[1](i, j)); }
  void setQ(int i, int j, const Vec2& v) { q[0](i, j) = v[0]; q[1](i, j) = v[1]; }
  void setP(int i, int j, const Vec2& v) { p[0](i, j) = v[0]; p[1](i, j) = v[1]; }
};

enum class EquationMode {
  plain_cr,        // g dQ/ds = nabla_t P, g dQ/dt = -nabla_s P
  floer_modified,  // adds the zeroth-order term: g dQ/ds - nabla_t P = eps df(Q)
};

/// Per-node residual of the first-order system; boundary t-rows carry the
/// graph-condition defect in e1.
struct ResidualField {
  std::array<Eigen::ArrayXXd, 2> e1;
  std::array<Eigen::ArrayXXd, 2> e2;

  double interior_max(int dim) const;
  double interior_l2(int dim, double hs, double ht) const;
  double boundary_max(int dim) const;
};

/// Discrete residual of the holomorphic-strip system. Central differences at
/// interior nodes, second-order one-sided stencils on the edges and on the
/// two columns next to the Dirichlet ends (the collocated central scheme has
/// a parity kernel there otherwise); rows j=0 and j=Nt report the boundary
/// graph defects in the e1 slot.
ResidualField cr_residual(const MetricChart& chart, const StripField& u, const AdiabaticData& bc,
                          EquationMode mode = EquationMode::plain_cr);

/// Shared first-derivative stencil: fills up to 4 (offset, weight) pairs for
/// differentiating at index i of an n+1 node line with spacing h. One-sided at
/// the edges, biased 4-point on the lines next to them, central elsewhere.
int deriv_stencil(int i, int n, double h, int* offsets, double* weights);

/// Trapezoid quadrature of <dQ/ds, dP/dt> - <dQ/dt, dP/ds> over the strip.
double omega_energy(const MetricChart& chart, const StripField& u);

struct StokesEnergy {
  double total = 0.0;
  double top_term = 0.0;  // eps * (f(Q(r,1)) - f(Q(-r,1)))
};

/// Boundary-integral form of the energy using the primitive
/// lambda = -lambda_can + eps pr* a.
StokesEnergy stokes_energy(const MetricChart& chart, const StripField& u,
                           const AdiabaticData& bc);

/// Floer's exact solution: Q(s) integrates dQ/ds = g^{-1} df(Q) from
/// Q(-r) = q0, and P(s,t) = t df(Q(s)). The top/bottom rows lie on L_{df}
/// and the zero section exactly.
StripField floer_oracle(const MetricChart& chart, const MorseData& f, const Vec2& q0, double r,
                        int Ns, int Nt);

/// Graph-feasible seed for the adiabatic problem: Q from the flow of
/// g^{-1} d(eps f), P = eps a(Q) + t eps df(Q).
StripField adiabatic_seed(const MetricChart& chart, const AdiabaticData& bc, double r, int Ns,
                          int Nt, const Vec2& q0);

/// Fiberwise twist between a strip field and its Floer-modified companion:
/// P -> P - t * eps * df(Q) (direction +1 applies the twist, -1 undoes it).
StripField floer_twist(const StripField& u, const MorseData& f, double eps, int direction);

/// Sup norm of the coordinate distance between two fields on the same grid.
double field_sup_distance(const StripField& a, const StripField& b, int dim);

// Grid derivative helpers (second-order, one-sided at edges).
Eigen::ArrayXXd grid_deriv_s(const Eigen::ArrayXXd& a, double hs);
Eigen::ArrayXXd grid_deriv_t(const Eigen::ArrayXXd& a, double ht);

}  // namespace adia

#endif
