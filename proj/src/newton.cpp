#include "adia/newton.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

namespace adia {

namespace {

struct Layout {
  int d, Ns, Nt;
  int vars_per_node() const { return 2 * d; }
  int node(int i, int j) const { return i * (Nt + 1) + j; }
  int qvar(int i, int j, int c) const { return node(i, j) * 2 * d + c; }
  int pvar(int i, int j, int c) const { return node(i, j) * 2 * d + d + c; }
  int size() const { return (Ns + 1) * (Nt + 1) * 2 * d; }
};

void pack(const StripField& u, int d, Eigen::VectorXd& x, const Layout& L) {
  x.resize(L.size());
  for (int i = 0; i <= u.Ns; ++i)
    for (int j = 0; j <= u.Nt; ++j)
      for (int c = 0; c < d; ++c) {
        x[L.qvar(i, j, c)] = u.q[c](i, j);
        x[L.pvar(i, j, c)] = u.p[c](i, j);
      }
}

void unpack(const Eigen::VectorXd& x, int d, StripField& u, const Layout& L) {
  for (int i = 0; i <= u.Ns; ++i)
    for (int j = 0; j <= u.Nt; ++j)
      for (int c = 0; c < d; ++c) {
        u.q[c](i, j) = x[L.qvar(i, j, c)];
        u.p[c](i, j) = x[L.pvar(i, j, c)];
      }
}

// Christoffel derivative along axis `axis` by central finite differences;
// charts carry dg but not ddg.
Christoffel christoffel_derivative(const MetricChart& chart, const Vec2& q, int axis) {
  const double h = 1e-5;
  Vec2 qp = q, qm = q;
  qp[axis] += h;
  qm[axis] -= h;
  Christoffel Gp = christoffel(chart, qp);
  Christoffel Gm = christoffel(chart, qm);
  Christoffel out;
  for (int k = 0; k < 2; ++k) out[k] = (Gp[k] - Gm[k]) / (2.0 * h);
  return out;
}

class StripSystem {
 public:
  StripSystem(const MetricChart& chart, const AdiabaticData& bc, const EndData& end,
              const StripField& shape, const SolverOptions& opts)
      : chart_(chart), bc_(bc), end_(end), opts_(opts), L_{chart.dim, shape.Ns, shape.Nt},
        r_(shape.r), hs_(shape.hs()), ht_(shape.ht()) {}

  // Stacked residual; rows are scaled by sqrt(hs*ht) so the plain vector
  // 2-norm is the discrete L2 norm.
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const int d = L_.d;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(L_.size());
    const double scale = std::sqrt(hs_ * ht_);
    int soff[4], toff[4];
    double sw[4], tw[4];
    for (int i = 0; i <= L_.Ns; ++i) {
      int sn = deriv_stencil(i, L_.Ns, hs_, soff, sw);
      for (int j = 0; j <= L_.Nt; ++j) {
        int tn = deriv_stencil(j, L_.Nt, ht_, toff, tw);
        const int base = L_.node(i, j) * 2 * d;

        if (i == 0 || i == L_.Ns) {
          const Vec2& qbc = (i == 0) ? end_.q_left[j] : end_.q_right[j];
          const Vec2& pbc = (i == 0) ? end_.p_left[j] : end_.p_right[j];
          for (int c = 0; c < d; ++c) {
            F[base + c] = scale * (x[L_.qvar(i, j, c)] - qbc[c]);
            F[base + d + c] = scale * (x[L_.pvar(i, j, c)] - pbc[c]);
          }
          continue;
        }

        Vec2 Q = node_q(x, i, j), P = node_p(x, i, j);
        Vec2 dsq = apply(x, i, j, true, soff, sw, sn, false);
        Vec2 dtq = apply(x, i, j, false, toff, tw, tn, false);
        Vec2 dsp = apply(x, i, j, true, soff, sw, sn, true);
        Vec2 dtp = apply(x, i, j, false, toff, tw, tn, true);

        Mat2 g = chart_.g(Q);
        Christoffel G = christoffel(chart_, Q);
        Vec2 nablat = dtp - christoffel_contract_covector(G, dtq, P, d);
        Vec2 nablas = dsp - christoffel_contract_covector(G, dsq, P, d);

        Vec2 e2 = g * dtq + nablas;
        if (j == 0 || j == L_.Nt) {
          Vec2 target = graph_target(Q, j == L_.Nt);
          for (int c = 0; c < d; ++c) {
            F[base + c] = scale * (P[c] - target[c]);
            F[base + d + c] = scale * e2[c];
          }
          continue;
        }

        Vec2 e1 = g * dsq - nablat;
        if (opts_.mode == EquationMode::floer_modified) e1 -= bc_.eps * bc_.f.df(Q);
        for (int c = 0; c < d; ++c) {
          F[base + c] = scale * e1[c];
          F[base + d + c] = scale * e2[c];
        }
      }
    }
    return F;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x) const {
    const int d = L_.d;
    const double scale = std::sqrt(hs_ * ht_);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(L_.size()) * 14);
    int soff[4], toff[4];
    double sw[4], tw[4];

    for (int i = 0; i <= L_.Ns; ++i) {
      int sn = deriv_stencil(i, L_.Ns, hs_, soff, sw);
      for (int j = 0; j <= L_.Nt; ++j) {
        int tn = deriv_stencil(j, L_.Nt, ht_, toff, tw);
        const int base = L_.node(i, j) * 2 * d;

        if (i == 0 || i == L_.Ns) {
          for (int c = 0; c < d; ++c) {
            trips.emplace_back(base + c, L_.qvar(i, j, c), scale);
            trips.emplace_back(base + d + c, L_.pvar(i, j, c), scale);
          }
          continue;
        }

        Vec2 Q = node_q(x, i, j), P = node_p(x, i, j);
        Vec2 dsq = apply(x, i, j, true, soff, sw, sn, false);
        Vec2 dtq = apply(x, i, j, false, toff, tw, tn, false);

        Mat2 g = chart_.g(Q);
        std::array<Mat2, 2> dg = chart_.dg(Q);
        Christoffel G = christoffel(chart_, Q);
        std::array<Christoffel, 2> dG;
        for (int a = 0; a < d; ++a) dG[a] = christoffel_derivative(chart_, Q, a);

        const bool bottom = (j == 0), top = (j == L_.Nt);

        if (bottom || top) {
          // slot A: P - eps*form(Q), slot B: e2 with one-sided t stencil.
          Vec2 dummy;
          std::array<Vec2, 2> dform = graph_target_derivative(Q, top, &dummy);
          for (int c = 0; c < d; ++c) {
            int row = base + c;
            trips.emplace_back(row, L_.pvar(i, j, c), scale);
            for (int a = 0; a < d; ++a)
              trips.emplace_back(row, L_.qvar(i, j, a), scale * (-dform[a][c]));
          }
          emit_e2(trips, x, i, j, base + d, scale, g, dg, G, dG, dtq, dsq, P, soff, sw, sn, toff,
                  tw, tn);
          continue;
        }

        // slot A: e1 = g dsq - dtp + Gamma(dtq, P) [- eps df in floer mode]
        for (int c = 0; c < d; ++c) {
          int row = base + c;
          // d/d dsq through g
          for (int k = 0; k < sn; ++k)
            for (int a = 0; a < d; ++a)
              trips.emplace_back(row, L_.qvar(i + soff[k], j, a), scale * g(c, a) * sw[k]);
          // d/d dtp
          for (int k = 0; k < tn; ++k)
            trips.emplace_back(row, L_.pvar(i, j + toff[k], c), scale * (-tw[k]));
          // Gamma(dtq, P) term: + Gamma^m_{a c} dtq_a P_m
          for (int k = 0; k < tn; ++k)
            for (int a = 0; a < d; ++a) {
              double w = 0.0;
              for (int m = 0; m < d; ++m) w += G[m](a, c) * P[m];
              trips.emplace_back(row, L_.qvar(i, j + toff[k], a), scale * w * tw[k]);
            }
          for (int m = 0; m < d; ++m) {
            double w = 0.0;
            for (int a = 0; a < d; ++a) w += G[m](a, c) * dtq[a];
            trips.emplace_back(row, L_.pvar(i, j, m), scale * w);
          }
          // center-node Q dependence through g, Gamma, df
          for (int b = 0; b < d; ++b) {
            double w = 0.0;
            for (int a = 0; a < d; ++a) w += dg[b](c, a) * dsq[a];
            for (int m = 0; m < d; ++m)
              for (int a = 0; a < d; ++a) w += dG[b][m](a, c) * dtq[a] * P[m];
            if (opts_.mode == EquationMode::floer_modified)
              w -= bc_.eps * bc_.f.hess(Q)(c, b);
            trips.emplace_back(row, L_.qvar(i, j, b), scale * w);
          }
        }
        emit_e2(trips, x, i, j, base + d, scale, g, dg, G, dG, dtq, dsq, P, soff, sw, sn, toff,
                tw, tn);
      }
    }

    Eigen::SparseMatrix<double> J(L_.size(), L_.size());
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
  }

  const Layout& layout() const { return L_; }

 private:
  Vec2 node_q(const Eigen::VectorXd& x, int i, int j) const {
    Vec2 v = Vec2::Zero();
    for (int c = 0; c < L_.d; ++c) v[c] = x[L_.qvar(i, j, c)];
    return v;
  }
  Vec2 node_p(const Eigen::VectorXd& x, int i, int j) const {
    Vec2 v = Vec2::Zero();
    for (int c = 0; c < L_.d; ++c) v[c] = x[L_.pvar(i, j, c)];
    return v;
  }
  // center-differenced so constant fields are annihilated exactly
  Vec2 apply(const Eigen::VectorXd& x, int i, int j, bool along_s, const int* off,
             const double* w, int n, bool is_p) const {
    Vec2 out = Vec2::Zero();
    for (int k = 0; k < n; ++k) {
      int ii = along_s ? i + off[k] : i;
      int jj = along_s ? j : j + off[k];
      for (int c = 0; c < L_.d; ++c) {
        double center = is_p ? x[L_.pvar(i, j, c)] : x[L_.qvar(i, j, c)];
        out[c] += w[k] * ((is_p ? x[L_.pvar(ii, jj, c)] : x[L_.qvar(ii, jj, c)]) - center);
      }
    }
    return out;
  }

  Vec2 graph_target(const Vec2& Q, bool top) const {
    if (opts_.mode == EquationMode::floer_modified) return Vec2::Zero();
    return top ? bc_.top_target(Q) : bc_.bottom_target(Q);
  }

  // derivative of the graph target w.r.t. q (dform[a][c] = d target_c / d q_a)
  std::array<Vec2, 2> graph_target_derivative(const Vec2& Q, bool top, Vec2* /*unused*/) const {
    std::array<Vec2, 2> out{Vec2::Zero(), Vec2::Zero()};
    if (opts_.mode == EquationMode::floer_modified) return out;
    auto da = bc_.a_form.da(Q);
    for (int a = 0; a < L_.d; ++a) out[a] = bc_.eps * da[a];
    if (top) {
      Mat2 h = bc_.f.hess(Q);
      for (int a = 0; a < L_.d; ++a)
        for (int c = 0; c < L_.d; ++c) out[a][c] += bc_.eps * h(c, a);
    }
    return out;
  }

  // slot B: e2 = g dtq + dsp - Gamma(dsq, P)
  void emit_e2(std::vector<Eigen::Triplet<double>>& trips, const Eigen::VectorXd& x, int i, int j,
               int row0, double scale, const Mat2& g, const std::array<Mat2, 2>& dg,
               const Christoffel& G, const std::array<Christoffel, 2>& dG, const Vec2& dtq,
               const Vec2& dsq, const Vec2& P, const int* soff, const double* sw, int sn,
               const int* toff, const double* tw, int tn) const {
    (void)x;
    const int d = L_.d;
    for (int c = 0; c < d; ++c) {
      int row = row0 + c;
      for (int k = 0; k < tn; ++k)
        for (int a = 0; a < d; ++a)
          trips.emplace_back(row, L_.qvar(i, j + toff[k], a), scale * g(c, a) * tw[k]);
      for (int k = 0; k < sn; ++k)
        trips.emplace_back(row, L_.pvar(i + soff[k], j, c), scale * sw[k]);
      // -Gamma(dsq, P) term
      for (int k = 0; k < sn; ++k)
        for (int a = 0; a < d; ++a) {
          double w = 0.0;
          for (int m = 0; m < d; ++m) w += G[m](a, c) * P[m];
          trips.emplace_back(row, L_.qvar(i + soff[k], j, a), scale * (-w) * sw[k]);
        }
      for (int m = 0; m < d; ++m) {
        double w = 0.0;
        for (int a = 0; a < d; ++a) w += G[m](a, c) * dsq[a];
        trips.emplace_back(row, L_.pvar(i, j, m), scale * (-w));
      }
      for (int b = 0; b < d; ++b) {
        double w = 0.0;
        for (int a = 0; a < d; ++a) w += dg[b](c, a) * dtq[a];
        for (int m = 0; m < d; ++m)
          for (int a = 0; a < d; ++a) w -= dG[b][m](a, c) * dsq[a] * P[m];
        trips.emplace_back(row, L_.qvar(i, j, b), scale * w);
      }
    }
  }

  const MetricChart& chart_;
  const AdiabaticData& bc_;
  const EndData& end_;
  const SolverOptions& opts_;
  Layout L_;
  double r_, hs_, ht_;
};

void fill_report_fields(const MetricChart& chart, const StripField& u, SolveReport& rep) {
  rep.energy = omega_energy(chart, u);
  double sdq = 0.0, sdp = 0.0;
  for (int c = 0; c < chart.dim; ++c) {
    sdq = std::max(sdq, grid_deriv_s(u.q[c], u.hs()).abs().maxCoeff());
    sdq = std::max(sdq, grid_deriv_t(u.q[c], u.ht()).abs().maxCoeff());
    sdp = std::max(sdp, grid_deriv_s(u.p[c], u.hs()).abs().maxCoeff());
    sdp = std::max(sdp, grid_deriv_t(u.p[c], u.ht()).abs().maxCoeff());
  }
  rep.sup_dQ = sdq;
  rep.sup_dP = sdp;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::SparseMatrix<double>> assemble_system(
    const MetricChart& chart, const AdiabaticData& bc, const EndData& end, const StripField& at,
    const SolverOptions& opts) {
  StripSystem sys(chart, bc, end, at, opts);
  Eigen::VectorXd x;
  pack(at, chart.dim, x, sys.layout());
  return {sys.residual(x), sys.jacobian(x)};
}

EndData EndData::from_field(const StripField& u) {
  EndData e;
  e.q_left.resize(u.Nt + 1);
  e.p_left.resize(u.Nt + 1);
  e.q_right.resize(u.Nt + 1);
  e.p_right.resize(u.Nt + 1);
  for (int j = 0; j <= u.Nt; ++j) {
    e.q_left[j] = u.Q(0, j);
    e.p_left[j] = u.P(0, j);
    e.q_right[j] = u.Q(u.Ns, j);
    e.p_right[j] = u.P(u.Ns, j);
  }
  return e;
}

std::pair<StripField, SolveReport> solve_strip(const MetricChart& chart, const AdiabaticData& bc,
                                               const EndData& end, const StripField& init,
                                               const SolverOptions& opts) {
  StripSystem sys(chart, bc, end, init, opts);
  const Layout& L = sys.layout();

  StripField u = init;
  Eigen::VectorXd x;
  pack(u, chart.dim, x, L);

  SolveReport rep;
  Eigen::VectorXd F = sys.residual(x);
  double norm = F.norm();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (norm < opts.res_tol) {
      rep.status = SolveStatus::converged;
      break;
    }
    Eigen::SparseMatrix<double> J = sys.jacobian(x);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      rep.status = SolveStatus::singular_jacobian;
      rep.singular_flag = true;
      rep.message = "sparse LU factorization failed";
      break;
    }
    Eigen::VectorXd delta = lu.solve(-F);
    if (!delta.allFinite()) {
      rep.status = SolveStatus::singular_jacobian;
      rep.singular_flag = true;
      rep.message = "linear solve produced non-finite step";
      break;
    }

    // Armijo backtracking on the residual norm, factor 1/2.
    double lambda = 1.0;
    double new_norm = norm;
    Eigen::VectorXd xs;
    bool accepted = false;
    while (lambda >= opts.min_step) {
      xs = x + lambda * delta;
      Eigen::VectorXd Fs = sys.residual(xs);
      new_norm = Fs.norm();
      if (new_norm <= (1.0 - opts.armijo_c * lambda) * norm) {
        x = xs;
        F = Fs;
        norm = new_norm;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    rep.newton_iters = iter + 1;
    if (!accepted) {
      rep.status = SolveStatus::diverged;
      rep.message = "backtracking reached the minimum step without descent";
      break;
    }
  }
  if (norm < opts.res_tol) rep.status = SolveStatus::converged;

  rep.residual_norm = norm;
  unpack(x, chart.dim, u, L);
  fill_report_fields(chart, u, rep);
  if (rep.status == SolveStatus::diverged && rep.message.empty())
    rep.message = "newton did not reach the residual tolerance";
  return {u, rep};
}

std::pair<StripField, SolveReport> solve_floer_seeded(const MetricChart& chart,
                                                      const AdiabaticData& bc, double r, int Ns,
                                                      int Nt, const Vec2& q0,
                                                      const SolverOptions& opts) {
  StripField seed = (opts.mode == EquationMode::floer_modified)
                        ? floer_twist(floer_oracle(chart, bc.f.scaled(bc.eps), q0, r, Ns, Nt),
                                      bc.f, bc.eps, +1)
                        : adiabatic_seed(chart, bc, r, Ns, Nt, q0);
  EndData end = EndData::from_field(seed);
  return solve_strip(chart, bc, end, seed, opts);
}

std::pair<StripField, SolveReport> solve_with_continuation(const MetricChart& chart,
                                                           const AdiabaticData& bc,
                                                           const EndData& end, double r, int Ns,
                                                           int Nt, const SolverOptions& opts) {
  const int rungs = std::max(1, opts.continuation_rungs);

  // Start from the zero-scale problem: straight blend of the end arcs.
  StripField u(r, Ns, Nt);
  for (int i = 0; i <= Ns; ++i) {
    double w = static_cast<double>(i) / Ns;
    for (int j = 0; j <= Nt; ++j) {
      u.setQ(i, j, Vec2((1.0 - w) * end.q_left[j] + w * end.q_right[j]));
      u.setP(i, j, Vec2::Zero());
    }
  }

  SolveReport rep;
  for (int rung = 0; rung <= rungs; ++rung) {
    double factor = (rung == 0) ? 0.0 : std::pow(2.0, rung - rungs);
    AdiabaticData bc_r = bc;
    bc_r.eps = factor * bc.eps;
    EndData end_r = end;
    for (int j = 0; j <= Nt; ++j) {
      end_r.p_left[j] *= factor;
      end_r.p_right[j] *= factor;
    }
    std::tie(u, rep) = solve_strip(chart, bc_r, end_r, u, opts);
    if (!rep.converged()) {
      rep.message = "continuation rung " + std::to_string(rung) + " failed: " + rep.message;
      return {u, rep};
    }
    if (rung < rungs) {
      // Rescale the fiber component toward the next rung and restore the
      // boundary rows to graph feasibility.
      double next = std::pow(2.0, rung + 1 - rungs);
      double ratio = (factor == 0.0) ? 0.0 : next / factor;
      for (int c = 0; c < chart.dim; ++c) u.p[c] *= ratio;
    }
  }
  fill_report_fields(chart, u, rep);
  return {u, rep};
}

}  // namespace adia
