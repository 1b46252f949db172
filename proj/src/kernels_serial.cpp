// Reference kernels: one node at a time, every neighbour looked up through
// the boundary rules. Slow but easy to audit; the OpenMP versions must agree
// with these to rounding.

#include <cmath>

#include "shockshift/kernels.hpp"

namespace shockshift::kernels {

FluxTables::FluxTables(const FluxField& flux) : n(flux.n_components()) {
  if (n < 1 || n > 3) throw std::invalid_argument("kernels: flux must have 1 to 3 components");
  for (int k = 0; k < n; ++k) {
    const auto& p = flux.component(k);
    a[k] = p;
    da[k] = p.derivative();
    d2a[k] = da[k].derivative();
    wrule[k] = gauss_legendre_unit(std::max(1, (p.degree() + 1) / 2));
  }
}

namespace serial {

namespace {

// Conservative flux through the face between nodes with values u0 and u1.
double face_flux(const Polynomial& A, const Polynomial& dA, double um, double u0, double u1, double u2) {
  const double central = (-A(um) + 13.0 * A(u0) + 13.0 * A(u1) - A(u2)) / 24.0;
  const double uL = u0 + 0.5 * mc_slope(u0 - um, u1 - u0);
  const double uR = u1 - 0.5 * mc_slope(u1 - u0, u2 - u1);
  const double alpha = std::max(std::abs(dA(u0)), std::abs(dA(u1)));
  return central - 0.5 * alpha * (uR - uL);
}

}  // namespace

Stats u_rhs(const Grid& g, const FluxTables& fl, const UProblem& prob, const double* u, double* out) {
  const std::size_t S = g.slice();
  auto at = [&](int i, std::size_t j) {
    if (i < 0) return prob.ghost_left;
    if (i >= g.n1) return prob.ghost_right;
    return u[std::size_t(i) * S + j];
  };
  Stats st;
  for (int i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = std::size_t(i) * S + j;
      for (int c = 0; c < fl.n; ++c) st.max_speed = std::max(st.max_speed, std::abs(fl.da[c](u[k])));
      if (!std::isfinite(u[k])) st.finite = false;
      if (i == 0 || i == g.n1 - 1) {
        out[k] = 0.0;
        continue;
      }
      const double fr = face_flux(fl.a[0], fl.da[0], at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j));
      const double fl1 = face_flux(fl.a[0], fl.da[0], at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j));
      double div = (fr - fl1) / g.dx1;
      double lap = (at(i - 1, j) - 2.0 * u[k] + at(i + 1, j)) / (g.dx1 * g.dx1);
      for (int axis = 1; axis < g.dim && axis < fl.n; ++axis) {
        const std::size_t base = std::size_t(i) * S;
        auto v = [&](int s) { return u[base + g.perp_neighbor(j, axis, s)]; };
        const double pr = face_flux(fl.a[axis], fl.da[axis], v(-1), v(0), v(1), v(2));
        const double pl = face_flux(fl.a[axis], fl.da[axis], v(-2), v(-1), v(0), v(1));
        div += (pr - pl) / g.dx_perp;
      }
      for (int axis = 1; axis < g.dim; ++axis) {
        const std::size_t base = std::size_t(i) * S;
        lap += (u[base + g.perp_neighbor(j, axis, 1)] - 2.0 * u[k] + u[base + g.perp_neighbor(j, axis, -1)]) /
               (g.dx_perp * g.dx_perp);
      }
      double r = lap - div;
      if (prob.balance) r -= prob.balance[k];
      out[k] = r;
    }
  }
  return st;
}

Stats y_rhs(const Grid& g, const FluxTables& fl, const YTerms& t, double* out) {
  const std::size_t S = g.slice();
  const bool folded = t.Yc == t.Y;
  auto mirror = [&](int i) { return i < 0 ? -i : (i >= g.n1 ? 2 * (g.n1 - 1) - i : i); };
  auto Yat = [&](const double* f, int i, std::size_t j) { return f[std::size_t(mirror(i)) * S + j]; };
  Stats st;
  for (int i = 0; i < g.n1; ++i) {
    const double psi = t.psi_rows ? t.psi_rows[i] : 0.0;
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = std::size_t(i) * S + j;
      const double V = t.V[k];
      const double a1p = fl.da[0](V);
      double adv = 0.0, quad = 0.0, drift = 0.0, lap = 0.0;
      for (int axis = 0; axis < g.dim; ++axis) {
        const double h = g.spacing(axis);
        double ym, y0 = t.Y[k], yp, cm, cp;
        if (axis == 0) {
          ym = Yat(t.Y, i - 1, j);
          yp = Yat(t.Y, i + 1, j);
          cm = Yat(t.Yc, i - 1, j);
          cp = Yat(t.Yc, i + 1, j);
        } else {
          const std::size_t base = std::size_t(i) * S;
          ym = t.Y[base + g.perp_neighbor(j, axis, -1)];
          yp = t.Y[base + g.perp_neighbor(j, axis, 1)];
          cm = t.Yc[base + g.perp_neighbor(j, axis, -1)];
          cp = t.Yc[base + g.perp_neighbor(j, axis, 1)];
        }
        double vel = axis == 0 ? -a1p : (axis < fl.n ? fl.da[axis](V) : 0.0);
        const double wk = t.w[axis] ? t.w[axis][k] : 0.0;
        const double dc = (cp - cm) / (2.0 * h);
        if (folded) {
          vel += wk;
        } else {
          drift += wk * dc;
        }
        adv += vel > 0.0 ? vel * (y0 - ym) / h : vel * (yp - y0) / h;
        quad += dc * dc;
        lap += (ym - 2.0 * y0 + yp) / (h * h);
        if (axis == 0) st.min_stretch = std::min(st.min_stretch, 1.0 + (yp - ym) / (2.0 * h));
      }
      double r = -adv + a1p * quad - drift + lap;
      if (t.sources) {
        const double w1 = t.w[0] ? t.w[0][k] : 0.0;
        r += -(w1 - t.h) * psi - t.h + t.g;
      }
      if (!std::isfinite(r)) st.finite = false;
      out[k] = r;
    }
  }
  return st;
}

Stats compose_V(const Grid& g, const ShockProfile& profile, const FluxTables& fl, const double* Y, double* V) {
  const std::size_t S = g.slice();
  Stats st;
  for (int i = 0; i < g.n1; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = std::size_t(i) * S + j;
      V[k] = profile.value(g.x1(i) + Y[k]);
      for (int c = 0; c < fl.n; ++c) st.max_speed = std::max(st.max_speed, std::abs(fl.da[c](V[k])));
      if (!std::isfinite(Y[k])) st.finite = false;
    }
  }
  return st;
}

Stats w_field(const Grid& g, const FluxTables& fl, double phi, const double* u, const double* V,
              std::array<double*, 3> w) {
  Stats st;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d = u[k] - V[k];
    for (int c = 0; c < fl.n; ++c) {
      const auto& rule = fl.wrule[c];
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        acc += rule.weights[q] * (1.0 - rule.nodes[q]) * fl.d2a[c](V[k] + rule.nodes[q] * d);
      }
      const double val = phi * d * acc;
      w[c][k] = val;
      st.max_speed = std::max(st.max_speed, std::abs(val));
    }
  }
  return st;
}

}  // namespace serial

const KernelSet& kernel_set(Backend backend) {
  static const KernelSet serial_set{&serial::u_rhs, &serial::y_rhs, &serial::compose_V, &serial::w_field};
  static const KernelSet omp_set{&omp::u_rhs, &omp::y_rhs, &omp::compose_V, &omp::w_field};
  return backend == Backend::Serial ? serial_set : omp_set;
}

}  // namespace shockshift::kernels
