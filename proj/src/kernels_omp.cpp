// Row-blocked kernels, parallel over x1 rows. Face fluxes are computed once
// and shared by the two adjacent nodes; transverse neighbours come from
// precomputed index tables instead of modular arithmetic.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <optional>
#include <vector>

#include "shockshift/kernels.hpp"

namespace shockshift::kernels::omp {

namespace {

// nb[axis-1][step+2][j]: slice index `step` nodes away along a transverse axis.
struct NeighborTables {
  std::array<std::array<std::vector<std::size_t>, 5>, 2> nb;

  explicit NeighborTables(const Grid& g) {
    const std::size_t S = g.slice();
    for (int axis = 1; axis < g.dim; ++axis) {
      for (int s = -2; s <= 2; ++s) {
        auto& t = nb[axis - 1][s + 2];
        t.resize(S);
        for (std::size_t j = 0; j < S; ++j) t[j] = g.perp_neighbor(j, axis, s);
      }
    }
  }
  const std::size_t* operator()(int axis, int step) const { return nb[axis - 1][step + 2].data(); }
};

const NeighborTables& tables_for(const Grid& g) {
  thread_local std::optional<Grid> cached;
  thread_local std::optional<NeighborTables> tables;
  if (!cached || !(*cached == g)) {
    tables.emplace(g);
    cached = g;
  }
  return *tables;
}

// Largest |x| as the bit pattern of a non-negative double: the integer order
// matches the double order, and anything >= kInfBits is inf or NaN. Unlike a
// max over doubles this reduction vectorizes.
constexpr std::int64_t kInfBits = 0x7ff0000000000000;

std::int64_t max_abs_bits(const double* __restrict x, std::size_t n) {
  std::int64_t m = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t b = std::bit_cast<std::int64_t>(x[j]) & 0x7fffffffffffffff;
    m = b > m ? b : m;
  }
  return m;
}

double bits_to_speed(std::int64_t b) { return b >= kInfBits ? 0.0 : std::bit_cast<double>(b); }

// Padded transverse row (two periodic ghosts per side, P = S + 4 values).
// Face q sits between padded nodes q and q + 1; faces 1 .. P - 3 are filled.
void padded_row_faces(const double* __restrict pu, const double* __restrict pA, const double* __restrict pD,
                      double* __restrict ps, double* __restrict pF, std::size_t P) {
  for (std::size_t q = 1; q < P - 1; ++q) ps[q] = mc_slope(pu[q] - pu[q - 1], pu[q + 1] - pu[q]);
  for (std::size_t q = 1; q < P - 2; ++q) {
    const double central = (-pA[q - 1] + 13.0 * pA[q] + 13.0 * pA[q + 1] - pA[q + 2]) / 24.0;
    const double uL = pu[q] + 0.5 * ps[q];
    const double uR = pu[q + 1] - 0.5 * ps[q + 1];
    pF[q] = central - 0.5 * std::max(pD[q], pD[q + 1]) * (uR - uL);
  }
}

void add_padded_row(const double* __restrict pu, const double* __restrict pF, double* __restrict div,
                    double* __restrict lap, std::size_t S, double idx, double idxsq) {
  for (std::size_t j = 0; j < S; ++j) {
    div[j] += (pF[j + 2] - pF[j + 1]) * idx;
    lap[j] += (pu[j + 3] - 2.0 * pu[j + 2] + pu[j + 1]) * idxsq;
  }
}

struct YRowConsts {
  double i1, ip, c1, cp, i1sq, ipsq, src_w, src_const;
};

// One x1 row of the 2D Y right side. py/pc are Y/Yc padded by one periodic ghost per side.
template <bool Folded>
void y_row_2d(const double* __restrict ym_row, const double* __restrict y_row, const double* __restrict yp_row,
              const double* __restrict ycm_row, const double* __restrict ycp_row, const double* __restrict py,
              const double* __restrict pc, const double* __restrict a1, const double* __restrict a2,
              const double* __restrict w0, const double* __restrict w1, double* __restrict o,
              double* __restrict stretch, std::size_t S, const YRowConsts& k, int& bad) {
  int nb = 0;
  for (std::size_t j = 0; j < S; ++j) {
    const double wk0 = w0[j], wk1 = w1[j];
    const double ym = ym_row[j], y0 = y_row[j], yp = yp_row[j];
    const double dc1 = (ycp_row[j] - ycm_row[j]) * k.c1;
    const double v1 = Folded ? wk0 - a1[j] : -a1[j];
    double adv = v1 * (v1 > 0.0 ? y0 - ym : yp - y0) * k.i1;
    double quad = dc1 * dc1;
    double drift = Folded ? 0.0 : wk0 * dc1;
    double lap = (ym - 2.0 * y0 + yp) * k.i1sq;
    stretch[j] = 1.0 + (yp - ym) * k.c1;
    const double zm = py[j], zp = py[j + 2];
    const double dc2 = (pc[j + 2] - pc[j]) * k.cp;
    const double v2 = Folded ? a2[j] + wk1 : a2[j];
    adv += v2 * (v2 > 0.0 ? y0 - zm : zp - y0) * k.ip;
    quad += dc2 * dc2;
    drift += Folded ? 0.0 : wk1 * dc2;
    lap += (zm - 2.0 * y0 + zp) * k.ipsq;
    const double r = -adv + a1[j] * quad - drift + lap + (k.src_w * wk0 + k.src_const);
    nb |= !(std::abs(r) <= 1.7976931348623157e308);
    o[j] = r;
  }
  bad |= nb;
}

}  // namespace

Stats u_rhs(const Grid& g, const FluxTables& fl, const UProblem& prob, const double* u, double* out) {
  const int n1 = g.n1;
  const std::size_t S = g.slice();
  const NeighborTables& nbt = tables_for(g);
  thread_local std::vector<double> ue, A, D, slope, F;
  ue.resize(std::size_t(n1 + 2) * S);
  A.resize(ue.size());
  D.resize(ue.size());
  slope.resize(std::size_t(n1) * S);
  F.resize(std::size_t(n1 - 1) * S);
  const Polynomial &A0 = fl.a[0], &dA0 = fl.da[0];
  const double idx1 = 1.0 / g.dx1, idx1sq = 1.0 / (g.dx1 * g.dx1);
  const double idxp = 1.0 / g.dx_perp, idxpsq = 1.0 / (g.dx_perp * g.dx_perp);
  double max_speed = 0.0;
  bool finite = true;

#pragma omp parallel reduction(max : max_speed) reduction(&& : finite)
  {
    // ue row r holds u at x1 row r - 1, with the Dirichlet ghosts in rows 0 and n1 + 1.
#pragma omp for
    for (int r = 0; r < n1 + 2; ++r) {
      double* dst = ue.data() + std::size_t(r) * S;
      double* a = A.data() + std::size_t(r) * S;
      double* d = D.data() + std::size_t(r) * S;
      for (std::size_t j = 0; j < S; ++j)
        dst[j] = r == 0 ? prob.ghost_left : (r == n1 + 1 ? prob.ghost_right : u[std::size_t(r - 1) * S + j]);
      A0.eval_many(dst, a, S);
      dA0.eval_many(dst, d, S);
      for (std::size_t j = 0; j < S; ++j) d[j] = std::abs(d[j]);
      if (r > 0 && r <= n1) {
        max_speed = std::max(max_speed, bits_to_speed(max_abs_bits(d, S)));
        finite = finite && max_abs_bits(dst, S) < kInfBits;
      }
    }

#pragma omp for
    for (int i = 0; i < n1; ++i) {
      const double* um = ue.data() + std::size_t(i) * S;
      const double* u0 = um + S;
      const double* up = u0 + S;
      double* s = slope.data() + std::size_t(i) * S;
      for (std::size_t j = 0; j < S; ++j) s[j] = mc_slope(u0[j] - um[j], up[j] - u0[j]);
    }

    // Face f sits between x1 rows f and f + 1.
#pragma omp for
    for (int f = 0; f < n1 - 1; ++f) {
      const std::size_t r = std::size_t(f) + 1;  // ue row of node f
      const double *am = A.data() + (r - 1) * S, *a0 = am + S, *a1 = a0 + S, *a2 = a1 + S;
      const double *d0 = D.data() + r * S, *d1 = d0 + S;
      const double *u0 = ue.data() + r * S, *u1 = u0 + S;
      const double *s0 = slope.data() + std::size_t(f) * S, *s1 = s0 + S;
      double* fo = F.data() + std::size_t(f) * S;
      for (std::size_t j = 0; j < S; ++j) {
        const double central = (-am[j] + 13.0 * a0[j] + 13.0 * a1[j] - a2[j]) / 24.0;
        const double uL = u0[j] + 0.5 * s0[j];
        const double uR = u1[j] - 0.5 * s1[j];
        fo[j] = central - 0.5 * std::max(d0[j], d1[j]) * (uR - uL);
      }
    }

    std::vector<double> Ar(S), Dr(S), sr(S), Fr(S), acc_div(S), acc_lap(S);
    std::vector<double> pu(S + 4), pA(S + 4), pD(S + 4), ps(S + 4), pF(S + 4);
#pragma omp for
    for (int i = 0; i < n1; ++i) {
      double* o = out + std::size_t(i) * S;
      if (i == 0 || i == n1 - 1) {
        for (std::size_t j = 0; j < S; ++j) o[j] = 0.0;
        continue;
      }
      const double* ur = ue.data() + std::size_t(i + 1) * S;
      const double *um = ur - S, *up = ur + S;
      const double *fr = F.data() + std::size_t(i) * S, *fl1 = fr - S;
      for (std::size_t j = 0; j < S; ++j) {
        acc_div[j] = (fr[j] - fl1[j]) * idx1;
        acc_lap[j] = (um[j] - 2.0 * ur[j] + up[j]) * idx1sq;
      }
      if (g.dim == 2 && fl.n > 1) {
        // Contiguous path: the row padded with two periodic ghosts on each side.
        const std::size_t P = S + 4;
        const Polynomial &Ak = fl.a[1], &dAk = fl.da[1];
        pu[0] = ur[S - 2];
        pu[1] = ur[S - 1];
        std::copy(ur, ur + S, pu.data() + 2);
        pu[S + 2] = ur[0];
        pu[S + 3] = ur[1];
        Ak.eval_many(pu.data(), pA.data(), P);
        dAk.eval_many(pu.data(), pD.data(), P);
        for (std::size_t q = 0; q < P; ++q) pD[q] = std::abs(pD[q]);
        max_speed = std::max(max_speed, bits_to_speed(max_abs_bits(pD.data() + 2, S)));
        padded_row_faces(pu.data(), pA.data(), pD.data(), ps.data(), pF.data(), P);
        add_padded_row(pu.data(), pF.data(), acc_div.data(), acc_lap.data(), S, idxp, idxpsq);
      }
      for (int axis = 1; g.dim == 3 && axis < fl.n; ++axis) {
        const Polynomial &Ak = fl.a[axis], &dAk = fl.da[axis];
        const std::size_t *m1 = nbt(axis, -1), *p1 = nbt(axis, 1), *p2 = nbt(axis, 2);
        for (std::size_t j = 0; j < S; ++j) {
          Ar[j] = Ak(ur[j]);
          Dr[j] = std::abs(dAk(ur[j]));
          max_speed = std::max(max_speed, Dr[j]);
        }
        for (std::size_t j = 0; j < S; ++j) sr[j] = mc_slope(ur[j] - ur[m1[j]], ur[p1[j]] - ur[j]);
        for (std::size_t j = 0; j < S; ++j) {
          const double central = (-Ar[m1[j]] + 13.0 * Ar[j] + 13.0 * Ar[p1[j]] - Ar[p2[j]]) / 24.0;
          const double uL = ur[j] + 0.5 * sr[j];
          const double uR = ur[p1[j]] - 0.5 * sr[p1[j]];
          Fr[j] = central - 0.5 * std::max(Dr[j], Dr[p1[j]]) * (uR - uL);
        }
        for (std::size_t j = 0; j < S; ++j) acc_div[j] += (Fr[j] - Fr[m1[j]]) * idxp;
      }
      for (int axis = 1; axis < g.dim; ++axis) {
        if (g.dim == 2 && fl.n > 1) break;  // done on the padded row
        const std::size_t *m1 = nbt(axis, -1), *p1 = nbt(axis, 1);
        for (std::size_t j = 0; j < S; ++j) acc_lap[j] += (ur[p1[j]] - 2.0 * ur[j] + ur[m1[j]]) * idxpsq;
      }
      const double* bal = prob.balance ? prob.balance + std::size_t(i) * S : nullptr;
      for (std::size_t j = 0; j < S; ++j) {
        double r = acc_lap[j] - acc_div[j];
        if (bal) r -= bal[j];
        o[j] = r;
      }
    }
  }
  return Stats{max_speed, 1.0, finite};
}

Stats y_rhs(const Grid& g, const FluxTables& fl, const YTerms& t, double* out) {
  const int n1 = g.n1;
  const std::size_t S = g.slice();
  const NeighborTables& nbt = tables_for(g);
  const bool folded = t.Yc == t.Y;
  const double i1 = 1.0 / g.dx1, ip_ = 1.0 / g.dx_perp;
  const double c1 = 0.5 * i1, cp = 0.5 * ip_, i1sq = i1 * i1, ipsq = ip_ * ip_;
  double min_stretch = 1.0;
  bool finite = true;

  if (g.dim == 2) {
#pragma omp parallel reduction(min : min_stretch) reduction(&& : finite)
    {
      std::vector<double> py(S + 2), pc(S + 2), a1(S), a2(S, 0.0), zeros(S, 0.0), st(S);
#pragma omp for
      for (int i = 0; i < n1; ++i) {
        const int im = i == 0 ? 1 : i - 1;
        const int ip = i == n1 - 1 ? n1 - 2 : i + 1;
        const std::size_t b = std::size_t(i) * S, bm = std::size_t(im) * S, bp = std::size_t(ip) * S;
        const double psi = t.psi_rows ? t.psi_rows[i] : 0.0;
        const double* Y = t.Y + b;
        const double* Yc = t.Yc + b;
        py[0] = Y[S - 1];
        std::copy(Y, Y + S, py.data() + 1);
        py[S + 1] = Y[0];
        pc[0] = Yc[S - 1];
        std::copy(Yc, Yc + S, pc.data() + 1);
        pc[S + 1] = Yc[0];
        fl.da[0].eval_many(t.V + b, a1.data(), S);
        if (fl.n > 1) fl.da[1].eval_many(t.V + b, a2.data(), S);
        const YRowConsts k{i1, ip_, c1, cp, i1sq, ipsq, t.sources ? -psi : 0.0, t.sources ? t.h * psi - t.h + t.g : 0.0};
        const double* w0 = t.w[0] ? t.w[0] + b : zeros.data();
        const double* w1p = t.w[1] ? t.w[1] + b : zeros.data();
        int bad = 0;
        double mstr = 1.0;
        if (folded)
          y_row_2d<true>(t.Y + bm, Y, t.Y + bp, t.Yc + bm, t.Yc + bp, py.data(), pc.data(), a1.data(), a2.data(), w0,
                         w1p, out + b, st.data(), S, k, bad);
        else
          y_row_2d<false>(t.Y + bm, Y, t.Y + bp, t.Yc + bm, t.Yc + bp, py.data(), pc.data(), a1.data(), a2.data(), w0,
                          w1p, out + b, st.data(), S, k, bad);
        for (std::size_t j = 0; j < S; ++j) mstr = std::min(mstr, st[j]);
        min_stretch = std::min(min_stretch, mstr);
        finite = finite && bad == 0;
      }
    }
    return Stats{0.0, min_stretch, finite};
  }

#pragma omp parallel for reduction(min : min_stretch) reduction(&& : finite)
  for (int i = 0; i < n1; ++i) {
    const int im = i == 0 ? 1 : i - 1;
    const int ip = i == n1 - 1 ? n1 - 2 : i + 1;
    const std::size_t b = std::size_t(i) * S, bm = std::size_t(im) * S, bp = std::size_t(ip) * S;
    const double psi = t.psi_rows ? t.psi_rows[i] : 0.0;
    for (std::size_t j = 0; j < S; ++j) {
      const std::size_t k = b + j;
      const double V = t.V[k];
      const double a1p = fl.da[0](V);
      double adv = 0.0, quad = 0.0, drift = 0.0, lap = 0.0;
      {
        const double ym = t.Y[bm + j], y0 = t.Y[k], yp = t.Y[bp + j];
        const double dc = (t.Yc[bp + j] - t.Yc[bm + j]) * c1;
        double vel = -a1p;
        const double wk = t.w[0] ? t.w[0][k] : 0.0;
        if (folded) {
          vel += wk;
        } else {
          drift += wk * dc;
        }
        adv += vel * (vel > 0.0 ? y0 - ym : yp - y0) * i1;
        quad += dc * dc;
        lap += (ym - 2.0 * y0 + yp) * i1sq;
        min_stretch = std::min(min_stretch, 1.0 + (yp - ym) * c1);
      }
      for (int axis = 1; axis < g.dim; ++axis) {
        const std::size_t jm = nbt(axis, -1)[j], jp = nbt(axis, 1)[j];
        const double ym = t.Y[b + jm], y0 = t.Y[k], yp = t.Y[b + jp];
        const double dc = (t.Yc[b + jp] - t.Yc[b + jm]) * cp;
        double vel = axis < fl.n ? fl.da[axis](V) : 0.0;
        const double wk = t.w[axis] ? t.w[axis][k] : 0.0;
        if (folded) {
          vel += wk;
        } else {
          drift += wk * dc;
        }
        adv += vel * (vel > 0.0 ? y0 - ym : yp - y0) * ip_;
        quad += dc * dc;
        lap += (ym - 2.0 * y0 + yp) * ipsq;
      }
      double r = -adv + a1p * quad - drift + lap;
      if (t.sources) {
        const double w1 = t.w[0] ? t.w[0][k] : 0.0;
        r += -(w1 - t.h) * psi - t.h + t.g;
      }
      finite = finite && std::isfinite(r);
      out[k] = r;
    }
  }
  return Stats{0.0, min_stretch, finite};
}

Stats compose_V(const Grid& g, const ShockProfile& profile, const FluxTables& fl, const double* Y, double* V) {
  const std::size_t S = g.slice();
  double max_speed = 0.0;
  bool finite = true;
#pragma omp parallel reduction(max : max_speed) reduction(&& : finite)
  {
    std::vector<double> d(S);
#pragma omp for
    for (int i = 0; i < g.n1; ++i) {
      const double x1 = g.x1(i);
      const std::size_t b = std::size_t(i) * S;
      for (std::size_t j = 0; j < S; ++j) d[j] = x1 + Y[b + j];
      finite = finite && max_abs_bits(Y + b, S) < kInfBits;
      profile.value_many(d.data(), V + b, S);
      for (int c = 0; c < fl.n; ++c) {
        fl.da[c].eval_many(V + b, d.data(), S);
        max_speed = std::max(max_speed, bits_to_speed(max_abs_bits(d.data(), S)));
      }
    }
  }
  return Stats{max_speed, 1.0, finite};
}

Stats w_field(const Grid& g, const FluxTables& fl, double phi, const double* u, const double* V,
              std::array<double*, 3> w) {
  const std::size_t S = g.slice();
  double max_speed = 0.0;
  if (phi == 0.0) {
    for (int c = 0; c < fl.n; ++c) std::fill(w[c], w[c] + g.size(), 0.0);
    return Stats{};
  }
#pragma omp parallel reduction(max : max_speed)
  {
    std::vector<double> dd(S), z(S), a2v(S), acc(S);
#pragma omp for
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t b = std::size_t(i) * S;
      for (std::size_t j = 0; j < S; ++j) dd[j] = u[b + j] - V[b + j];
      for (int c = 0; c < fl.n; ++c) {
        const auto& rule = fl.wrule[c];
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double r = rule.nodes[q], wq = rule.weights[q] * (1.0 - r);
          for (std::size_t j = 0; j < S; ++j) z[j] = V[b + j] + r * dd[j];
          fl.d2a[c].eval_many(z.data(), a2v.data(), S);
          for (std::size_t j = 0; j < S; ++j) acc[j] += wq * a2v[j];
        }
        double* wc = w[c] + b;
        for (std::size_t j = 0; j < S; ++j) {
          const double val = phi * dd[j] * acc[j];
          wc[j] = val;
          max_speed = std::max(max_speed, std::abs(val));
        }
      }
    }
  }
  return Stats{max_speed, 1.0, true};
}

}  // namespace shockshift::kernels::omp
