#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "shockshift/dynamics.hpp"

namespace shockshift {

struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;       // int |u - V|^2
  double D_grad = 0.0;  // int |grad(u - V)|^2
  double D_proj = 0.0;  // (int (u - V) U'(x1 + m))^2
  double g = 0.0;
  double hM = 0.0;
  double m = 0.0;
  double W_Y = 0.0;      // int |U'| (Y - m)^2   (Special mode: unshifted weight, c instead of m)
  double W_gradY = 0.0;  // int |U'| |grad Y|^2
  double gradY_L2 = 0.0;
  double lapY_L2 = 0.0;
  double f_gap = 0.0;
  double c = 0.0;
  double entropy_residual = 0.0;
};

/// Column names of the diagnostics CSV, in DiagnosticsRecord order.
const std::vector<std::string>& diagnostics_columns();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);

double contraction_energy(const ScalarField& u, const ScalarField& V);
/// (int |grad(u - V)|^2, (int (u - V) U'(x1 + m))^2).
std::pair<double, double> dissipation_terms(const ScalarField& u, const ScalarField& V, const ShockProfile& profile,
                                            double m);
/// (int |U'(x1 + m)| (Y - m)^2, int |U'(x1 + m)| |grad Y|^2).
std::pair<double, double> weighted_shift_norms(const ScalarField& Y, double m, const ShockProfile& profile);
/// int |U(x1 + Y) - U(x1 + m)|^2.
double f_gap(const ScalarField& Y, double m, const ShockProfile& profile);
/// int |U'(x1)| Y / int |U'(x1)|.
double c_special(const ScalarField& Y, const ShockProfile& profile);

/// The two sides of the quadratic relative-entropy balance at one instant:
///   (1/2) dE/dt + int |grad(u - V)|^2 = -int (A(u|V) - (u - V) w) . grad V - int (u - V) G,
/// where V solves V_t + div A(V) + w . grad V - lap V = G.
struct IdentityTerms {
  double E = 0.0;
  double D_grad = 0.0;
  double rhs = 0.0;
};
IdentityTerms identity_terms(const FluxField& flux, const ScalarField& u, const ScalarField& V, const VectorField& w,
                             const ScalarField& G);

/// G = U'(x1 + Y) ((w_1 - h)(1 - psi_M(x1 + m)) + g); zero in Special mode.
ScalarField source_G(const SimState& s, const Model& model);

/// |(E_next - E_prev)/(2 dt) + mean D_grad - mean rhs| for two fresh states dt apart.
double entropy_identity_residual(const SimState& prev, const SimState& next, const Model& model, double dt);
double entropy_identity_residual(const IdentityTerms& prev, const IdentityTerms& next, double dt);
IdentityTerms identity_terms(const SimState& s, const Model& model);

/// Sup over rows 2 .. n1 - 3 (clear of the Dirichlet ghosts) of (V_next - V_prev)/dt - mean[L_h(V) - w . grad V + G],
/// with L_h the (balanced) spatial operator of the u scheme.
double residual_V(const SimState& prev, const SimState& next, const Model& model, double dt);

/// Every column except entropy_residual, from a fresh state.
DiagnosticsRecord diagnostics(const SimState& s, const Model& model);

}  // namespace shockshift
