#pragma once

// Closed-form inequalities checked by spectral/fqpe. Energies in units of omega.

namespace floquet::bounds {

// |eps~ - eps| / w for the eigenvalue shifted by l (l = 0: central)
double prop1(int L, int M, double alphaT, int l = 0);
// distance (mod w) from an eigenvalue eps~ of H_F^L to the nearest quasienergy
double prop2(int L, int M, double alphaT, double eps_over_omega);
// Lieb-Robinson distance on the Fourier lattice
int lr_distance(int l, int lp, int L);
double propB2(int l, int lp, int L, int M, double alpha_t);
double propB3(int L, int M, double alphaT, double eps_over_omega);
// residual bound, +inf when the normalization error reaches 1
double propB1(int L, int M, double alphaT, double eps_over_omega);
// in units of alpha
double propC1(int L, int l, int M, double alphaT);
double psi1_deviation(int L, int M, double alphaT);
double psi_neg(int L, int M, double alphaT);
double approx_qsvt(int q, double eta, int n_max);

}  // namespace floquet::bounds
