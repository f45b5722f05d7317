#pragma once

#include <variant>

#include "floquet/hamiltonian.hpp"

namespace floquet {

struct SambeWindow {
    int L = 1;
    int lo() const { return -L + 1; }
    int hi() const { return L; }
    int fourier_dim() const { return 2 * L; }
    bool contains(int l) const { return l >= lo() && l <= hi(); }
    int block(int l) const { return l + L - 1; }
    int index_of_block(int b) const { return b - L + 1; }
};

SambeWindow make_window(int L);

enum class Boundary { Obc, Pbc };
const char* to_string(Boundary b);

struct SambeOperator {
    SambeWindow window;
    long system_dim = 0;
    CMatrix matrix;
    Boundary boundary = Boundary::Obc;
    double alpha_F = 0.0;
    double omega = 0.0;
    long dim() const { return window.fourier_dim() * system_dim; }
};

// ((l + m + L - 1) mod 2L) - L + 1
int wrap_add(int l, int m, const SambeWindow& w);

double alpha_F(const FourierHamiltonian& h, int L);

SambeOperator build_floquet(const FourierHamiltonian& h, int L, Boundary boundary);

int cutoff_for_accuracy(int M, double alphaT, double eps);
int cutoff_lieb_robinson(int M, double alphaT, double eps);
// reference window for "exact" eigenpairs
int reference_window(const FourierHamiltonian& h, int L);

double fold_bz(double x, double omega);
// l with x in BZ_l = [(-l - 1/2) w, (-l + 1/2) w)
int bz_index(double x, double omega);

struct ShiftResult {
    CVector state;
    double lost_norm = 0.0;
};
ShiftResult shift_add(const CVector& state, int l, const SambeWindow& w, long system_dim, bool strict);

// block l of a Sambe vector
CVector fourier_component(const CVector& state, int l, const SambeWindow& w, long system_dim);
// |l>_f (x) psi
CVector embed(const CVector& psi, int l, const SambeWindow& w);

namespace tail {
struct Exact {};
struct Truncated {
    double eps_max_over_omega;
};
struct ExpDecay {
    double zeta;
};
struct TailSum {
    int L;
};
}  // namespace tail
using TailVariant = std::variant<tail::Exact, tail::Truncated, tail::ExpDecay, tail::TailSum>;

double tail_bound(int l, int M, double alphaT, const TailVariant& variant);
double tail_bound_exact(int l, int M, double alphaT);
double tail_bound_truncated(int l, int M, double alphaT, double eps_max_over_omega);
double tail_bound_expdecay(int l, double zeta, double alphaT);
double tail_sum(int L, int M, double alphaT);

}  // namespace floquet
