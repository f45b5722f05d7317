#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "floquet/spectral.hpp"

namespace floquet {

// Register of b = b_prime + b_F bits storing v = x / 2^b_F, x an energy in units of w.
// Integer k in a bin always means v = k / 2^b, i.e. x = k / 2^b_prime.
struct RegisterModel {
    int b_prime = 1;
    int b_F = 0;
    std::optional<double> nu;  // rounding promise; empty means no-promise mode

    int b() const { return b_prime + b_F; }
    bool promise() const { return nu.has_value(); }
    double energy(std::int64_t k, double omega) const;  // k / 2^b_prime * w
    std::string rational(std::int64_t k) const;          // "k/2^b"
};

// smallest b' with 2^-b' <= eps (at least 1)
int precision_bits(double eps);

struct RegisterBin {
    std::int64_t k = 0;
    double weight = 1.0;  // probability, the amplitude is its square root
};

// promise: one bin floor(2^b v); no-promise: the two bins around v, lower one first with
// weight 1 - frac(2^b v). Values within 1e-9 of a grid point are snapped onto it.
std::vector<RegisterBin> qpe_register_map(double v, const RegisterModel& reg);

struct PromiseCheck {
    bool ok = true;
    std::vector<double> violating;
};
// values in units of w; zones [(x - nu/2)/2^b', (x + nu/2)/2^b') around every grid point
PromiseCheck check_rounding_promise(const std::vector<double>& values, double nu, int b_prime);
// eigenvalues of H_F^L (obc) lying in BZ_l, |l| within the window [l_range], scanned for
// zones of width nu/2 at b' + b_F bits
PromiseCheck inherited_promise_check(const FourierHamiltonian& h, int L, int l_range, double nu, int b_prime);

struct Quotient {
    int l = 0;
    double remainder = 0.0;  // in [-w/2, w/2)
};
// v = remainder - l w
Quotient quantum_arithmetic(double v, double omega);

struct QpeEntry {
    std::int64_t k = 0;      // remainder register value
    double value = 0.0;      // energy of the bin
    double prob = 0.0;
    CVector post_state;      // physical or Sambe, normalized
    int bz_index = 0;
    double purity = 1.0;     // of the post state once the quotient register is traced out
    std::vector<CVector> garbage;  // Sambe runs: unnormalized branch per quotient value
};

struct QpeOutcome {
    RegisterModel reg;
    double omega = 0.0;
    std::vector<QpeEntry> entries;  // sorted by k
    double success_prob = 1.0;
    double discarded_prob = 0.0;
    nlohmann::json diagnostics = nlohmann::json::object();
    // Sambe runs: central eigenpairs of H_F,pbc^{8L}, ascending folded value
    std::vector<double> central_values;
    std::vector<CVector> central_states;

    double total_prob() const;
};

nlohmann::json to_json(const QpeOutcome& out, bool include_states = false);

// deterministic sampling of register outcomes (indices into entries)
std::vector<int> sample_outcomes(const QpeOutcome& out, int shots, std::uint64_t seed);

struct PhysicalQpeOptions {
    double eps = 1e-3;
    double delta = 1e-3;
    std::optional<double> nu;
    double t = 0.0;
};
QpeOutcome fqpe_physical(const FourierHamiltonian& h, const CVector& psi, const PhysicalQpeOptions& opt);

constexpr int kWindowFactor = 8;

// (1/sqrt(8L)) sum_{l in [4L]} |l>_f psi, on the window [4L]
CVector build_initial_sambe_state(const CVector& psi, int L);

struct InitialDecomposition {
    int L = 0;
    std::vector<cplx> coeffs;         // psi = sum_n c_n phi_n(0)
    std::vector<double> values;       // central eigenvalues of H_F,pbc^{8L}
    double psi1_norm = 0.0;
    double perp_norm = 0.0;           // ||P Psi_1||
    double neg_norm = 0.0;
    double coeff_l1 = 0.0;            // sum_n |c_n|
    double psi1_bound = 0.0;        // per eigenstate
    double neg_bound = 0.0;           // per eigenstate
    // single-eigenstate runs psi = phi_n(0)
    std::vector<double> psi1_norm_n;
    std::vector<double> neg_norm_n;
    CVector psi_coherent;             // (1/sqrt(8L)) sum_n c_n sum_{l in [3L]} Add_l Phi_n
    CVector psi_coherent_L;           // same with l in [L]
    CVector psi_neg;
};
InitialDecomposition decompose_initial_state(const CVector& psi, const FourierHamiltonian& h, int L);

struct SambeQpeOptions {
    double eps = 1e-3;
    double delta = 1e-3;
    std::optional<double> nu;
    std::optional<int> L;  // default: cutoff_for_accuracy(M, aT, min(delta, eps nu / 2) 2^-N)
    bool decompose = true;
};
// promise mode when opt.nu is set, otherwise the no-promise variant
QpeOutcome fqpe_sambe(const FourierHamiltonian& h, const CVector& psi, const SambeQpeOptions& opt);
int default_fqpe_cutoff(const FourierHamiltonian& h, double eps, double delta, std::optional<double> nu);

double f3(double x);

struct QaaComparison {
    CMatrix matrix_route;    // Pi QSVT P0 restricted to the P0 range
    CMatrix semantic_route;  // A (3 - 4 A^dag A)
    double agreement = 0.0;
};
// Sequence R_Pi(0) W R_P0(-pi/2) W^dag R_Pi(-pi/2) W on dense matrices; p0_cols spans the range of P0.
QaaComparison qsvt_amplify(const CMatrix& w, const CMatrix& pi, const CMatrix& p0_cols);

double approx_qsvt_error_bound(int q, double eta, int n_max);

struct QsvtExperiment {
    double eta = 0.0;
    int n_max = 0;
    double measured = 0.0;
    double bound = 0.0;
};
// f3 applied to a random Hermitian H (||H|| <= 1) and a perturbation within eta; psi spread
// over n_max eigenvectors of H
QsvtExperiment qsvt_experiment(int dim, double eta, std::uint64_t seed);

enum class CostKind { Thm3, Thm4, StandardExp, StandardBlock, PrepTimeIndep, PrepPhysical, PrepSambe };
const char* to_string(CostKind k);
CostKind parse_cost_kind(const std::string& s);

struct CostParams {
    double alphaT = 1.0;
    int N = 1;
    double eps = 0.1;
    double delta = 0.1;
    double nu = 1.0;
    double gamma = 1.0;
    double Delta = 0.1;
};
struct CostReport {
    CostKind kind = CostKind::Thm3;
    double queries = 0.0;
    double state_prep_queries = 0.0;  // preparation rows only
    double ancilla = 0.0;              // beyond n_a
    std::string label = "asymptotic shape with unit constants";
};
CostReport cost_formulas(const CostParams& p, CostKind kind);
nlohmann::json to_json(const CostReport& r);

}  // namespace floquet
