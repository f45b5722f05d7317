#pragma once

#include <string>
#include <variant>
#include <vector>

#include "floquet/sambe.hpp"

namespace floquet {

enum class SpectrumSource { SambeObc, SambePbc, FloquetOpDiscretized, FloquetOpSambe };
const char* to_string(SpectrumSource s);

struct SpectrumEntry {
    double value = 0.0;  // eps~ (energy units)
    CVector vector;
    int bz_index = 0;
    double folded = 0.0;
    double residual = 0.0;
    bool central = false;
};

struct QuasiSpectrum {
    SpectrumSource source = SpectrumSource::SambeObc;
    double omega = 0.0;
    int L = 0;  // 0 for physical-space spectra
    long system_dim = 0;
    std::vector<SpectrumEntry> entries;

    std::vector<int> central_indices() const;
    // central folded values, ascending
    std::vector<double> central_values() const;
};

struct FloquetEigenpair {
    double quasienergy = 0.0;
    int L = 0;
    std::vector<CVector> components;  // index l + L - 1
    const CVector& component(int l) const { return components.at(l + L - 1); }
    CVector sum_components() const;
};

namespace method {
struct Discretized {
    long steps = 100000;
};
struct Sambe {
    int L_LR = 1;
};
}  // namespace method
using FloquetMethod = std::variant<method::Discretized, method::Sambe>;

CMatrix floquet_operator(const FourierHamiltonian& h, const FloquetMethod& m, double t);
CMatrix floquet_operator(const FourierHamiltonian& h, const FloquetMethod& m);
// Sambe method with L_LR from the Lieb-Robinson cutoff at eps
CMatrix floquet_operator_lr(const FourierHamiltonian& h, double t, double eps);

QuasiSpectrum quasienergies_from_unitary(const CMatrix& u_T, double omega, double period,
                                         SpectrumSource src = SpectrumSource::FloquetOpDiscretized);
QuasiSpectrum diagonalize_sambe(const SambeOperator& s);

FloquetEigenpair extract_eigenpair(const SpectrumEntry& entry, const SambeWindow& w, long system_dim);

CVector reconstruct_physical(const FloquetEigenpair& pair, const CMatrix& u_t, double t);
CVector reconstruct_physical(const FloquetEigenpair& pair, const FourierHamiltonian& h, double t);

struct MatchPair {
    int a = 0;
    int b = 0;
    double distance = 0.0;  // |fold(eps_a - eps_b)| / w
};
struct Matching {
    std::vector<MatchPair> pairs;
    double total = 0.0;
    double max = 0.0;
};
Matching match_mod_omega(const std::vector<double>& a, const std::vector<double>& b, double omega);
Matching match_mod_omega(const QuasiSpectrum& a, const QuasiSpectrum& b);

// ||P_A - P_B|| for two sets of orthonormal columns
double projector_distance(const CMatrix& a, const CMatrix& b);

struct Oracle {
    long steps = 0;
    CMatrix u_T;
    QuasiSpectrum spectrum;
};
Oracle make_oracle(const FourierHamiltonian& h, long steps = 100000);

struct CheckRow {
    std::string model_id;
    std::string check_id;
    int L = 0;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = true;
};

// measured values this small are round-off and compared with the floor added
constexpr double kNumericFloor = 1e-12;

struct BoundTargets {
    bool thm2 = false;
    bool trunc = false;
    bool prop1 = false;
    bool prop2 = false;
    bool propB1 = false;
    bool propB2 = false;
    bool propB3 = false;
    bool propC1 = false;
    bool propD1 = false;
    bool thmE1 = false;
    static BoundTargets all();
    static BoundTargets parse(const std::string& csv);
};

std::vector<CheckRow> verify_bounds(const FourierHamiltonian& h, int L, const BoundTargets& targets,
                                    const Oracle* oracle);

}  // namespace floquet
