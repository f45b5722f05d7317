#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "floquet/numerics.hpp"

namespace floquet {

struct PauliTerm {
    cplx coeff;
    std::string pauli;
};

enum class DriveMode { Bounded, Decaying };

class FourierHamiltonian {
public:
    // Components are given in absolute energy units. Missing H_{-m} are filled in as H_m^dag.
    static FourierHamiltonian bounded(int n_qubits, double period, int M, std::map<int, CMatrix> components,
                                      std::map<int, double> alpha_m = {});
    static FourierHamiltonian decaying(int n_qubits, double period, double alpha, double zeta,
                                       std::map<int, CMatrix> components);
    static FourierHamiltonian from_pauli(int n_qubits, double period, int M,
                                         const std::map<int, std::vector<PauliTerm>>& terms,
                                         std::map<int, double> alpha_m = {});

    int n_qubits() const { return n_qubits_; }
    long dim() const { return 1L << n_qubits_; }
    double period() const { return period_; }
    double omega() const { return omega_; }
    DriveMode mode() const { return mode_; }
    // bounded: M; decaying: numeric cutoff M_eff
    int M() const { return M_; }
    double alpha() const { return alpha_; }
    double zeta() const { return zeta_; }
    double alphaT() const { return alpha_ * period_; }

    const std::map<int, CMatrix>& components() const { return components_; }
    const std::map<int, double>& alpha_m() const { return alpha_m_; }
    // zero matrix when absent
    CMatrix component(int m) const;
    double alpha_of(int m) const;
    // Pauli decomposition when the model came from Pauli input (with H_{-m} filled in)
    const std::map<int, std::vector<PauliTerm>>& pauli_terms() const { return pauli_; }
    bool has_pauli_terms() const { return !pauli_.empty(); }

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

private:
    void finalize(const std::map<int, double>& alpha_given);

    int n_qubits_ = 0;
    double period_ = 1.0;
    double omega_ = 0.0;
    DriveMode mode_ = DriveMode::Bounded;
    int M_ = 0;
    double alpha_ = 0.0;
    double zeta_ = 0.0;
    std::map<int, CMatrix> components_;
    std::map<int, double> alpha_m_;
    std::map<int, std::vector<PauliTerm>> pauli_;
    std::string name_ = "model";
};

constexpr double kDecayEta = 1e-14;
int decaying_cutoff(double alpha, double zeta);

FourierHamiltonian parse_hamiltonian(const nlohmann::json& config);
FourierHamiltonian parse_hamiltonian(const std::string& text);
FourierHamiltonian load_hamiltonian(const std::string& path);

// H(t) = sum_m H_m exp(-i m w t)
CMatrix evaluate_at(const FourierHamiltonian& h, double t);

struct NormBound {
    double value;
    bool derived_decaying;  // true when the geometric-series form was used
};
NormBound norm_bound(const FourierHamiltonian& h);

}  // namespace floquet
