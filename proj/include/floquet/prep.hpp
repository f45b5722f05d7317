#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floquet/fqpe.hpp"

namespace floquet {

enum class TargetKind { Physical, Sambe };

struct PrepSpec {
    double eps_n = 0.0;   // target quasienergy, energy units
    double Delta = 0.1;   // gap in units of w
    double gamma = 1.0;   // overlap lower bound
    double delta = 1e-3;  // state error
    TargetKind target = TargetKind::Physical;
    double t = 0.0;       // physical target time
    std::optional<int> L; // Sambe target cutoff, default from the FQPE accuracy
    long oracle_steps = 100000;
};

// register values x = k / 2^b' with |fold(x - eps_n / w)| < Delta / 2
struct FilterProjector {
    int b_prime = 1;
    double center = 0.0;  // eps_n / w
    double Delta = 0.0;
    std::vector<std::int64_t> bins;

    bool contains(std::int64_t k) const;
    // diagonal projector on the 2^b' register values, index k + 2^(b'-1)
    CMatrix matrix() const;
};
FilterProjector filter_projector(double eps_n_over_omega, double Delta, int b_prime);

// fixed-point amplification: smallest odd q with q >= ln(2 / sqrt(delta)) / gamma
int amplification_degree(double gamma, double delta);
// final good-subspace weight from initial amplitude s
double amplified_success(double s, int q, double delta);

struct PrepResult {
    TargetKind target = TargetKind::Physical;
    int n = 0;                      // index into the oracle spectrum
    double quasienergy = 0.0;       // oracle value
    CVector state;
    double fidelity = 0.0;
    double success_prob = 0.0;
    double initial_amplitude = 0.0; // sqrt of the filtered weight before amplification
    int q_semantic = 1;
    std::vector<std::string> filter_bins;
    double discarded_prob = 0.0;
    std::vector<double> cross_fidelity;  // against every other oracle eigenstate
};

PrepResult prepare_eigenstate(const FourierHamiltonian& h, const CVector& psi, const PrepSpec& spec);
nlohmann::json to_json(const PrepResult& r);

}  // namespace floquet
