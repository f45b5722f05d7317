#include "floquet/prep.hpp"

#include <algorithm>
#include <cmath>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

double chebyshev(int q, double x) {
    if (std::abs(x) <= 1.0) return std::cos(q * std::acos(x));
    const double s = (x > 0 || q % 2 == 0) ? 1.0 : -1.0;
    return s * std::cosh(q * std::acosh(std::abs(x)));
}

FourierHamiltonian shifted_model(const FourierHamiltonian& h, double shift) {
    std::map<int, CMatrix> comps = h.components();
    CMatrix h0 = h.component(0);
    h0 -= shift * CMatrix::Identity(h.dim(), h.dim());
    comps[0] = h0;
    if (h.mode() == DriveMode::Decaying) {
        const double a = std::max(h.alpha(), operator_norm(h0) * (1.0 + 1e-12));
        return FourierHamiltonian::decaying(h.n_qubits(), h.period(), a, h.zeta(), comps);
    }
    return FourierHamiltonian::bounded(h.n_qubits(), h.period(), h.M(), comps);
}

// state rho = sum_i |v_i><v_i|, returns fidelity with target and the dominant eigenvector
std::pair<double, CVector> mixed_fidelity(const std::vector<CVector>& vs, const CVector& target) {
    double tr = 0.0, num = 0.0;
    const long n = static_cast<long>(vs.size());
    CMatrix gram(n, n);
    for (long a = 0; a < n; ++a) {
        tr += vs[a].squaredNorm();
        num += std::norm(target.dot(vs[a]));
        for (long b = 0; b < n; ++b) gram(a, b) = vs[a].dot(vs[b]);
    }
    if (!(tr > 0.0)) throw NumericError("filtered state has zero weight", 0);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gram + gram.adjoint()));
    const CVector u = es.eigenvectors().col(n - 1);
    CVector top = CVector::Zero(vs[0].size());
    for (long a = 0; a < n; ++a) top += u(a) * vs[a];
    return {num / tr, canonical_phase(top / top.norm())};
}

}  // namespace

bool FilterProjector::contains(std::int64_t k) const { return std::binary_search(bins.begin(), bins.end(), k); }

CMatrix FilterProjector::matrix() const {
    const std::int64_t n = std::int64_t(1) << b_prime;
    CMatrix p = CMatrix::Zero(n, n);
    for (std::int64_t k : bins) p(k + n / 2, k + n / 2) = 1.0;
    return p;
}

FilterProjector filter_projector(double eps_n_over_omega, double Delta, int b_prime) {
    if (!(Delta > 0.0) || !(Delta < 1.0)) throw DomainError("Delta must lie in (0, 1)");
    if (b_prime < 1 || b_prime > 30) throw DomainError("b' must lie in [1, 30]");
    if (Delta / 2 < std::ldexp(1.0, -b_prime) * (1.0 - 1e-12))
        throw ConfigError("filter half-width Delta/2 = " + std::to_string(Delta / 2) +
                          " is narrower than the bin width 2^-" + std::to_string(b_prime));
    FilterProjector f;
    f.b_prime = b_prime;
    f.center = eps_n_over_omega;
    f.Delta = Delta;
    const std::int64_t n = std::int64_t(1) << b_prime;
    for (std::int64_t k = -n / 2; k < n / 2; ++k) {
        const double x = std::ldexp(static_cast<double>(k), -b_prime);
        if (std::abs(fold_bz(x - eps_n_over_omega, 1.0)) < Delta / 2) f.bins.push_back(k);
    }
    return f;
}

int amplification_degree(double gamma, double delta) {
    if (!(gamma > 0.0) || gamma > 1.0) throw DomainError("gamma must lie in (0, 1]");
    if (!(delta > 0.0) || !(delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    int q = static_cast<int>(std::ceil(std::log(2.0 / std::sqrt(delta)) / gamma));
    if (q % 2 == 0) ++q;
    return std::max(q, 1);
}

double amplified_success(double s, int q, double delta) {
    const double d = std::sqrt(delta);
    // T_{1/q}(1/d)
    const double x = std::cosh(std::acosh(1.0 / d) / q);
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    const double t = chebyshev(q, x * c);
    return std::clamp(1.0 - d * d * t * t, 0.0, 1.0);
}

PrepResult prepare_eigenstate(const FourierHamiltonian& h, const CVector& psi, const PrepSpec& spec) {
    if (!(spec.Delta > 0.0) || !(spec.Delta < 1.0)) throw DomainError("Delta must lie in (0, 1)");
    if (!(spec.delta > 0.0) || !(spec.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    if (!(spec.gamma > 0.0) || spec.gamma > 1.0) throw DomainError("gamma must lie in (0, 1]");
    if (psi.size() != h.dim()) throw DimensionError("prepare_eigenstate: state dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-8) throw DomainError("prepare_eigenstate: state is not normalized");
    const double w = h.omega();

    const Oracle orc = make_oracle(h, spec.oracle_steps);
    const auto& ents = orc.spectrum.entries;
    int n = -1;
    double best = INFINITY;
    for (std::size_t j = 0; j < ents.size(); ++j) {
        const double dist = std::abs(fold_bz(ents[j].value - spec.eps_n, w)) / w;
        if (dist < best) {
            best = dist;
            n = static_cast<int>(j);
        }
    }
    if (best >= spec.Delta / 2)
        throw PreconditionError("no oracle quasienergy within Delta/2 of the target (closest at " +
                                std::to_string(best) + " w)");
    double gap = INFINITY;
    for (std::size_t j = 0; j < ents.size(); ++j)
        if (static_cast<int>(j) != n) gap = std::min(gap, std::abs(fold_bz(ents[j].value - ents[n].value, w)) / w);
    if (gap < spec.Delta)
        throw GapViolation("quasienergy gap " + std::to_string(gap) + " w is below Delta = " + std::to_string(spec.Delta));
    const double overlap = std::abs(ents[n].vector.dot(psi));
    if (overlap < spec.gamma)
        throw OverlapViolation("overlap " + std::to_string(overlap) + " is below gamma = " + std::to_string(spec.gamma));

    PrepResult r;
    r.target = spec.target;
    r.n = n;
    r.quasienergy = ents[n].value;
    const double eps = spec.Delta / 2;
    const double del = spec.gamma * spec.delta;
    const int bp = precision_bits(eps);

    std::vector<CVector> kept;
    double filtered = 0.0, total = 0.0;
    QpeOutcome out;
    FilterProjector f;
    if (spec.target == TargetKind::Physical) {
        PhysicalQpeOptions o;
        o.eps = eps;
        o.delta = del;
        o.t = spec.t;
        out = fqpe_physical(h, psi, o);
        f = filter_projector(spec.eps_n / w, spec.Delta, bp);
        for (const auto& e : out.entries) {
            total += e.prob;
            if (!f.contains(e.k)) continue;
            filtered += e.prob;
            kept.push_back(std::sqrt(e.prob) * e.post_state);
        }
        CVector ref = ents[n].vector;
        if (spec.t != 0.0) ref = floquet_operator(h, method::Discretized{spec.oracle_steps}, spec.t) * ref;
        std::tie(r.fidelity, r.state) = mixed_fidelity(kept, ref / ref.norm());
        for (std::size_t j = 0; j < ents.size(); ++j) {
            if (static_cast<int>(j) == n) continue;
            CVector o2 = ents[j].vector;
            if (spec.t != 0.0) o2 = floquet_operator(h, method::Discretized{spec.oracle_steps}, spec.t) * o2;
            r.cross_fidelity.push_back(mixed_fidelity(kept, o2 / o2.norm()).first);
        }
    } else {
        // shift the target to the centre of the zone so that it is a central eigenvector
        const FourierHamiltonian hs = shifted_model(h, spec.eps_n);
        SambeQpeOptions o;
        o.eps = eps;
        o.delta = del;
        o.L = spec.L;
        o.decompose = false;
        out = fqpe_sambe(hs, psi, o);
        f = filter_projector(0.0, spec.Delta, bp);
        for (const auto& e : out.entries) {
            total += e.prob;
            if (!f.contains(e.k)) continue;
            filtered += e.prob;
            for (const auto& g : e.garbage) kept.push_back(g);
        }
        std::size_t tgt = 0;
        for (std::size_t j = 0; j < out.central_values.size(); ++j)
            if (std::abs(out.central_values[j]) < std::abs(out.central_values[tgt])) tgt = j;
        std::tie(r.fidelity, r.state) = mixed_fidelity(kept, out.central_states[tgt]);
        for (std::size_t j = 0; j < out.central_states.size(); ++j)
            if (j != tgt) r.cross_fidelity.push_back(mixed_fidelity(kept, out.central_states[j]).first);
    }
    for (std::int64_t k : f.bins) r.filter_bins.push_back(out.reg.rational(k));
    r.initial_amplitude = std::sqrt(filtered);
    r.q_semantic = amplification_degree(spec.gamma, spec.delta);
    r.success_prob = amplified_success(r.initial_amplitude, r.q_semantic, spec.delta);
    r.discarded_prob = std::max(0.0, 1.0 - total);
    return r;
}

nlohmann::json to_json(const PrepResult& r) {
    return {{"target", r.target == TargetKind::Physical ? "physical" : "sambe"},
            {"quasienergy", r.quasienergy},
            {"fidelity", r.fidelity},
            {"success_prob", r.success_prob},
            {"initial_amplitude", r.initial_amplitude},
            {"q_semantic", r.q_semantic},
            {"filter_bins", r.filter_bins},
            {"discarded_prob", r.discarded_prob},
            {"cross_fidelity", r.cross_fidelity}};
}

}  // namespace floquet
