#include "floquet/fqpe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "floquet/blockenc.hpp"
#include "floquet/bounds.hpp"
#include "floquet/errors.hpp"

namespace floquet {

CVector build_initial_sambe_state_unchecked(const CVector& psi, int L);

namespace {

constexpr double kSnap = 1e-9;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t wrap_register(std::int64_t k, int b) {
    const std::int64_t n = std::int64_t(1) << b;
    const std::int64_t half = n / 2;
    return floor_div(k + half, n) * (-n) + k;
}

// bin k at b' bits -> quotient l and remainder bin with x = r/2^b' in [-1/2, 1/2)
std::pair<int, std::int64_t> split_bin(std::int64_t k, int b_prime) {
    const std::int64_t n = std::int64_t(1) << b_prime;
    const std::int64_t q = floor_div(k + n / 2, n);
    return {static_cast<int>(-q), k - q * n};
}

void require_normalized(const CVector& psi, long dim, const char* where) {
    if (psi.size() != dim)
        throw DimensionError(std::string(where) + ": state has dimension " + std::to_string(psi.size()) +
                             ", expected " + std::to_string(dim));
    if (std::abs(psi.norm() - 1.0) > 1e-8) throw DomainError(std::string(where) + ": state is not normalized");
}

// (U (x) I_d) applied to every column, Sambe index f * d + s
CMatrix apply_fourier(const CMatrix& u, const CMatrix& x, long d) {
    const long F = u.rows();
    CMatrix out(x.rows(), x.cols());
    for (long c = 0; c < x.cols(); ++c) {
        Eigen::Map<const CMatrix> in(x.col(c).data(), d, F);
        Eigen::Map<CMatrix> o(out.col(c).data(), d, F);
        o.noalias() = in * u.transpose();
    }
    return out;
}

// uniform over [4L] on the window [8L], |0>_f mapped onto it
CMatrix uniform_prep(int L) {
    const SambeWindow big = make_window(kWindowFactor * L);
    const SambeWindow small = make_window(4 * L);
    const long F = big.fourier_dim();
    CVector v = CVector::Zero(F);
    for (int l = small.lo(); l <= small.hi(); ++l) v(big.block(l)) = 1.0 / std::sqrt(double(small.fourier_dim()));
    const CMatrix h = householder_completion(v);
    // swap the first basis vector with |0>_f
    CMatrix perm = CMatrix::Identity(F, F);
    const long z = big.block(0);
    perm.col(0).swap(perm.col(z));
    return h * perm.transpose();
}

struct CentralSet {
    std::vector<long> idx;  // eigen indices, ascending folded value
};

CentralSet central_eigvecs(const EigenSystem& es, double omega, long d) {
    CentralSet c;
    for (long j = 0; j < es.values.size(); ++j)
        if (bz_index(es.values(j), omega) == 0) c.idx.push_back(j);
    if (static_cast<long>(c.idx.size()) != d)
        throw StructuralError("central Brillouin zone holds " + std::to_string(c.idx.size()) +
                              " eigenvalues, expected " + std::to_string(d));
    std::stable_sort(c.idx.begin(), c.idx.end(), [&](long a, long b) {
        return fold_bz(es.values(a), omega) < fold_bz(es.values(b), omega);
    });
    return c;
}

CVector embed_window(const CVector& v, const SambeWindow& from, const SambeWindow& to, long d) {
    CVector out = CVector::Zero(to.fourier_dim() * d);
    for (int l = from.lo(); l <= from.hi(); ++l) out.segment(to.block(l) * d, d) = v.segment(from.block(l) * d, d);
    return out;
}

bool in_perp_range(int l, int L) {
    const bool in6 = l >= -6 * L + 1 && l <= 6 * L;
    const bool inL1 = l >= -L && l <= L + 1;
    return in6 && !inL1;
}

struct DecompParts {
    double psi1_norm = 0.0;
    double perp_norm = 0.0;
    double neg_norm = 0.0;
    CVector coh, cohL, neg;
};

DecompParts decompose_with(const EigenSystem& es, const std::vector<CVector>& Phi, const std::vector<cplx>& c,
                           const CVector& psi0, const SambeWindow& w8, long d, double omega, int L,
                           const CMatrix& perp_vecs) {
    DecompParts p;
    p.coh = CVector::Zero(psi0.size());
    p.cohL = CVector::Zero(psi0.size());
    const double norm = 1.0 / std::sqrt(double(8 * L));
    const SambeWindow w3 = make_window(3 * L);
    const SambeWindow w1 = make_window(L);
    for (std::size_t n = 0; n < Phi.size(); ++n) {
        if (c[n] == cplx(0.0, 0.0)) continue;
        for (int l = w3.lo(); l <= w3.hi(); ++l) {
            const CVector s = shift_add(Phi[n], l, w8, d, false).state * (c[n] * norm);
            p.coh += s;
            if (w1.contains(l)) p.cohL += s;
        }
    }
    (void)es;
    (void)omega;
    const CVector psi1 = psi0 - p.coh;
    p.psi1_norm = psi1.norm();
    const CVector ppsi = perp_vecs * (perp_vecs.adjoint() * psi1);
    p.perp_norm = ppsi.norm();
    p.neg = psi1 - ppsi;
    if (p.perp_norm > 0.0) p.neg += (p.perp_norm - 0.5) * (ppsi / p.perp_norm);
    p.neg_norm = p.neg.norm();
    return p;
}

struct SambeSetup {
    int L = 0;
    SambeWindow w8;
    long d = 0;
    double omega = 0.0;
    double alpha_F = 0.0;
    EigenSystem es;
    CentralSet central;
    CMatrix perp_vecs;
};

SambeSetup make_setup(const FourierHamiltonian& h, int L) {
    if (L < 1) throw DomainError("cutoff L must be >= 1");
    SambeSetup s;
    s.L = L;
    s.d = h.dim();
    s.omega = h.omega();
    s.w8 = make_window(kWindowFactor * L);
    check_dim(s.w8.fourier_dim() * s.d, "fqpe window 8L");
    const SambeOperator op = build_floquet(h, kWindowFactor * L, Boundary::Pbc);
    s.alpha_F = op.alpha_F;
    s.es = hermitian_eigendecompose(op.matrix);
    s.central = central_eigvecs(s.es, s.omega, s.d);
    std::vector<long> perp;
    for (long j = 0; j < s.es.values.size(); ++j)
        if (in_perp_range(bz_index(s.es.values(j), s.omega), L)) perp.push_back(j);
    s.perp_vecs.resize(s.es.vectors.rows(), static_cast<long>(perp.size()));
    for (std::size_t k = 0; k < perp.size(); ++k) s.perp_vecs.col(k) = s.es.vectors.col(perp[k]);
    return s;
}

InitialDecomposition decompose(const SambeSetup& s, const CVector& psi, const FourierHamiltonian& h) {
    const long d = s.d;
    InitialDecomposition out;
    out.L = s.L;
    std::vector<CVector> Phi;
    CMatrix phi0(d, d);
    for (long n = 0; n < d; ++n) {
        const long j = s.central.idx[n];
        Phi.push_back(s.es.vectors.col(j));
        out.values.push_back(s.es.values(j));
        CVector sum = CVector::Zero(d);
        for (int l = s.w8.lo(); l <= s.w8.hi(); ++l) sum += Phi.back().segment(s.w8.block(l) * d, d);
        phi0.col(n) = sum;
    }
    const CVector c = phi0.colPivHouseholderQr().solve(psi);
    out.coeffs.assign(c.data(), c.data() + c.size());
    for (const auto& v : out.coeffs) out.coeff_l1 += std::abs(v);

    const SambeWindow w4 = make_window(4 * s.L);
    const CVector psi0 = embed_window(build_initial_sambe_state(psi, s.L), w4, s.w8, d);
    const DecompParts all = decompose_with(s.es, Phi, out.coeffs, psi0, s.w8, d, s.omega, s.L, s.perp_vecs);
    out.psi1_norm = all.psi1_norm;
    out.perp_norm = all.perp_norm;
    out.neg_norm = all.neg_norm;
    out.psi_coherent = all.coh;
    out.psi_coherent_L = all.cohL;
    out.psi_neg = all.neg;

    for (long n = 0; n < d; ++n) {
        std::vector<cplx> e(d, cplx(0.0, 0.0));
        e[n] = 1.0;
        const CVector p0 = embed_window(build_initial_sambe_state_unchecked(phi0.col(n), s.L), w4, s.w8, d);
        const DecompParts one = decompose_with(s.es, Phi, e, p0, s.w8, d, s.omega, s.L, s.perp_vecs);
        out.psi1_norm_n.push_back(one.psi1_norm);
        out.neg_norm_n.push_back(one.neg_norm);
    }
    out.psi1_bound = bounds::psi1_deviation(s.L, h.M(), h.alphaT());
    out.neg_bound = bounds::psi_neg(s.L, h.M(), h.alphaT());
    return out;
}

}  // namespace

// --- register semantics --------------------------------------------------------------

double RegisterModel::energy(std::int64_t k, double omega) const {
    return std::ldexp(static_cast<double>(k), -b_prime) * omega;
}

std::string RegisterModel::rational(std::int64_t k) const { return std::to_string(k) + "/2^" + std::to_string(b()); }

int precision_bits(double eps) {
    if (!(eps > 0.0) || !(eps <= 1.0)) throw DomainError("eps must lie in (0, 1]");
    const double v = std::log2(1.0 / eps);
    const double r = std::round(v);
    const int b = std::abs(v - r) < kSnap ? static_cast<int>(r) : static_cast<int>(std::ceil(v));
    return std::max(1, b);
}

std::vector<RegisterBin> qpe_register_map(double v, const RegisterModel& reg) {
    if (!std::isfinite(v)) throw DomainError("qpe_register_map: non-finite value");
    double y = std::ldexp(v, reg.b());
    const double r = std::round(y);
    if (std::abs(y - r) < kSnap) y = r;
    const double fl = std::floor(y);
    const auto k0 = static_cast<std::int64_t>(fl);
    if (reg.promise()) return {{wrap_register(k0, reg.b()), 1.0}};
    const double frac = y - fl;
    return {{wrap_register(k0, reg.b()), 1.0 - frac}, {wrap_register(k0 + 1, reg.b()), frac}};
}

PromiseCheck check_rounding_promise(const std::vector<double>& values, double nu, int b_prime) {
    if (!(nu > 0.0) || !(nu < 1.0)) throw DomainError("rounding promise nu must lie in (0, 1)");
    PromiseCheck pc;
    for (double v : values) {
        const double z = std::ldexp(v, b_prime) + nu / 2;
        if (z - std::floor(z) < nu) {
            pc.ok = false;
            pc.violating.push_back(v);
        }
    }
    return pc;
}

PromiseCheck inherited_promise_check(const FourierHamiltonian& h, int L, int l_range, double nu, int b_prime) {
    const SambeOperator op = build_floquet(h, L, Boundary::Obc);
    const EigenSystem es = hermitian_eigendecompose(op.matrix);
    const SambeWindow wl = make_window(std::max(l_range, 1));
    std::vector<double> xs;
    for (long j = 0; j < es.values.size(); ++j)
        if (wl.contains(bz_index(es.values(j), h.omega()))) xs.push_back(es.values(j) / h.omega());
    // the zone grid is integer-periodic in 2^b' x, so BZ_l values need no shift
    return check_rounding_promise(xs, nu / 2, b_prime);
}

Quotient quantum_arithmetic(double v, double omega) {
    if (!std::isfinite(v)) throw DomainError("quantum_arithmetic: non-finite value");
    Quotient q;
    q.l = bz_index(v, omega);
    q.remainder = v + q.l * omega;
    return q;
}

double QpeOutcome::total_prob() const {
    double s = discarded_prob;
    for (const auto& e : entries) s += e.prob;
    return s;
}

nlohmann::json to_json(const QpeOutcome& out, bool include_states) {
    nlohmann::json j;
    j["register"] = {{"b", out.reg.b()}, {"b_prime", out.reg.b_prime}, {"b_F", out.reg.b_F}};
    if (out.reg.nu) j["register"]["nu"] = *out.reg.nu;
    else j["register"]["nu"] = nullptr;
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        const auto& e = out.entries[i];
        nlohmann::json je{{"bin", out.reg.rational(e.k)},
                          {"value", e.value},
                          {"value_over_omega", e.value / out.omega},
                          {"prob", e.prob},
                          {"bz_index", e.bz_index},
                          {"purity", e.purity},
                          {"state_ref", "post_states[" + std::to_string(i) + "]"}};
        entries.push_back(je);
    }
    j["entries"] = entries;
    j["success_prob"] = out.success_prob;
    j["discarded_prob"] = out.discarded_prob;
    j["diagnostics"] = out.diagnostics;
    if (include_states) {
        nlohmann::json states = nlohmann::json::array();
        for (const auto& e : out.entries) {
            nlohmann::json s = nlohmann::json::array();
            for (long k = 0; k < e.post_state.size(); ++k) s.push_back({e.post_state(k).real(), e.post_state(k).imag()});
            states.push_back(s);
        }
        j["post_states"] = states;
    }
    return j;
}

std::vector<int> sample_outcomes(const QpeOutcome& out, int shots, std::uint64_t seed) {
    if (shots < 0) throw DomainError("shots must be >= 0");
    std::vector<double> w;
    for (const auto& e : out.entries) w.push_back(e.prob);
    w.push_back(std::max(0.0, out.discarded_prob));
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> dist(w.begin(), w.end());
    std::vector<int> res;
    res.reserve(shots);
    for (int i = 0; i < shots; ++i) {
        const int k = dist(rng);
        res.push_back(k == static_cast<int>(out.entries.size()) ? -1 : k);
    }
    return res;
}

// --- physical-space QPE ---------------------------------------------------------------

QpeOutcome fqpe_physical(const FourierHamiltonian& h, const CVector& psi, const PhysicalQpeOptions& opt) {
    require_normalized(psi, h.dim(), "fqpe_physical");
    if (!(opt.delta > 0.0) || !(opt.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    QpeOutcome out;
    out.omega = h.omega();
    out.reg.b_prime = precision_bits(opt.eps);
    out.reg.b_F = 0;
    out.reg.nu = opt.nu;

    constexpr double kLrEps = 1e-12;
    const CMatrix raw = floquet_operator_lr(h, h.period(), kLrEps);
    const CMatrix uT = polar_unitary(raw);
    const QuasiSpectrum spec = quasienergies_from_unitary(uT, h.omega(), h.period(), SpectrumSource::FloquetOpSambe);

    std::vector<double> xs;
    for (const auto& e : spec.entries) xs.push_back(e.value / h.omega());
    if (opt.nu) {
        const PromiseCheck pc = check_rounding_promise(xs, *opt.nu, out.reg.b_prime);
        if (!pc.ok) {
            std::string vals;
            for (double v : pc.violating) vals += (vals.empty() ? "" : ", ") + std::to_string(v);
            throw PromiseViolation("quasienergies/w inside a forbidden rounding zone: " + vals);
        }
    }
    CMatrix ut = CMatrix::Identity(h.dim(), h.dim());
    double ut_defect = 0.0;
    if (opt.t != 0.0) {
        const CMatrix r = floquet_operator_lr(h, opt.t, kLrEps);
        ut_defect = unitarity_defect(r);
        ut = polar_unitary(r);
    }

    std::map<std::int64_t, CVector> acc;
    nlohmann::json overlaps = nlohmann::json::array();
    for (std::size_t n = 0; n < spec.entries.size(); ++n) {
        const CVector& phi = spec.entries[n].vector;
        const cplx c = phi.dot(psi);
        overlaps.push_back({{"quasienergy", spec.entries[n].value}, {"weight", std::norm(c)}});
        const CVector evolved = ut * phi;
        for (const auto& bin : qpe_register_map(xs[n], out.reg)) {
            if (bin.weight <= 0.0) continue;
            const double e = out.reg.energy(bin.k, h.omega());
            const cplx amp = c * std::sqrt(bin.weight) * std::exp(cplx(0.0, -e * opt.t));
            auto it = acc.find(bin.k);
            if (it == acc.end()) it = acc.emplace(bin.k, CVector::Zero(h.dim())).first;
            it->second += amp * evolved;
        }
    }
    double total = 0.0;
    for (const auto& [k, v] : acc) {
        const double p = v.squaredNorm();
        if (p <= 0.0) continue;
        QpeEntry e;
        e.k = k;
        e.value = out.reg.energy(k, h.omega());
        e.prob = p;
        e.post_state = v / std::sqrt(p);
        e.bz_index = 0;
        total += p;
        out.entries.push_back(std::move(e));
    }
    out.success_prob = 1.0;
    out.discarded_prob = std::max(0.0, 1.0 - total);
    out.diagnostics = {{"method", "physical"},
                       {"L_LR", cutoff_lieb_robinson(h.M(), h.alphaT(), kLrEps)},
                       {"unitarity_defect_raw", unitarity_defect(raw)},
                       {"unitarity_defect_raw_t", ut_defect},
                       {"eigen_overlaps", overlaps},
                       {"t", opt.t}};
    return out;
}

// --- Sambe-space QPE -------------------------------------------------------------------

CVector build_initial_sambe_state_unchecked(const CVector& psi, int L) {
    const SambeWindow w = make_window(4 * L);
    const long d = psi.size();
    CVector out(w.fourier_dim() * d);
    const double a = 1.0 / std::sqrt(double(w.fourier_dim()));
    for (int l = w.lo(); l <= w.hi(); ++l) out.segment(w.block(l) * d, d) = a * psi;
    return out;
}

CVector build_initial_sambe_state(const CVector& psi, int L) {
    if (L < 1) throw DomainError("cutoff L must be >= 1");
    check_dim(static_cast<long>(2 * kWindowFactor) * L * psi.size(), "build_initial_sambe_state");
    if (std::abs(psi.norm() - 1.0) > 1e-8) throw DomainError("build_initial_sambe_state: state is not normalized");
    return build_initial_sambe_state_unchecked(psi, L);
}

InitialDecomposition decompose_initial_state(const CVector& psi, const FourierHamiltonian& h, int L) {
    require_normalized(psi, h.dim(), "decompose_initial_state");
    const SambeSetup s = make_setup(h, L);
    return decompose(s, psi, h);
}

int default_fqpe_cutoff(const FourierHamiltonian& h, double eps, double delta, std::optional<double> nu) {
    const double nv = nu.value_or(1.0);
    const double target = std::min(delta, eps * nv / 2.0) * std::ldexp(1.0, -h.n_qubits());
    return cutoff_for_accuracy(h.M(), h.alphaT(), target);
}

QpeOutcome fqpe_sambe(const FourierHamiltonian& h, const CVector& psi, const SambeQpeOptions& opt) {
    require_normalized(psi, h.dim(), "fqpe_sambe");
    if (!(opt.eps > 0.0) || !(opt.eps < 0.5)) throw DomainError("eps must lie in (0, 1/2)");
    if (!(opt.delta > 0.0) || !(opt.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    const int L = opt.L ? *opt.L : default_fqpe_cutoff(h, opt.eps, opt.delta, opt.nu);
    const SambeSetup s = make_setup(h, L);
    const long d = s.d;
    const long D = s.es.values.size();
    const double w = s.omega;

    QpeOutcome out;
    out.omega = w;
    out.reg.b_prime = precision_bits(opt.eps);
    out.reg.b_F = normalization_bits(s.alpha_F, w);
    out.reg.nu = opt.nu;
    const int bp = out.reg.b_prime;

    if (opt.nu) {
        std::vector<double> xs;
        const SambeWindow w6 = make_window(6 * L);
        for (long j = 0; j < D; ++j)
            if (w6.contains(bz_index(s.es.values(j), w))) xs.push_back(s.es.values(j) / w);
        const PromiseCheck pc = check_rounding_promise(xs, *opt.nu / 2, bp);
        if (!pc.ok)
            throw PromiseViolation("inherited promise fails for " + std::to_string(pc.violating.size()) +
                                   " eigenvalues of H_F,pbc^{8L} (first x = " + std::to_string(pc.violating[0]) + ")");
    }

    // register bins per eigenvector; promise mode stores a single bin with weight 1
    const SambeWindow wL = make_window(L);
    std::vector<std::int64_t> k0(D), k1(D);
    RVector sw(D), sw1(D), keep0(D), keep1(D);
    for (long j = 0; j < D; ++j) {
        const auto bins = qpe_register_map(std::ldexp(s.es.values(j) / w, -out.reg.b_F), out.reg);
        k0[j] = bins[0].k;
        const double wt = bins[0].weight;
        k1[j] = bins.size() > 1 ? bins[1].k : bins[0].k;
        sw(j) = std::sqrt(wt);
        sw1(j) = std::sqrt(std::max(0.0, 1.0 - wt));
        keep0(j) = wL.contains(split_bin(k0[j], bp).first) ? 1.0 : 0.0;
        keep1(j) = wL.contains(split_bin(k1[j], bp).first) ? 1.0 : 0.0;
    }

    const CMatrix uuni = uniform_prep(L);
    const CMatrix uuni_adj = uuni.adjoint();
    const CMatrix& V = s.es.vectors;
    CMatrix E = CMatrix::Zero(D, d);
    for (long q = 0; q < d; ++q) E(s.w8.block(0) * d + q, q) = 1.0;

    // W from the register-zero input: eigen coordinates, then the two register branches
    const CMatrix a0 = V.adjoint() * apply_fourier(uuni, E, d);
    RVector g(D);
    for (long j = 0; j < D; ++j) g(j) = keep0(j) * sw(j) * sw(j) + keep1(j) * sw1(j) * sw1(j);
    const CMatrix AtA = a0.adjoint() * g.asDiagonal() * a0;
    const CMatrix poly = 3.0 * CMatrix::Identity(d, d) - 4.0 * AtA;
    const CMatrix sem0 = keep0.cwiseProduct(sw).asDiagonal() * a0 * poly;
    const CMatrix sem1 = keep1.cwiseProduct(sw1).asDiagonal() * a0 * poly;

    // matrix route: R_Q(0) W R_P0(-pi/2) W^dag R_Q(-pi/2) W
    const cplx mi(0.0, -1.0), pi_(0.0, 1.0);
    CMatrix o0 = sw.asDiagonal() * a0;
    CMatrix o1 = sw1.asDiagonal() * a0;
    for (long j = 0; j < D; ++j) {
        o0.row(j) *= keep0(j) > 0 ? mi : pi_;
        o1.row(j) *= keep1(j) > 0 ? mi : pi_;
    }
    const CMatrix b0 = sw.asDiagonal() * o0 + sw1.asDiagonal() * o1;
    const CMatrix bp_ = sw1.asDiagonal() * o0 - sw.asDiagonal() * o1;
    CMatrix x0 = apply_fourier(uuni_adj, V * b0, d);
    CMatrix xp = apply_fourier(uuni_adj, V * bp_, d);
    for (long r = 0; r < D; ++r) x0.row(r) *= (r / d == s.w8.block(0)) ? mi : pi_;
    xp *= pi_;
    const CMatrix c0 = V.adjoint() * apply_fourier(uuni, x0, d);
    const CMatrix cp = V.adjoint() * apply_fourier(uuni, xp, d);
    CMatrix m0 = sw.asDiagonal() * c0 + sw1.asDiagonal() * cp;
    CMatrix m1 = sw1.asDiagonal() * c0 - sw.asDiagonal() * cp;
    m0 = keep0.asDiagonal() * m0;
    m1 = keep1.asDiagonal() * m1;
    const double agreement = std::sqrt((m0 - sem0).squaredNorm() + (m1 - sem1).squaredNorm());

    Eigen::SelfAdjointEigenSolver<CMatrix> sv(0.5 * (AtA + AtA.adjoint()));
    std::vector<double> sing;
    for (long k = 0; k < d; ++k) sing.push_back(std::sqrt(std::max(0.0, sv.eigenvalues()(k))));

    const CVector a0psi = a0 * psi;
    double pre = 0.0;
    for (long j = 0; j < D; ++j) pre += g(j) * std::norm(a0psi(j));
    const CVector out0 = m0 * psi;
    const CVector out1 = m1 * psi;
    const double post_weight = out0.squaredNorm() + out1.squaredNorm();

    // quantum arithmetic: remainder register, quotient l, Sambe state shifted back by -l
    std::map<std::int64_t, std::map<int, CVector>> branches;
    double lost2 = 0.0;
    auto deposit = [&](long j, std::int64_t k, cplx amp) {
        if (amp == cplx(0.0, 0.0)) return;
        const auto [l, r] = split_bin(k, bp);
        ShiftResult sh = shift_add(V.col(j), -l, s.w8, d, false);
        lost2 += std::norm(amp) * sh.lost_norm * sh.lost_norm;
        auto& slot = branches[r][l];
        if (slot.size() == 0) slot = CVector::Zero(D);
        slot += amp * sh.state;
    };
    for (long j = 0; j < D; ++j) {
        if (keep0(j) > 0) deposit(j, k0[j], out0(j));
        if (keep1(j) > 0 && sw1(j) > 0) deposit(j, k1[j], out1(j));
    }

    double kept_total = 0.0;
    for (auto& [r, per_l] : branches) {
        const double x = std::ldexp(static_cast<double>(r), -bp);
        if (!opt.nu && !(x >= -(0.5 - opt.eps) && x < 0.5 - opt.eps)) continue;
        std::vector<CVector> vs;
        for (auto& [l, v] : per_l) vs.push_back(std::move(v));
        const long n = static_cast<long>(vs.size());
        CMatrix G(n, n);
        for (long a = 0; a < n; ++a)
            for (long b = 0; b < n; ++b) G(a, b) = vs[a].dot(vs[b]);
        Eigen::SelfAdjointEigenSolver<CMatrix> ge(0.5 * (G + G.adjoint()));
        const RVector ev = ge.eigenvalues().cwiseMax(0.0);
        const double tr = ev.sum();
        if (!(tr > 0.0)) continue;
        const CVector u = ge.eigenvectors().col(n - 1);
        CVector top = CVector::Zero(D);
        for (long a = 0; a < n; ++a) top += u(a) * vs[a];
        QpeEntry e;
        e.k = r;
        e.value = out.reg.energy(r, w);
        e.prob = tr;
        e.post_state = canonical_phase(top / top.norm());
        e.bz_index = bz_index(e.value, w);
        e.purity = ev.squaredNorm() / (tr * tr);
        e.garbage = std::move(vs);
        kept_total += tr;
        out.entries.push_back(std::move(e));
    }
    out.success_prob = post_weight;
    out.discarded_prob = std::max(0.0, 1.0 - kept_total);

    nlohmann::json diag{{"method", opt.nu ? "sambe_promise" : "sambe_no_promise"},
                        {"L", L},
                        {"p", kWindowFactor},
                        {"window_dim", D},
                        {"alpha_F", s.alpha_F},
                        {"singular_values", sing},
                        {"pre_qaa_success", pre},
                        {"post_qaa_weight", post_weight},
                        {"qaa_agreement", agreement},
                        {"shift_lost_norm", std::sqrt(lost2)},
                        {"tail_sum", tail_sum(L, h.M(), h.alphaT())}};

    if (opt.decompose) {
        const InitialDecomposition dec = decompose(s, psi, h);
        const CVector ac = V.adjoint() * dec.psi_coherent;
        const CVector acL = V.adjoint() * dec.psi_coherent_L;
        double da2 = 0.0;
        for (long j = 0; j < D; ++j) {
            da2 += std::norm(keep0(j) * sw(j) * ac(j) - sw(j) * acL(j));
            da2 += std::norm(keep1(j) * sw1(j) * ac(j) - sw1(j) * acL(j));
        }
        diag["delta_approx"] = std::sqrt(da2);
        diag["psi_neg_norm"] = dec.neg_norm;
        diag["psi1_norm"] = dec.psi1_norm;
        diag["coeff_l1"] = dec.coeff_l1;
    }

    // garbage weights p_i^n: for each central eigenvalue, the bin weights of its l-shifted copies
    if (!opt.nu) {
        nlohmann::json garbage = nlohmann::json::array();
        for (long n = 0; n < d; ++n) {
            const double en = fold_bz(s.es.values(s.central.idx[n]), w);
            double p0 = 0.0, p1 = 0.0;
            for (int l = wL.lo(); l <= wL.hi(); ++l) {
                long best = -1;
                double bd = INFINITY;
                for (long j = 0; j < D; ++j) {
                    if (bz_index(s.es.values(j), w) != l) continue;
                    const double dist = std::abs(fold_bz(s.es.values(j) - en + l * w, w));
                    if (dist < bd) {
                        bd = dist;
                        best = j;
                    }
                }
                if (best < 0) continue;
                p0 += sw(best) * sw(best);
                p1 += sw1(best) * sw1(best);
            }
            p0 = std::sqrt(p0 / (2.0 * L));
            p1 = std::sqrt(p1 / (2.0 * L));
            garbage.push_back({{"quasienergy", s.es.values(s.central.idx[n])}, {"p0", p0}, {"p1", p1}});
        }
        diag["garbage"] = garbage;
    }
    out.diagnostics = diag;
    for (long j : s.central.idx) {
        out.central_values.push_back(s.es.values(j));
        out.central_states.push_back(V.col(j));
    }
    return out;
}

// --- QSVT -----------------------------------------------------------------------------

double f3(double x) { return -4.0 * x * x * x + 3.0 * x; }

QaaComparison qsvt_amplify(const CMatrix& w, const CMatrix& pi, const CMatrix& p0_cols) {
    const long n = w.rows();
    if (w.cols() != n || pi.rows() != n || pi.cols() != n || p0_cols.rows() != n)
        throw StructuralError("qsvt_amplify: inconsistent dimensions");
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix p0 = p0_cols * p0_cols.adjoint();
    auto rot = [&](const CMatrix& p, double th) {
        return (std::exp(cplx(0.0, th)) * p + std::exp(cplx(0.0, -th)) * (id - p)).eval();
    };
    const CMatrix seq = rot(pi, 0.0) * w * rot(p0, -M_PI / 2) * w.adjoint() * rot(pi, -M_PI / 2) * w;
    QaaComparison q;
    q.matrix_route = pi * seq * p0_cols;
    const CMatrix a = pi * w * p0_cols;
    q.semantic_route = a * (3.0 * CMatrix::Identity(a.cols(), a.cols()) - 4.0 * a.adjoint() * a);
    q.agreement = (q.matrix_route - q.semantic_route).norm();
    return q;
}

double approx_qsvt_error_bound(int q, double eta, int n_max) { return bounds::approx_qsvt(q, eta, n_max); }

namespace {
CMatrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = cplx(nd(rng), nd(rng));
    CMatrix h = 0.5 * (g + g.adjoint());
    return h / operator_norm(h);
}

CMatrix f3_of(const CMatrix& h) { return -4.0 * h * h * h + 3.0 * h; }
}  // namespace

QsvtExperiment qsvt_experiment(int dim, double eta, std::uint64_t seed) {
    if (dim < 1) throw DomainError("qsvt_experiment: dim must be >= 1");
    if (!(eta >= 0.0) || eta > 0.1) throw DomainError("qsvt_experiment: eta must lie in [0, 0.1]");
    std::mt19937_64 rng(seed);
    const CMatrix h = random_hermitian(dim, rng) * (1.0 - eta);
    const CMatrix pert = random_hermitian(dim, rng) * eta;
    const EigenSystem approx = hermitian_eigendecompose(h + pert);
    std::uniform_int_distribution<int> pick(1, dim);
    const int nmax = pick(rng);
    std::normal_distribution<double> nd(0.0, 1.0);
    CVector c(nmax);
    for (int k = 0; k < nmax; ++k) c(k) = cplx(nd(rng), nd(rng));
    c /= c.norm();
    const CMatrix phis = approx.vectors.leftCols(nmax);
    const CVector psi = phis * c;
    const CMatrix ht = phis * approx.values.head(nmax).asDiagonal() * phis.adjoint();
    QsvtExperiment ex;
    ex.n_max = nmax;
    for (int k = 0; k < nmax; ++k)
        ex.eta = std::max(ex.eta, (h * phis.col(k) - approx.values(k) * phis.col(k)).norm());
    ex.measured = (f3_of(h) * psi - f3_of(ht) * psi).norm();
    ex.bound = approx_qsvt_error_bound(3, ex.eta, nmax);
    return ex;
}

// --- cost shapes -----------------------------------------------------------------------

const char* to_string(CostKind k) {
    switch (k) {
        case CostKind::Thm3: return "thm3";
        case CostKind::Thm4: return "thm4";
        case CostKind::StandardExp: return "standard_exp";
        case CostKind::StandardBlock: return "standard_block";
        case CostKind::PrepTimeIndep: return "prep_time_indep";
        case CostKind::PrepPhysical: return "prep_physical";
        case CostKind::PrepSambe: return "prep_sambe";
    }
    return "?";
}

CostKind parse_cost_kind(const std::string& s) {
    for (CostKind k : {CostKind::Thm3, CostKind::Thm4, CostKind::StandardExp, CostKind::StandardBlock,
                       CostKind::PrepTimeIndep, CostKind::PrepPhysical, CostKind::PrepSambe})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown cost formula '" + s + "'");
}

CostReport cost_formulas(const CostParams& p, CostKind kind) {
    auto unit = [](double v, const char* name) {
        if (!(v > 0.0) || !(v <= 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1]");
    };
    unit(p.eps, "eps");
    unit(p.delta, "delta");
    unit(p.nu, "nu");
    unit(p.gamma, "gamma");
    unit(p.Delta, "Delta");
    if (!(p.alphaT > 0.0)) throw DomainError("alphaT must be positive");
    if (p.N < 1) throw DomainError("N must be >= 1");
    const double ld = std::log(1.0 / p.delta);
    CostReport r;
    r.kind = kind;
    switch (kind) {
        case CostKind::Thm3: {
            const double m = std::min(p.eps, p.delta) * p.nu;
            r.queries = (p.alphaT + std::log(1.0 / m)) / m * ld;
            r.ancilla = std::log(p.alphaT / std::min(p.eps, p.delta)) + std::log(std::max(1.0, std::log(1.0 / p.nu)));
            break;
        }
        case CostKind::Thm4: {
            const double en = p.eps * p.nu;
            r.queries = (p.alphaT + p.N + std::log(1.0 / (en * p.delta))) / en * ld;
            r.ancilla = std::log(p.alphaT / p.eps) + std::log(double(p.N)) +
                        std::log(std::max(1.0, std::log(1.0 / (p.nu * p.delta))));
            break;
        }
        case CostKind::StandardExp:
            r.queries = ld / (p.eps * p.nu);
            r.ancilla = std::log(1.0 / p.eps);
            break;
        case CostKind::StandardBlock:
            r.queries = (1.0 / (p.eps * p.nu) + std::log(1.0 / p.nu) / p.nu) * ld;
            r.ancilla = std::log(1.0 / p.eps);
            break;
        case CostKind::PrepTimeIndep:
            r.queries = ld * std::log(1.0 / (p.gamma * p.delta)) / (p.gamma * p.Delta);
            r.state_prep_queries = ld / p.gamma;
            break;
        case CostKind::PrepPhysical:
            r.queries = (p.alphaT + std::log(1.0 / p.Delta)) / (p.gamma * p.Delta) * ld *
                        std::log(1.0 / (p.gamma * p.delta));
            r.state_prep_queries = ld / p.gamma;
            break;
        case CostKind::PrepSambe:
            r.queries = (p.alphaT + p.N + std::log(1.0 / (p.Delta * p.gamma * p.delta))) / (p.gamma * p.Delta) * ld *
                        std::log(1.0 / (p.gamma * p.delta));
            r.state_prep_queries = ld / p.gamma;
            break;
    }
    return r;
}

nlohmann::json to_json(const CostReport& r) {
    return {{"formula", to_string(r.kind)},
            {"queries", r.queries},
            {"state_prep_queries", r.state_prep_queries},
            {"ancilla", r.ancilla},
            {"label", r.label}};
}

}  // namespace floquet
