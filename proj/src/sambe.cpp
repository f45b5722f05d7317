#include "floquet/sambe.hpp"

#include <cmath>

#include "floquet/errors.hpp"

namespace floquet {

namespace {
const double kSinhOverTwoPi = std::sinh(1.0) / (2.0 * M_PI);

// ceil, but values within round-off of an integer are taken as that integer
int snapped_ceil(double v) {
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(v))) return static_cast<int>(r);
    return static_cast<int>(std::ceil(v));
}
}

SambeWindow make_window(int L) {
    if (L < 1) throw DomainError("cutoff L must be >= 1");
    return SambeWindow{L};
}

const char* to_string(Boundary b) { return b == Boundary::Obc ? "obc" : "pbc"; }

int wrap_add(int l, int m, const SambeWindow& w) {
    const int n = w.fourier_dim();
    int r = (l + m + w.L - 1) % n;
    if (r < 0) r += n;
    return r - w.L + 1;
}

double alpha_F(const FourierHamiltonian& h, int L) {
    return (2.0 * h.M() + 1.0) * h.alpha() + L * h.omega();
}

SambeOperator build_floquet(const FourierHamiltonian& h, int L, Boundary boundary) {
    const SambeWindow w = make_window(L);
    const int M = h.M();
    if (boundary == Boundary::Pbc && 2 * L < 2 * M + 1)
        throw DimensionError("pbc window needs 2L >= 2M+1 (L = " + std::to_string(L) + ", M = " + std::to_string(M) + ")");
    const long d = h.dim();
    if (static_cast<long>(L) * d > 4096) throw DimensionError("L * 2^N exceeds 4096");
    check_dim(w.fourier_dim() * d, "build_floquet");

    SambeOperator s;
    s.window = w;
    s.system_dim = d;
    s.boundary = boundary;
    s.omega = h.omega();
    s.alpha_F = alpha_F(h, L);
    s.matrix = CMatrix::Zero(w.fourier_dim() * d, w.fourier_dim() * d);
    for (int l = w.lo(); l <= w.hi(); ++l) {
        const long col = w.block(l) * d;
        for (const auto& [m, hm] : h.components()) {
            int target = l + m;
            if (boundary == Boundary::Pbc) target = wrap_add(l, m, w);
            else if (!w.contains(target)) continue;
            s.matrix.block(w.block(target) * d, col, d, d) += hm;
        }
        s.matrix.block(col, col, d, d) -= (l * h.omega()) * CMatrix::Identity(d, d);
    }
    return s;
}

int cutoff_for_accuracy(int M, double alphaT, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    if (!(alphaT >= 0.0)) throw DomainError("alphaT must be >= 0");
    if (M < 0) throw DomainError("M must be >= 0");
    const double k = 2.0 * M + 1.0;
    const double arg = 9.0 * k * k * alphaT;
    const double third = arg > 1.0 ? std::log(arg) : 0.0;
    return snapped_ceil(k * (kSinhOverTwoPi * alphaT + std::log(1.0 / eps) + third)) + 1;
}

int cutoff_lieb_robinson(int M, double alphaT, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    if (!(alphaT >= 0.0)) throw DomainError("alphaT must be >= 0");
    if (M < 0) throw DomainError("M must be >= 0");
    if (M == 0) return 1;
    return snapped_ceil(M * ((2.0 * M + 1.0) * M_E * alphaT + std::log(2.0 / eps))) + 1;
}

int reference_window(const FourierHamiltonian& h, int L) {
    const int reach = h.mode() == DriveMode::Bounded ? h.M() : static_cast<int>(std::ceil(4.0 * h.zeta()));
    return L + 3 * std::max(reach, 1) * static_cast<int>(std::ceil(h.alphaT() + 20.0));
}

double fold_bz(double x, double omega) {
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    double r = x - omega * std::floor(x / omega + 0.5);
    if (r >= 0.5 * omega) r -= omega;
    if (r < -0.5 * omega) r += omega;
    return r;
}

int bz_index(double x, double omega) {
    const double f = fold_bz(x, omega);
    return static_cast<int>(std::lround((f - x) / omega));
}

ShiftResult shift_add(const CVector& state, int l, const SambeWindow& w, long system_dim, bool strict) {
    if (state.size() != w.fourier_dim() * system_dim) throw StructuralError("shift_add: state size mismatch");
    ShiftResult r;
    r.state = CVector::Zero(state.size());
    double lost2 = 0.0;
    for (int k = w.lo(); k <= w.hi(); ++k) {
        auto src = state.segment(w.block(k) * system_dim, system_dim);
        const int dst = k + l;
        if (!w.contains(dst)) {
            lost2 += src.squaredNorm();
            continue;
        }
        r.state.segment(w.block(dst) * system_dim, system_dim) = src;
    }
    r.lost_norm = std::sqrt(lost2);
    if (strict && lost2 > 0.0) throw BoundaryError("shift_add: support leaves the window", r.lost_norm);
    return r;
}

CVector fourier_component(const CVector& state, int l, const SambeWindow& w, long system_dim) {
    if (!w.contains(l)) return CVector::Zero(system_dim);
    return state.segment(w.block(l) * system_dim, system_dim);
}

CVector embed(const CVector& psi, int l, const SambeWindow& w) {
    if (!w.contains(l)) throw BoundaryError("embed: index outside window", psi.norm());
    CVector out = CVector::Zero(w.fourier_dim() * psi.size());
    out.segment(w.block(l) * psi.size(), psi.size()) = psi;
    return out;
}

double tail_bound_exact(int l, int M, double alphaT) {
    return std::exp(-(std::abs(l) - 0.5) / (2.0 * M + 1.0) + kSinhOverTwoPi * alphaT);
}

double tail_bound_truncated(int l, int M, double alphaT, double e) {
    return std::exp(-(std::abs(l) - e) / (2.0 * M + 1.0) + kSinhOverTwoPi * alphaT);
}

double tail_bound_expdecay(int l, double zeta, double alphaT) {
    const double x = 1.0 / (4.0 * zeta);
    const double coth = 1.0 / std::tanh(x);
    return std::exp(-(std::abs(l) - 0.5) * x + coth / (8.0 * M_PI * zeta) * alphaT);
}

double tail_sum(int L, int M, double alphaT) {
    const double k = 2.0 * M + 1.0;
    return 9.0 * k * std::exp(-L / k + kSinhOverTwoPi * alphaT);
}

double tail_bound(int l, int M, double alphaT, const TailVariant& v) {
    struct Visitor {
        int l, M;
        double aT;
        double operator()(tail::Exact) const { return tail_bound_exact(l, M, aT); }
        double operator()(tail::Truncated t) const { return tail_bound_truncated(l, M, aT, t.eps_max_over_omega); }
        double operator()(tail::ExpDecay t) const { return tail_bound_expdecay(l, t.zeta, aT); }
        double operator()(tail::TailSum t) const { return tail_sum(t.L, M, aT); }
    };
    return std::visit(Visitor{l, M, alphaT}, v);
}

}  // namespace floquet
