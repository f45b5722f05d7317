#include "floquet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "floquet/bounds.hpp"
#include "floquet/errors.hpp"

namespace floquet {

const char* to_string(SpectrumSource s) {
    switch (s) {
        case SpectrumSource::SambeObc: return "sambe_obc";
        case SpectrumSource::SambePbc: return "sambe_pbc";
        case SpectrumSource::FloquetOpDiscretized: return "floquet_op_discretized";
        case SpectrumSource::FloquetOpSambe: return "floquet_op_sambe";
    }
    return "?";
}

std::vector<int> QuasiSpectrum::central_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(entries.size()); ++i)
        if (entries[i].central) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return entries[a].folded < entries[b].folded; });
    return idx;
}

std::vector<double> QuasiSpectrum::central_values() const {
    std::vector<double> v;
    for (int i : central_indices()) v.push_back(entries[i].folded);
    return v;
}

CVector FloquetEigenpair::sum_components() const {
    CVector s = CVector::Zero(components.empty() ? 0 : components[0].size());
    for (const auto& c : components) s += c;
    return s;
}

CMatrix floquet_operator(const FourierHamiltonian& h, const FloquetMethod& m, double t) {
    const long d = h.dim();
    if (const auto* disc = std::get_if<method::Discretized>(&m)) {
        if (disc->steps < 1) throw DomainError("L_steps must be >= 1");
        const bool constant =
            std::all_of(h.components().begin(), h.components().end(), [](const auto& kv) { return kv.first == 0; });
        if (constant) return matrix_exponential_i(h.component(0), t);
        const double dt = t / static_cast<double>(disc->steps);
        CMatrix u = CMatrix::Identity(d, d);
        for (long j = 0; j < disc->steps; ++j) {
            const double tj = (static_cast<double>(j) + 0.5) * dt;
            u = matrix_exponential_i(evaluate_at(h, tj), dt) * u;
        }
        return u;
    }
    const auto& sm = std::get<method::Sambe>(m);
    const SambeOperator s = build_floquet(h, sm.L_LR, Boundary::Obc);
    const EigenSystem es = hermitian_eigendecompose(s.matrix);
    const SambeWindow& w = s.window;
    // columns of exp(-i H_F t) belonging to |0>_f
    CVector ph(es.values.size());
    for (long k = 0; k < ph.size(); ++k) ph(k) = std::exp(cplx(0.0, -es.values(k) * t));
    const CMatrix cols = es.vectors * (ph.asDiagonal() * es.vectors.middleRows(w.block(0) * d, d).adjoint());
    CMatrix u = CMatrix::Zero(d, d);
    for (int l = w.lo(); l <= w.hi(); ++l)
        u += std::exp(cplx(0.0, -l * h.omega() * t)) * cols.middleRows(w.block(l) * d, d);
    return u;
}

CMatrix floquet_operator(const FourierHamiltonian& h, const FloquetMethod& m) {
    return floquet_operator(h, m, h.period());
}

CMatrix floquet_operator_lr(const FourierHamiltonian& h, double t, double eps) {
    const double alpha_t = h.alpha() * std::abs(t);
    const int L = std::max(cutoff_lieb_robinson(h.M(), alpha_t, eps), (h.M() + 1) / 2 + 1);
    return floquet_operator(h, method::Sambe{L}, t);
}

QuasiSpectrum quasienergies_from_unitary(const CMatrix& u, double omega, double period, SpectrumSource src) {
    if (u.rows() != u.cols()) throw ContractError("quasienergies_from_unitary: not square");
    const double defect = unitarity_defect(u);
    if (defect > 1e-8 * tolerance_scale())
        throw ContractError("quasienergies_from_unitary: input not unitary (defect " + std::to_string(defect) + ")");
    Eigen::ComplexSchur<CMatrix> schur(u);
    if (schur.info() != Eigen::Success) throw NumericError("quasienergies_from_unitary: Schur failed", 30 * u.rows());
    const CMatrix& tri = schur.matrixT();
    const CMatrix& z = schur.matrixU();
    QuasiSpectrum qs;
    qs.source = src;
    qs.omega = omega;
    qs.L = 0;
    qs.system_dim = u.rows();
    for (long k = 0; k < u.rows(); ++k) {
        SpectrumEntry e;
        const cplx mu = tri(k, k);
        e.value = fold_bz(-std::arg(mu) / period, omega);
        e.folded = e.value;
        e.bz_index = 0;
        e.central = true;
        e.vector = z.col(k);
        e.residual = (u * e.vector - mu * e.vector).norm();
        qs.entries.push_back(std::move(e));
    }
    std::stable_sort(qs.entries.begin(), qs.entries.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.folded < b.folded; });
    return qs;
}

QuasiSpectrum diagonalize_sambe(const SambeOperator& s) {
    const EigenSystem es = hermitian_eigendecompose(s.matrix);
    QuasiSpectrum qs;
    qs.source = s.boundary == Boundary::Obc ? SpectrumSource::SambeObc : SpectrumSource::SambePbc;
    qs.omega = s.omega;
    qs.L = s.window.L;
    qs.system_dim = s.system_dim;
    const CMatrix res = s.matrix * es.vectors - es.vectors * es.values.asDiagonal();
    for (long k = 0; k < es.values.size(); ++k) {
        SpectrumEntry e;
        e.value = es.values(k);
        e.vector = es.vectors.col(k);
        e.folded = fold_bz(e.value, s.omega);
        e.bz_index = bz_index(e.value, s.omega);
        e.central = e.bz_index == 0;
        e.residual = res.col(k).norm();
        qs.entries.push_back(std::move(e));
    }
    return qs;
}

FloquetEigenpair extract_eigenpair(const SpectrumEntry& entry, const SambeWindow& w, long d) {
    if (entry.vector.size() != w.fourier_dim() * d) throw StructuralError("extract_eigenpair: size mismatch");
    FloquetEigenpair p;
    p.quasienergy = entry.value;
    p.L = w.L;
    for (int l = w.lo(); l <= w.hi(); ++l) p.components.push_back(entry.vector.segment(w.block(l) * d, d));
    return p;
}

CVector reconstruct_physical(const FloquetEigenpair& pair, const CMatrix& u_t, double t) {
    return std::exp(cplx(0.0, pair.quasienergy * t)) * (u_t * pair.sum_components());
}

CVector reconstruct_physical(const FloquetEigenpair& pair, const FourierHamiltonian& h, double t) {
    if (t == 0.0) return pair.sum_components();
    return reconstruct_physical(pair, floquet_operator_lr(h, t, 1e-12), t);
}

Matching match_mod_omega(const std::vector<double>& a_in, const std::vector<double>& b_in, double omega) {
    if (a_in.size() != b_in.size())
        throw StructuralError("match_mod_omega: count mismatch (" + std::to_string(a_in.size()) + " vs " +
                              std::to_string(b_in.size()) + ")");
    const int n = static_cast<int>(a_in.size());
    std::vector<int> ia(n), ib(n);
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    auto by_folded = [&](const std::vector<double>& v) {
        return [&v, omega](int x, int y) { return fold_bz(v[x], omega) < fold_bz(v[y], omega); };
    };
    std::stable_sort(ia.begin(), ia.end(), by_folded(a_in));
    std::stable_sort(ib.begin(), ib.end(), by_folded(b_in));
    struct Cand {
        double d;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cands.push_back({std::abs(fold_bz(a_in[ia[i]] - b_in[ib[j]], omega)) / omega, i, j});
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.d != y.d) return x.d < y.d;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<bool> ua(n, false), ub(n, false);
    Matching m;
    for (const auto& c : cands) {
        if (ua[c.i] || ub[c.j]) continue;
        ua[c.i] = ub[c.j] = true;
        m.pairs.push_back({ia[c.i], ib[c.j], c.d});
        m.total += c.d;
        m.max = std::max(m.max, c.d);
    }
    std::sort(m.pairs.begin(), m.pairs.end(), [](const MatchPair& x, const MatchPair& y) { return x.a < y.a; });
    return m;
}

Matching match_mod_omega(const QuasiSpectrum& a, const QuasiSpectrum& b) {
    return match_mod_omega(a.central_values(), b.central_values(), a.omega);
}

double projector_distance(const CMatrix& a, const CMatrix& b) {
    return operator_norm(a * a.adjoint() - b * b.adjoint());
}

Oracle make_oracle(const FourierHamiltonian& h, long steps) {
    Oracle o;
    o.steps = steps;
    o.u_T = floquet_operator(h, method::Discretized{steps});
    o.spectrum = quasienergies_from_unitary(o.u_T, h.omega(), h.period(), SpectrumSource::FloquetOpDiscretized);
    return o;
}

BoundTargets BoundTargets::all() {
    BoundTargets t;
    t.thm2 = t.trunc = t.prop1 = t.prop2 = t.propB1 = t.propB2 = t.propB3 = t.propC1 = t.propD1 = t.thmE1 = true;
    return t;
}

BoundTargets BoundTargets::parse(const std::string& csv) {
    BoundTargets t;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "all") return all();
        if (item == "thm2") t.thm2 = true;
        else if (item == "trunc" || item == "propA1") t.trunc = true;
        else if (item == "prop1") t.prop1 = true;
        else if (item == "prop2") t.prop2 = true;
        else if (item == "propB1") t.propB1 = true;
        else if (item == "propB2") t.propB2 = true;
        else if (item == "propB3") t.propB3 = true;
        else if (item == "propC1") t.propC1 = true;
        else if (item == "propD1") t.propD1 = true;
        else if (item == "thmE1") t.thmE1 = true;
        else throw ConfigError("unknown check '" + item + "'");
    }
    return t;
}

namespace {

// keeps the item with the largest measured/bound ratio
class Worst {
public:
    Worst(std::string model, std::string check, int L) : model_(std::move(model)), check_(std::move(check)), L_(L) {}

    void add(const std::string& where, double measured, double bound) {
        const bool ok = measured <= bound + kNumericFloor;
        const double ratio = std::isinf(bound) ? 0.0 : measured / (bound + kNumericFloor);
        ++count_;
        if (!ok) ++violations_;
        if (!have_ || ratio > ratio_) {
            have_ = true;
            ratio_ = ratio;
            where_ = where;
            measured_ = measured;
            bound_ = bound;
        }
    }

    void emit(std::vector<CheckRow>& out) const {
        if (!have_) return;
        out.push_back({model_, check_ + "@" + where_, L_, measured_, bound_, violations_ == 0});
    }

private:
    std::string model_, check_, where_;
    int L_;
    bool have_ = false;
    double ratio_ = 0.0, measured_ = 0.0, bound_ = 0.0;
    long count_ = 0, violations_ = 0;
};

std::string loc(std::initializer_list<std::pair<const char*, long>> kv) {
    std::string s;
    for (const auto& [k, v] : kv) {
        if (!s.empty()) s += ";";
        s += std::string(k) + "=" + std::to_string(v);
    }
    return s;
}

double f3(double x) { return -4.0 * x * x * x + 3.0 * x; }

}  // namespace

std::vector<CheckRow> verify_bounds(const FourierHamiltonian& h, int L, const BoundTargets& tg, const Oracle* oracle) {
    std::vector<CheckRow> rows;
    const std::string& id = h.name();
    const int M = h.M();
    const double aT = h.alphaT();
    const double w = h.omega();
    const long d = h.dim();

    if ((tg.prop1 || tg.prop2 || tg.propB1) && oracle == nullptr)
        throw ConfigError("prop1/prop2/propB1 need the discretized oracle");

    const SambeOperator obc = build_floquet(h, L, Boundary::Obc);
    const QuasiSpectrum spec = diagonalize_sambe(obc);

    const bool need_ref = tg.thm2 || tg.propC1 || tg.thmE1;
    const int Lbig = reference_window(h, L);
    QuasiSpectrum ref;
    SambeWindow wbig = make_window(Lbig);
    if (need_ref) ref = diagonalize_sambe(build_floquet(h, Lbig, Boundary::Obc));

    if (tg.thm2) {
        Worst worst(id, "thm2", L);
        int n = 0;
        for (int i : ref.central_indices()) {
            for (int l = wbig.lo(); l <= wbig.hi(); ++l)
                worst.add(loc({{"n", n}, {"l", l}}), fourier_component(ref.entries[i].vector, l, wbig, d).norm(),
                          tail_bound_exact(l, M, aT));
            ++n;
        }
        worst.emit(rows);
    }

    if (tg.thmE1) {
        double zeta = h.zeta();
        double alpha_eff = h.alpha();
        if (h.mode() == DriveMode::Bounded) {
            // a bounded drive is a decaying one with zeta = 1 and alpha = max_m alpha_m e^{|m|}
            zeta = 1.0;
            alpha_eff = 0.0;
            for (const auto& [m, a] : h.alpha_m()) alpha_eff = std::max(alpha_eff, a * std::exp(std::abs(m)));
        }
        const double aT_eff = alpha_eff * h.period();
        Worst worst(id, "thmE1", L);
        int n = 0;
        for (int i : ref.central_indices()) {
            for (int l = wbig.lo(); l <= wbig.hi(); ++l)
                worst.add(loc({{"n", n}, {"l", l}}), fourier_component(ref.entries[i].vector, l, wbig, d).norm(),
                          tail_bound_expdecay(l, zeta, aT_eff));
            ++n;
        }
        worst.emit(rows);
    }

    if (tg.trunc) {
        Worst worst(id, "trunc", L);
        for (int k = 0; k < static_cast<int>(spec.entries.size()); ++k) {
            const auto& e = spec.entries[k];
            for (int l = obc.window.lo(); l <= obc.window.hi(); ++l)
                worst.add(loc({{"k", k}, {"l", l}}), fourier_component(e.vector, l, obc.window, d).norm(),
                          tail_bound_truncated(l, M, aT, std::abs(e.value) / w));
        }
        worst.emit(rows);
    }

    if (tg.prop1) {
        Worst worst(id, "prop1", L);
        const double b = bounds::prop1(L, M, aT);
        const auto& ov = oracle->spectrum.entries;
        for (int n = 0; n < static_cast<int>(ov.size()); ++n) {
            double best = INFINITY;
            for (const auto& e : spec.entries) best = std::min(best, std::abs(e.value - ov[n].value) / w);
            worst.add(loc({{"oracle_n", n}}), best, b);
        }
        for (int k : spec.central_indices()) {
            double best = INFINITY;
            for (const auto& o : ov) best = std::min(best, std::abs(fold_bz(spec.entries[k].value - o.value, w)) / w);
            worst.add(loc({{"k", k}}), best, b);
        }
        worst.emit(rows);
    }

    if (tg.prop2) {
        Worst worst(id, "prop2", L);
        const auto& ov = oracle->spectrum.entries;
        for (int k = 0; k < static_cast<int>(spec.entries.size()); ++k) {
            const double ev = spec.entries[k].value;
            double best = INFINITY;
            for (const auto& o : ov) best = std::min(best, std::abs(fold_bz(ev - o.value, w)) / w);
            worst.add(loc({{"k", k}}), best, bounds::prop2(L, M, aT, ev / w));
        }
        worst.emit(rows);
    }

    if (tg.propB1 || tg.propB3) {
        Worst wb1(id, "propB1", L), wb3(id, "propB3", L);
        for (int k = 0; k < static_cast<int>(spec.entries.size()); ++k) {
            const auto& e = spec.entries[k];
            const FloquetEigenpair p = extract_eigenpair(e, obc.window, d);
            const CVector phi0 = p.sum_components();
            const double nrm = phi0.norm();
            const double eo = e.value / w;
            if (tg.propB3) wb3.add(loc({{"k", k}}), std::abs(nrm - 1.0), bounds::propB3(L, M, aT, eo));
            if (tg.propB1) {
                const CVector r = oracle->u_T * phi0 - std::exp(cplx(0.0, -e.value * h.period())) * phi0;
                const double measured = nrm > 0.0 ? r.norm() / nrm : INFINITY;
                wb1.add(loc({{"k", k}}), measured, bounds::propB1(L, M, aT, eo));
            }
        }
        if (tg.propB1) wb1.emit(rows);
        if (tg.propB3) wb3.emit(rows);
    }

    if (tg.propB2) {
        // reference must contain the whole [2L] range
        const int reach = h.mode() == DriveMode::Bounded ? std::max(M, 1) : static_cast<int>(std::ceil(4.0 * h.zeta()));
        const int Lr = 2 * L + 3 * reach * static_cast<int>(std::ceil(aT + 20.0));
        const SambeWindow wr = make_window(Lr);
        const CMatrix ubig = matrix_exponential_i(build_floquet(h, Lr, Boundary::Obc).matrix, h.period());
        const CMatrix usmall = matrix_exponential_i(obc.matrix, h.period());
        Worst worst(id, "propB2", L);
        const SambeWindow w2 = make_window(2 * L);
        for (int lp = obc.window.lo(); lp <= obc.window.hi(); ++lp) {
            for (int l = w2.lo(); l <= w2.hi(); ++l) {
                CMatrix diff = ubig.block(wr.block(l) * d, wr.block(lp) * d, d, d);
                if (obc.window.contains(l)) diff -= usmall.block(obc.window.block(l) * d, obc.window.block(lp) * d, d, d);
                worst.add(loc({{"l", l}, {"lp", lp}}), operator_norm(diff),
                          bounds::propB2(l, lp, L, M, h.alpha() * h.period()));
            }
        }
        worst.emit(rows);
    }

    if (tg.propC1) {
        const SambeOperator pbc = build_floquet(h, L, Boundary::Pbc);
        Worst worst(id, "propC1", L);
        const double scale = h.alpha() > 0.0 ? h.alpha() : 1.0;
        int n = 0;
        for (int i : ref.central_indices()) {
            const auto& e = ref.entries[i];
            for (int l = obc.window.lo(); l <= obc.window.hi(); ++l) {
                const CVector shifted = shift_add(e.vector, l, wbig, d, false).state;
                CVector v(obc.dim());
                for (int k = obc.window.lo(); k <= obc.window.hi(); ++k)
                    v.segment(obc.window.block(k) * d, d) = fourier_component(shifted, k, wbig, d);
                const CVector r = pbc.matrix * v - (e.value - l * w) * v;
                worst.add(loc({{"n", n}, {"l", l}}), r.norm() / scale, bounds::propC1(L, l, M, aT));
            }
            ++n;
        }
        worst.emit(rows);
    }

    if (tg.propD1) {
        const SambeOperator pbc = build_floquet(h, L, Boundary::Pbc);
        const double aF = pbc.alpha_F;
        const CMatrix H = pbc.matrix / aF;
        const std::vector<int> cen = spec.central_indices();
        const int nmax = static_cast<int>(cen.size());
        if (nmax > 0) {
            double eta = 0.0;
            CVector psi = CVector::Zero(obc.dim());
            CVector ftilde = CVector::Zero(obc.dim());
            const double c = 1.0 / std::sqrt(double(nmax));
            for (int i : cen) {
                const auto& e = spec.entries[i];
                const double E = e.value / aF;
                eta = std::max(eta, (H * e.vector - E * e.vector).norm());
                psi += c * e.vector;
                ftilde += c * f3(E) * e.vector;
            }
            const CVector hp = H * psi;
            const CVector f3H = -4.0 * (H * (H * hp)) + 3.0 * hp;
            const double measured = (f3H - ftilde).norm();
            Worst worst(id, "propD1", L);
            worst.add(loc({{"q", 3}, {"n_max", nmax}}), measured, bounds::approx_qsvt(3, eta, nmax));
            worst.emit(rows);
        }
    }

    return rows;
}

}  // namespace floquet
