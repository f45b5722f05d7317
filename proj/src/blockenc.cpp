#include "floquet/blockenc.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Sparse>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Trip = Eigen::Triplet<cplx>;

long product(const std::vector<long>& dims) {
    return std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<long>());
}

// digits of x in the mixed radix given by dims, most significant first
void decompose(long x, const std::vector<long>& dims, std::vector<long>& digits) {
    for (long k = static_cast<long>(dims.size()) - 1; k >= 0; --k) {
        digits[k] = x % dims[k];
        x /= dims[k];
    }
}

long compose(const std::vector<long>& digits, const std::vector<long>& dims) {
    long x = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) x = x * dims[k] + digits[k];
    return x;
}

// op acting on the registers listed in targets (first one most significant), identity elsewhere.
// With ctrl >= 0 the op only fires when register ctrl holds value.
SpMat embed_op(const std::vector<long>& dims, const std::vector<int>& targets, const CMatrix& op, int ctrl = -1,
               long value = 0) {
    long tdim = 1;
    for (int t : targets) tdim *= dims[t];
    if (op.rows() != tdim || op.cols() != tdim) throw StructuralError("embed_op: operator does not match registers");
    const long n = product(dims);
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(n) * 2);
    std::vector<long> digits(dims.size()), out(dims.size());
    for (long x = 0; x < n; ++x) {
        decompose(x, dims, digits);
        if (ctrl >= 0 && digits[ctrl] != value) {
            trips.emplace_back(x, x, cplx(1.0, 0.0));
            continue;
        }
        long col = 0;
        for (int t : targets) col = col * dims[t] + digits[t];
        for (long r = 0; r < tdim; ++r) {
            const cplx v = op(r, col);
            if (v == cplx(0.0, 0.0)) continue;
            out = digits;
            long rr = r;
            for (long k = static_cast<long>(targets.size()) - 1; k >= 0; --k) {
                out[targets[k]] = rr % dims[targets[k]];
                rr /= dims[targets[k]];
            }
            trips.emplace_back(compose(out, dims), x, v);
        }
    }
    SpMat m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

long next_pow2(long k) {
    long p = 1;
    while (p < k) p *= 2;
    return p;
}

// sqrt of a Hermitian PSD matrix, small negative eigenvalues clipped
CMatrix psd_sqrt(const CMatrix& a) {
    EigenSystem es = hermitian_eigendecompose(a);
    RVector s = es.values.cwiseMax(0.0).cwiseSqrt();
    return es.vectors * s.asDiagonal() * es.vectors.adjoint();
}

// pad U (ancilla x target, ancilla leading) to a larger ancilla by direct sum with identity
CMatrix pad_ancilla(const CMatrix& u, long new_ancilla, long target_dim) {
    const long n = new_ancilla * target_dim;
    CMatrix out = CMatrix::Identity(n, n);
    out.topLeftCorner(u.rows(), u.cols()) = u;
    return out;
}

}  // namespace

BlockEncoding build_pauli_encoding(const std::vector<PauliTerm>& terms, double alpha) {
    if (terms.empty()) throw DomainError("build_pauli_encoding: empty term list");
    const std::size_t nq = terms.front().pauli.size();
    for (const auto& t : terms)
        if (t.pauli.size() != nq) throw DimensionError("build_pauli_encoding: Pauli strings of unequal length");
    double one_norm = 0.0;
    for (const auto& t : terms) one_norm += std::abs(t.coeff);
    if (!(alpha > 0.0) || alpha < one_norm * (1.0 - 1e-12))
        throw NormalizationError("build_pauli_encoding: alpha " + std::to_string(alpha) + " below 1-norm " +
                                 std::to_string(one_norm));

    const long d = 1L << nq;
    std::vector<double> weights;
    std::vector<CMatrix> selects;
    for (const auto& t : terms) {
        const double w = std::abs(t.coeff);
        if (w == 0.0) continue;
        weights.push_back(w);
        selects.push_back((t.coeff / w) * pauli_string(t.pauli));
    }
    const double slack = alpha - one_norm;
    if (slack > 1e-12 * alpha || weights.empty()) {
        // +I and -I cancel in the block, they only soak up the excess normalization
        const double s = std::max(slack, 0.0);
        weights.push_back(s / 2);
        selects.push_back(CMatrix::Identity(d, d));
        weights.push_back(s / 2);
        selects.push_back(-CMatrix::Identity(d, d));
    }

    BlockEncoding be;
    be.alpha = alpha;
    be.target_dim = d;
    if (weights.size() == 1) {
        be.ancilla_dim = 1;
        be.unitary = selects.front();
        return be;
    }
    const long k = next_pow2(static_cast<long>(weights.size()));
    CVector prep_col = CVector::Zero(k);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t j = 0; j < weights.size(); ++j) prep_col(j) = std::sqrt(weights[j] / total);
    const CMatrix prep = householder_completion(prep_col);
    CMatrix select = CMatrix::Identity(k * d, k * d);
    for (std::size_t j = 0; j < selects.size(); ++j) select.block(j * d, j * d, d, d) = selects[j];
    const CMatrix id = CMatrix::Identity(d, d);
    be.ancilla_dim = k;
    be.unitary = kron(prep.adjoint(), id) * select * kron(prep, id);
    return be;
}

BlockEncoding build_matrix_encoding(const CMatrix& a, double alpha) {
    if (a.rows() != a.cols()) throw DimensionError("build_matrix_encoding: matrix not square");
    if (!(alpha > 0.0)) throw NormalizationError("build_matrix_encoding: alpha must be positive");
    const double nrm = operator_norm(a);
    if (nrm > alpha * (1.0 + 1e-12))
        throw NormalizationError("build_matrix_encoding: ||A|| " + std::to_string(nrm) + " exceeds alpha " +
                                 std::to_string(alpha));
    const long d = a.rows();
    const CMatrix b = a / alpha;
    const CMatrix id = CMatrix::Identity(d, d);
    BlockEncoding be;
    be.alpha = alpha;
    be.target_dim = d;
    be.ancilla_dim = 2;
    be.unitary.resize(2 * d, 2 * d);
    be.unitary.topLeftCorner(d, d) = b;
    be.unitary.topRightCorner(d, d) = psd_sqrt(id - b * b.adjoint());
    be.unitary.bottomLeftCorner(d, d) = psd_sqrt(id - b.adjoint() * b);
    be.unitary.bottomRightCorner(d, d) = -b.adjoint();
    return be;
}

BlockEncoding build_component_encoding(const FourierHamiltonian& h, int m, double alpha) {
    const auto& pt = h.pauli_terms();
    if (auto it = pt.find(m); it != pt.end() && !it->second.empty()) {
        double one_norm = 0.0;
        for (const auto& t : it->second) one_norm += std::abs(t.coeff);
        if (one_norm <= alpha * (1.0 + 1e-12)) return build_pauli_encoding(it->second, alpha);
    }
    return build_matrix_encoding(h.component(m), alpha);
}

BlockEncoding build_floquet_encoding(const FourierHamiltonian& h, int L, double alpha_tilde) {
    const double aF = alpha_F(h, L);
    if (!(alpha_tilde >= aF * (1.0 - 1e-14)))
        throw NormalizationError("build_floquet_encoding: alpha_tilde " + std::to_string(alpha_tilde) +
                                 " below alpha_F " + std::to_string(aF));
    const int M = h.M();
    const SambeWindow w = make_window(L);
    if (2 * L < 2 * M + 1) throw DimensionError("build_floquet_encoding: pbc window needs 2L >= 2M+1");
    const long d = h.dim();
    const double omega = h.omega();

    // one sub-encoding per m in [-M, M]; absent components get a weightless placeholder
    std::vector<BlockEncoding> subs;
    std::vector<double> am;
    long A = 1;
    for (int m = -M; m <= M; ++m) {
        const double a = h.alpha_of(m);
        am.push_back(a);
        if (a > 0.0) subs.push_back(build_component_encoding(h, m, a));
        else subs.push_back(BlockEncoding{CMatrix::Identity(d, d), 1, d, 1.0, 0});
        A = std::max(A, subs.back().ancilla_dim);
    }
    const double sum_alpha = std::accumulate(am.begin(), am.end(), 0.0);
    const long G = 2 * M + 1;
    const long F = w.fourier_dim();

    // registers without c: g, a, r, f, s
    const std::vector<long> dims{G, A, 2, F, d};
    check_dim(4 * product(dims), "build_floquet_encoding");

    CVector gm_col = CVector::Zero(G);
    if (sum_alpha > 0.0)
        for (long j = 0; j < G; ++j) gm_col(j) = std::sqrt(am[j] / sum_alpha);
    else
        gm_col(0) = 1.0;
    const CMatrix GM = householder_completion(gm_col);

    SpMat o1 = embed_op(dims, {0}, GM);
    for (int m = -M; m <= M; ++m) {
        const long gv = m + M;
        CMatrix add = CMatrix::Zero(F, F);
        for (int l = w.lo(); l <= w.hi(); ++l) add(w.block(wrap_add(l, m, w)), w.block(l)) = 1.0;
        const CMatrix om = pad_ancilla(subs[gv].unitary, A, d);
        o1 = embed_op(dims, {3}, add, 0, gv) * o1;
        o1 = embed_op(dims, {1, 4}, om, 0, gv) * o1;
    }
    o1 = embed_op(dims, {0}, GM.adjoint()) * o1;

    // O2: per Fourier index a reflection with diagonal entry -l/L on the r qubit
    CMatrix rf = CMatrix::Zero(2 * F, 2 * F);
    for (int l = w.lo(); l <= w.hi(); ++l) {
        const double dl = -static_cast<double>(l) / L;
        const double sl = std::sqrt(std::max(0.0, 1.0 - dl * dl));
        const long f = w.block(l);
        rf(f, f) = dl;
        rf(f, F + f) = sl;
        rf(F + f, f) = sl;
        rf(F + f, F + f) = -dl;
    }
    const SpMat o2 = embed_op(dims, {2, 3}, rf);

    // c = 0 -> O1, c = 1 -> O2, c = 2 <-> 3 swapped so the slack amplitude drops out of the block
    const long n = product(dims);
    std::vector<Trip> trips;
    trips.reserve(o1.nonZeros() + o2.nonZeros() + 2 * n);
    for (int k = 0; k < o1.outerSize(); ++k)
        for (SpMat::InnerIterator it(o1, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < o2.outerSize(); ++k)
        for (SpMat::InnerIterator it(o2, k); it; ++it) trips.emplace_back(n + it.row(), n + it.col(), it.value());
    for (long x = 0; x < n; ++x) {
        trips.emplace_back(3 * n + x, 2 * n + x, cplx(1.0, 0.0));
        trips.emplace_back(2 * n + x, 3 * n + x, cplx(1.0, 0.0));
    }
    SpMat middle(4 * n, 4 * n);
    middle.setFromTriplets(trips.begin(), trips.end());

    const double lw = L * omega;
    CVector gc_col = CVector::Zero(4);
    gc_col(0) = std::sqrt(sum_alpha / alpha_tilde);
    gc_col(1) = std::sqrt(lw / alpha_tilde);
    gc_col(2) = std::sqrt(std::max(0.0, (alpha_tilde - sum_alpha - lw) / alpha_tilde));
    const CMatrix GC = householder_completion(gc_col);
    const std::vector<long> full{4, n};
    const SpMat gc = embed_op(full, {0}, GC);
    const SpMat gcd = embed_op(full, {0}, GC.adjoint());

    BlockEncoding be;
    be.unitary = CMatrix(gcd * middle * gc);
    be.ancilla_dim = 4 * G * A * 2;
    be.target_dim = F * d;
    be.alpha = alpha_tilde;
    be.queries = static_cast<int>(G);
    return be;
}

EncodingCheck verify_encoding(const BlockEncoding& be, const CMatrix& target) {
    if (be.unitary.rows() != be.unitary.cols() || be.unitary.rows() != be.ancilla_dim * be.target_dim)
        throw StructuralError("verify_encoding: unitary shape does not match ancilla x target");
    if (target.rows() != be.target_dim || target.cols() != be.target_dim)
        throw StructuralError("verify_encoding: target is " + std::to_string(target.rows()) + "x" +
                              std::to_string(target.cols()) + ", block is " + std::to_string(be.target_dim));
    EncodingCheck c;
    c.error = operator_norm(be.block() * be.alpha - target);
    c.unitarity_defect = unitarity_defect(be.unitary);
    return c;
}

int normalization_bits(double alpha_F, double omega) {
    if (!(alpha_F > 0.0) || !(omega > 0.0)) throw DomainError("normalization_bits: positive inputs required");
    const double v = std::log2(2.0 * alpha_F / omega);
    const double r = std::round(v);
    const int c = std::abs(v - r) < 1e-9 ? static_cast<int>(r) : static_cast<int>(std::ceil(v));
    return 1 + c;
}

}  // namespace floquet
