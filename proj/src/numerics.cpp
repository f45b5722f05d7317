#include "floquet/numerics.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "floquet/errors.hpp"

namespace floquet {

namespace {
std::atomic<double> g_tol_scale{1.0};
}

void set_tolerance_scale(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("tolerance scale must be positive");
    g_tol_scale.store(scale);
}

double tolerance_scale() { return g_tol_scale.load(); }

double hermitian_tol() { return 1e-12 * tolerance_scale(); }
double residual_tol() { return 1e-10 * tolerance_scale(); }
double unitary_tol() { return 1e-10 * tolerance_scale(); }

long dim_cap() {
    if (const char* env = std::getenv("FLOQUET_DIM_CAP")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 8192;
}

void check_dim(long dim, const std::string& where) {
    if (dim > dim_cap())
        throw DimensionError(where + ": dimension " + std::to_string(dim) + " exceeds cap " +
                             std::to_string(dim_cap()));
}

double hermiticity_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a) {
    if (a.rows() != a.cols()) return false;
    if (a.size() == 0) return true;
    return hermiticity_defect(a) <= hermitian_tol() * std::max(1.0, a.norm());
}

void require_hermitian(const CMatrix& a, const std::string& where) {
    if (!a.allFinite()) throw ContractError(where + ": non-finite entries");
    if (!is_hermitian(a))
        throw ContractError(where + ": matrix is not Hermitian (defect " +
                            std::to_string(hermiticity_defect(a)) + ")");
}

EigenSystem hermitian_eigendecompose(const CMatrix& a) {
    require_hermitian(a, "hermitian_eigendecompose");
    check_dim(a.rows(), "hermitian_eigendecompose");
    const long n = a.rows();
    if (n == 0) return {};
    // symmetrize so round-off in the upper triangle is not silently dropped
    CMatrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericError("hermitian_eigendecompose: no convergence", 30 * n);
    EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
    const double scale = es.values.cwiseAbs().maxCoeff();
    const double res = (h * es.vectors - es.vectors * es.values.asDiagonal()).norm();
    if (res > residual_tol() * std::max(scale, 1e-300) * std::sqrt(double(n)) && res > 1e-300)
        throw NumericError("hermitian_eigendecompose: residual " + std::to_string(res) + " above tolerance",
                           30 * n);
    return es;
}

CMatrix matrix_exponential_i(const EigenSystem& es, double t) {
    CVector ph(es.values.size());
    for (long k = 0; k < ph.size(); ++k) ph(k) = std::exp(cplx(0.0, -es.values(k) * t));
    return es.vectors * ph.asDiagonal() * es.vectors.adjoint();
}

CMatrix matrix_exponential_i(const CMatrix& a, double t) {
    return matrix_exponential_i(hermitian_eigendecompose(a), t);
}

RVector singular_values(const CMatrix& a) {
    check_dim(std::max(a.rows(), a.cols()), "singular_values");
    if (a.size() == 0) return RVector();
    Eigen::BDCSVD<CMatrix> svd(a);
    if (svd.info() != Eigen::Success) throw NumericError("singular_values: no convergence", 30 * a.cols());
    return svd.singularValues();  // Eigen returns them descending
}

double operator_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a)(0);
}

double unitarity_defect(const CMatrix& u) {
    if (u.rows() != u.cols()) return INFINITY;
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

CMatrix polar_unitary(const CMatrix& u) {
    Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix pauli(char p) {
    CMatrix m = CMatrix::Zero(2, 2);
    switch (p) {
        case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
        case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
        case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
        case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
        default: throw DomainError(std::string("unknown Pauli letter '") + p + "'");
    }
    return m;
}

CMatrix pauli_string(const std::string& s) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (char c : s) out = kron(out, pauli(c));
    return out;
}

CMatrix householder_completion(const CVector& v_in) {
    const double nv = v_in.norm();
    if (!(nv > 0.0)) throw DomainError("householder_completion: zero vector");
    CVector v = v_in / nv;
    const long n = v.size();
    const double a0 = std::abs(v(0));
    const cplx phase = a0 > 0.0 ? v(0) / a0 : cplx(1.0, 0.0);
    CVector w = phase * CVector::Unit(n, 0) - v;
    const double nw = w.squaredNorm();
    if (nw < 1e-30) return phase * CMatrix::Identity(n, n);
    // reflection maps phase*e0 onto v
    CMatrix r = CMatrix::Identity(n, n) - (2.0 / nw) * (w * w.adjoint());
    return phase * r;
}

CVector canonical_phase(const CVector& v) {
    if (v.size() == 0) return v;
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    const double a = std::abs(v(k));
    if (a == 0.0) return v;
    return v * (std::conj(v(k)) / a);
}

}  // namespace floquet
