#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace floquet {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Single global knob: every default tolerance below is multiplied by it.
void set_tolerance_scale(double scale);
double tolerance_scale();

double hermitian_tol();  // 1e-12 relative to max(1, ||A||_F)
double residual_tol();   // 1e-10 relative to ||A||
double unitary_tol();    // 1e-10

// 8192 unless FLOQUET_DIM_CAP is set.
long dim_cap();
void check_dim(long dim, const std::string& where);

struct EigenSystem {
    RVector values;   // ascending
    CMatrix vectors;  // columns
};

double hermiticity_defect(const CMatrix& a);
bool is_hermitian(const CMatrix& a);
void require_hermitian(const CMatrix& a, const std::string& where);

EigenSystem hermitian_eigendecompose(const CMatrix& a);

// exp(-i A t)
CMatrix matrix_exponential_i(const CMatrix& a, double t);
CMatrix matrix_exponential_i(const EigenSystem& es, double t);

RVector singular_values(const CMatrix& a);
double operator_norm(const CMatrix& a);

// ||U^dag U - I||_F (upper bound on the operator-norm defect)
double unitarity_defect(const CMatrix& u);
// nearest unitary in operator norm (polar factor)
CMatrix polar_unitary(const CMatrix& u);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix pauli(char p);
CMatrix pauli_string(const std::string& s);

// Unitary whose first column is v (v normalized on input).
CMatrix householder_completion(const CVector& v);

// Fix global phase: largest-magnitude amplitude real and positive.
CVector canonical_phase(const CVector& v);

}  // namespace floquet
