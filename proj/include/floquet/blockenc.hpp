#pragma once

#include <vector>

#include "floquet/sambe.hpp"

namespace floquet {

// Unitary on ancilla (x) target, ancilla index leading; the block <0|_a U |0>_a is the
// top-left target_dim x target_dim corner and equals A / alpha.
struct BlockEncoding {
    CMatrix unitary;
    long ancilla_dim = 1;
    long target_dim = 0;
    double alpha = 1.0;
    int queries = 0;  // sub-encodings consumed (composite encodings only)

    CMatrix block() const { return unitary.topLeftCorner(target_dim, target_dim); }
};

BlockEncoding build_pauli_encoding(const std::vector<PauliTerm>& terms, double alpha);
// one-qubit unitary dilation of A / alpha, any A with ||A|| <= alpha
BlockEncoding build_matrix_encoding(const CMatrix& a, double alpha);
// Pauli LCU when its 1-norm fits in alpha, dilation otherwise
BlockEncoding build_component_encoding(const FourierHamiltonian& h, int m, double alpha);

BlockEncoding build_floquet_encoding(const FourierHamiltonian& h, int L, double alpha_tilde);

struct EncodingCheck {
    double error = 0.0;              // ||<0|U|0> alpha - A||
    double unitarity_defect = 0.0;   // ||U^dag U - I||_F
};
EncodingCheck verify_encoding(const BlockEncoding& be, const CMatrix& target);

// 1 + ceil(log2(2 alpha_F / w))
int normalization_bits(double alpha_F, double omega);

}  // namespace floquet
