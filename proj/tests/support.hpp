#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "floquet/hamiltonian.hpp"

namespace testsupport {

using floquet::CMatrix;
using floquet::cplx;
using floquet::CVector;

inline std::string config(const std::string& name) { return std::string(FLOQUET_CONFIG_DIR) + "/" + name; }

inline CMatrix X() { CMatrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline CMatrix Y() { CMatrix m(2, 2); m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline CMatrix Z() { CMatrix m(2, 2); m << 1, 0, 0, -1; return m; }
inline CMatrix I2() { return CMatrix::Identity(2, 2); }

constexpr double kTwoPi = 2.0 * M_PI;

// H_0 = c w sigma_z, T = 1
inline floquet::FourierHamiltonian sz_model(double c) {
    return floquet::FourierHamiltonian::bounded(1, 1.0, 0, {{0, c * kTwoPi * Z()}});
}

// H_0 = 0.15 w Z, H_{+-1} = 0.125 w X, T = 1
inline floquet::FourierHamiltonian rabi() {
    auto h = floquet::FourierHamiltonian::bounded(1, 1.0, 1, {{0, 0.15 * kTwoPi * Z()}, {1, 0.125 * kTwoPi * X()}});
    h.set_name("rabi");
    return h;
}

// H(t) = (d/2) Z + (g/2)(cos wt X + sin wt Y): H_1 = (g/4)(X + iY)
inline floquet::FourierHamiltonian circular(double d, double g) {
    CMatrix h1 = (g / 4.0) * (X() + cplx(0, 1) * Y());
    auto h = floquet::FourierHamiltonian::bounded(1, 1.0, 1, {{0, (d / 2.0) * Z()}, {1, h1}});
    h.set_name("circular");
    return h;
}

// rotating frame: H_rot = ((d - w)/2) Z + (g/2) X, U(T) = e^{-i w T Z/2} e^{-i H_rot T}
inline std::vector<double> circular_oracle(double d, double g) {
    const double w = kTwoPi;
    CMatrix hr = ((d - w) / 2.0) * Z() + (g / 2.0) * X();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hr);
    std::vector<double> out;
    for (int k = 0; k < 2; ++k) {
        double e = es.eigenvalues()(k) + w / 2.0;
        e = e - w * std::floor(e / w + 0.5);
        out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline CMatrix expm_i(const CMatrix& a, double t) {
    const CMatrix m = cplx(0, -t) * a;
    return m.exp();
}

inline CMatrix random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = cplx(nd(rng), nd(rng));
    return 0.5 * (g + g.adjoint());
}

inline CVector random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v / v.norm();
}

// time-ordered propagator: midpoint products at n and 2n steps, Richardson-combined
inline CMatrix propagator(const floquet::FourierHamiltonian& h, double t, int steps) {
    auto run = [&](int n) {
        CMatrix u = CMatrix::Identity(h.dim(), h.dim());
        const double dt = t / n;
        for (int j = 0; j < n; ++j) u = expm_i(floquet::evaluate_at(h, (j + 0.5) * dt), dt) * u;
        return u;
    };
    const CMatrix a = run(steps), b = run(2 * steps);
    return (4.0 * b - a) / 3.0;
}

inline double fold(double x, double w) { return x - w * std::floor(x / w + 0.5); }

}  // namespace testsupport
