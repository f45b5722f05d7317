#include "floquet/bounds.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "floquet/errors.hpp"

namespace floquet::bounds {

namespace {
const double kS = std::sinh(1.0) / (2.0 * M_PI);
double k_of(int M) { return 2.0 * M + 1.0; }
}  // namespace

double prop1(int L, int M, double aT, int l) {
    const double k = k_of(M);
    return 8.0 * k * k * aT * std::exp(-(L - std::abs(l)) / k + kS * aT);
}

double prop2(int L, int M, double aT, double e) {
    const double k = k_of(M);
    return 9.0 * k * k * aT * std::exp(-(L - std::abs(e)) / k + kS * aT);
}

int lr_distance(int l, int lp, int L) {
    const bool inside = l >= -L + 1 && l <= L;
    return inside ? 2 * L - std::abs(l) - std::abs(lp) : std::abs(l) - std::abs(lp);
}

double propB2(int l, int lp, int L, int M, double alpha_t) {
    if (M == 0) return 0.0;  // no hopping: truncation is exact
    const double d = lr_distance(l, lp, L);
    return 2.0 * std::exp((2.0 * M + 1.0) * M_E * alpha_t - d / M);
}

double propB3(int L, int M, double aT, double e) {
    const double k = k_of(M);
    return 6.0 * k * k * aT * std::log(2.0 * M_E * L) * std::exp(-(L - std::abs(e)) / k + kS * aT);
}

double propB1(int L, int M, double aT, double e) {
    const double k = k_of(M);
    const double en = propB3(L, M, aT, e);
    if (en >= 1.0) return std::numeric_limits<double>::infinity();
    return 32.0 * k * k * std::exp(-(L - std::abs(e)) / k + 2.0 * (M + 1.0) * M_E * aT) / (1.0 - en);
}

double propC1(int L, int l, int M, double aT) {
    const double k = k_of(M);
    return 54.0 * k * k * std::exp(-(L - std::abs(l)) / k + kS * aT);
}

double psi1_deviation(int L, int M, double aT) {
    const double k = k_of(M);
    return 27.0 * k * std::exp(-L / k + kS * aT);
}

double psi_neg(int L, int M, double aT) {
    const double k = k_of(M);
    return 45.0 * k * k * (std::sqrt(2.0 * L) + 1.0) * std::exp(-L / k + kS * aT);
}

double approx_qsvt(int q, double eta, int n_max) {
    if (q < 1 || eta < 0.0 || n_max < 1) throw DomainError("approx_qsvt: need q >= 1, eta >= 0, n_max >= 1");
    return double(q) * q * eta * std::sqrt(double(n_max));
}

}  // namespace floquet::bounds
