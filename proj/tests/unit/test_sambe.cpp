#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../support.hpp"
#include "floquet/errors.hpp"
#include "floquet/sambe.hpp"

using namespace floquet;
using namespace testsupport;

TEST_CASE("window indexing") {
    const SambeWindow w = make_window(3);
    CHECK(w.lo() == -2);
    CHECK(w.hi() == 3);
    CHECK(w.fourier_dim() == 6);
    CHECK(w.block(-2) == 0);
    CHECK(w.index_of_block(5) == 3);
    CHECK(wrap_add(3, 1, w) == -2);
    CHECK(wrap_add(-2, -1, w) == 3);
}

TEST_CASE("M = 0 blocks decouple") {
    const double c = 0.3;
    const FourierHamiltonian h = FourierHamiltonian::bounded(1, 1.0, 0, {{0, c * Z()}});
    const SambeOperator obc = build_floquet(h, 2, Boundary::Obc);
    const SambeOperator pbc = build_floquet(h, 2, Boundary::Pbc);
    CHECK((obc.matrix - pbc.matrix).norm() == 0.0);
    CMatrix expect = CMatrix::Zero(8, 8);
    for (int l = -1; l <= 2; ++l) expect.block(2 * (l + 1), 2 * (l + 1), 2, 2) = c * Z() - l * kTwoPi * I2();
    CHECK((obc.matrix - expect).norm() < 1e-14);
}

TEST_CASE("block structure obc / pbc") {
    const FourierHamiltonian h = rabi();
    const int L = 4;
    const SambeOperator obc = build_floquet(h, L, Boundary::Obc);
    const SambeOperator pbc = build_floquet(h, L, Boundary::Pbc);
    const SambeWindow w = make_window(L);
    for (int lp = w.lo(); lp <= w.hi(); ++lp)
        for (int l = w.lo(); l <= w.hi(); ++l) {
            const CMatrix bo = obc.matrix.block(2 * w.block(lp), 2 * w.block(l), 2, 2);
            const CMatrix bp = pbc.matrix.block(2 * w.block(lp), 2 * w.block(l), 2, 2);
            const int m = lp - l;
            if (std::abs(m) > 1) CHECK(bo.norm() == 0.0);
            else {
                CMatrix want = h.component(m);
                if (m == 0) want -= l * kTwoPi * I2();
                CHECK((bo - want).norm() < 1e-14);
            }
            int mw = ((m % 8) + 8) % 8;
            if (mw > 4) mw -= 8;
            if (std::abs(mw) > 1) CHECK(bp.norm() == 0.0);
        }
    CHECK(operator_norm(obc.matrix) <= obc.alpha_F);
    CHECK(operator_norm(pbc.matrix) <= pbc.alpha_F);
    CHECK(pbc.alpha_F == doctest::Approx(3 * 0.15 * kTwoPi + L * kTwoPi));
}

TEST_CASE("cutoff formulas") {
    CHECK(cutoff_for_accuracy(1, 1.0, 1e-3) == 36);
    CHECK(cutoff_for_accuracy(0, 1.0, 1e-3) == 11);
    int prev = 0;
    for (double e = 0.5; e > 1e-12; e /= 3) {
        const int L = cutoff_for_accuracy(1, 0.7, e);
        CHECK(L >= prev);
        prev = L;
    }
    CHECK(cutoff_lieb_robinson(1, 0.0, 2 * std::exp(-5.0)) == 6);
    CHECK(cutoff_lieb_robinson(1, 1.0, 0.01) == 15);
    const int a = cutoff_lieb_robinson(1, 2.0, 1e-6), b = cutoff_lieb_robinson(1, 4.0, 1e-6);
    CHECK(std::abs((b - a) - 3 * std::exp(1.0) * 2.0) <= 1.0);
}

TEST_CASE("folding and zone index") {
    const double w = kTwoPi;
    CHECK(fold_bz(0.75 * w, w) == doctest::Approx(-0.25 * w));
    CHECK(fold_bz(-0.5 * w, w) == doctest::Approx(-0.5 * w));
    CHECK(std::abs(fold_bz(2 * w, w)) < 1e-15);
    CHECK(bz_index(-2.8 * w, w) == 3);
    CHECK(bz_index(0.2 * w, w) == 0);
    CHECK(bz_index(-0.5 * w, w) == 0);
    CHECK(bz_index(0.5 * w, w) == -1);
}

TEST_CASE("shift_add") {
    const SambeWindow w = make_window(5);
    std::mt19937_64 rng(1);
    const CVector phi = random_state(2, rng);
    const CVector s0 = embed(phi, 0, w);
    CHECK((shift_add(s0, 0, w, 2, true).state - s0).norm() == 0.0);
    CHECK((shift_add(s0, 3, w, 2, true).state - embed(phi, 3, w)).norm() == 0.0);
    const CVector back = shift_add(shift_add(s0, 3, w, 2, true).state, -3, w, 2, true).state;
    CHECK((back - s0).norm() == 0.0);
    CHECK_THROWS_AS(shift_add(embed(phi, 5, w), 1, w, 2, true), BoundaryError);
    const ShiftResult lossy = shift_add(embed(phi, 5, w), 1, w, 2, false);
    CHECK(lossy.lost_norm == doctest::Approx(1.0));
    CHECK((fourier_component(embed(phi, 2, w), 2, w, 2) - phi).norm() == 0.0);
}

TEST_CASE("tail bounds") {
    CHECK(tail_bound_exact(2, 1, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(tail_bound_exact(0, 1, 0.0) == doctest::Approx(std::exp(1.0 / 6)).epsilon(1e-12));
    CHECK(tail_sum(20, 1, 1.0) == doctest::Approx(27 * std::exp(-20.0 / 3 + std::sinh(1.0) / kTwoPi)).epsilon(1e-12));
    CHECK(tail_sum(20, 1, 1.0) == doctest::Approx(0.0415).epsilon(0.01));
    CHECK(tail_bound(2, 1, 0.0, tail::Exact{}) == tail_bound_exact(2, 1, 0.0));
}
