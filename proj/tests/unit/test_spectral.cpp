#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../support.hpp"
#include "floquet/bounds.hpp"
#include "floquet/errors.hpp"
#include "floquet/spectral.hpp"

using namespace floquet;
using namespace testsupport;

TEST_CASE("floquet operator trivial cases") {
    const FourierHamiltonian zero = FourierHamiltonian::bounded(1, 1.0, 0, {{0, CMatrix::Zero(2, 2)}});
    CHECK((floquet_operator(zero, method::Discretized{100}) - I2()).norm() < 1e-15);
    CHECK((floquet_operator(zero, method::Sambe{3}) - I2()).norm() < 1e-15);
    const FourierHamiltonian sz = sz_model(0.2);
    for (long steps : {1L, 7L, 1000L})
        CHECK((floquet_operator(sz, method::Discretized{steps}) - expm_i(sz.component(0), 1.0)).norm() < 1e-13);
}

TEST_CASE("rabi propagator: discretized vs sambe vs independent oracle") {
    const FourierHamiltonian h = rabi();
    const CMatrix ud = floquet_operator(h, method::Discretized{100000});
    const CMatrix us = floquet_operator(h, method::Sambe{cutoff_lieb_robinson(h.M(), h.alphaT(), 1e-8)});
    CHECK(operator_norm(ud - us) < 1e-6);
    const CMatrix ref = propagator(h, 1.0, 4000);
    CHECK(operator_norm(ud - ref) < 1e-8);
    const CMatrix half = floquet_operator(h, method::Discretized{100000}, 0.37);
    CHECK(operator_norm(half - propagator(h, 0.37, 4000)) < 1e-8);
}

TEST_CASE("quasienergies from unitary") {
    const QuasiSpectrum id = quasienergies_from_unitary(I2(), kTwoPi, 1.0);
    for (const auto& e : id.entries) CHECK(std::abs(e.value) < 1e-15);
    const QuasiSpectrum q = quasienergies_from_unitary(expm_i(0.25 * kTwoPi * Z(), 1.0), kTwoPi, 1.0);
    REQUIRE(q.entries.size() == 2);
    CHECK(q.entries[0].value == doctest::Approx(-0.25 * kTwoPi));
    CHECK(q.entries[1].value == doctest::Approx(0.25 * kTwoPi));
}

TEST_CASE("circular drive matches rotating-frame oracle") {
    const double d = 0.2 * kTwoPi, g = 0.2 * kTwoPi;
    const FourierHamiltonian h = circular(d, g);
    const std::vector<double> want = circular_oracle(d, g);
    const QuasiSpectrum q = quasienergies_from_unitary(floquet_operator(h, method::Discretized{100000}), kTwoPi, 1.0);
    const Matching m = match_mod_omega(q.central_values(), want, kTwoPi);
    CHECK(m.max < 1e-8);
    const QuasiSpectrum s = diagonalize_sambe(build_floquet(h, 20, Boundary::Obc));
    CHECK(match_mod_omega(s.central_values(), want, kTwoPi).max < 1e-8);
}

TEST_CASE("M = 0 sambe spectrum") {
    const FourierHamiltonian h = sz_model(0.25);
    const QuasiSpectrum s = diagonalize_sambe(build_floquet(h, 4, Boundary::Obc));
    CHECK(s.entries.size() == 16);
    const auto c = s.central_values();
    REQUIRE(c.size() == 2);
    CHECK(c[0] == doctest::Approx(-0.25 * kTwoPi));
    CHECK(c[1] == doctest::Approx(0.25 * kTwoPi));
    for (const auto& e : s.entries) {
        const double x = e.value / kTwoPi;
        const double r = x - std::round(x - 0.25) ;
        CHECK((std::abs(r - 0.25) < 1e-12 || std::abs(r + 0.75) < 1e-12 || std::abs(r - 1.25) < 1e-12 ||
               std::abs(std::abs(fold(e.value, kTwoPi)) - 0.25 * kTwoPi) < 1e-12));
    }
    const SambeWindow w = make_window(4);
    for (int i : s.central_indices()) {
        const FloquetEigenpair p = extract_eigenpair(s.entries[i], w, 2);
        for (int l = w.lo(); l <= w.hi(); ++l) CHECK((l == 0) == (p.component(l).norm() > 0.5));
        CHECK(std::abs(reconstruct_physical(p, h, 0.77).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("rabi sambe vs oracle and obc vs pbc") {
    const FourierHamiltonian h = rabi();
    const Oracle orc = make_oracle(h, 100000);
    const int L = cutoff_for_accuracy(h.M(), h.alphaT(), 1e-8);
    const QuasiSpectrum s = diagonalize_sambe(build_floquet(h, L, Boundary::Obc));
    CHECK(match_mod_omega(s, orc.spectrum).max < 1e-7);
    for (const auto& e : s.entries) CHECK(std::abs(e.value) <= build_floquet(h, L, Boundary::Obc).alpha_F);

    const QuasiSpectrum o8 = diagonalize_sambe(build_floquet(h, 8, Boundary::Obc));
    const QuasiSpectrum p8 = diagonalize_sambe(build_floquet(h, 8, Boundary::Pbc));
    CHECK(match_mod_omega(o8.central_values(), p8.central_values(), kTwoPi).max < 1e-8);

    const SambeWindow w = make_window(12);
    const QuasiSpectrum s12 = diagonalize_sambe(build_floquet(h, 12, Boundary::Obc));
    double emax = 0;
    for (int i : s12.central_indices()) emax = std::max(emax, std::abs(s12.entries[i].value) / kTwoPi);
    for (int i : s12.central_indices()) {
        const FloquetEigenpair p = extract_eigenpair(s12.entries[i], w, 2);
        double tot = 0;
        for (int l = w.lo(); l <= w.hi(); ++l) {
            tot += p.component(l).squaredNorm();
            CHECK(p.component(l).norm() <= tail_bound_truncated(l, 1, h.alphaT(), emax) + kNumericFloor);
        }
        CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((reconstruct_physical(p, h, 0.0) - p.sum_components()).norm() == 0.0);
    }
}

TEST_CASE("match mod omega") {
    CHECK(match_mod_omega(std::vector<double>{0.1, 0.3}, std::vector<double>{0.3, 0.1}, 1.0).max == 0.0);
    CHECK(match_mod_omega(std::vector<double>{0.4}, std::vector<double>{-0.6}, 1.0).max < 1e-15);
}

TEST_CASE("verify_bounds") {
    const FourierHamiltonian sz = sz_model(0.25);
    const Oracle o0 = make_oracle(sz, 1000);
    for (const auto& r : verify_bounds(sz, 4, BoundTargets::all(), &o0)) {
        CHECK_MESSAGE(r.pass, r.check_id);
        if (r.check_id.rfind("prop1", 0) == 0 || r.check_id.rfind("propB1", 0) == 0) CHECK(r.measured <= 1e-10);
    }
    const FourierHamiltonian h = rabi();
    const Oracle orc = make_oracle(h, 100000);
    const auto rows = verify_bounds(h, 12, BoundTargets::parse("prop1,propB2"), &orc);
    REQUIRE(!rows.empty());
    for (const auto& r : rows) CHECK_MESSAGE(r.pass, r.check_id);
    for (const auto& r : rows)
        if (r.check_id.rfind("prop1", 0) == 0) CHECK(r.bound == doctest::Approx(bounds::prop1(12, 1, h.alphaT())));
    CHECK_THROWS(BoundTargets::parse("nonsense"));
}
