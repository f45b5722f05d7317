#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../support.hpp"
#include "floquet/bounds.hpp"
#include "floquet/errors.hpp"
#include "floquet/fqpe.hpp"

using namespace floquet;
using namespace testsupport;

namespace {
RegisterModel reg(int bp, std::optional<double> nu) {
    RegisterModel r;
    r.b_prime = bp;
    r.nu = nu;
    return r;
}

// eigenpairs of the independent propagator, ascending folded quasienergy
std::vector<std::pair<double, CVector>> oracle_pairs(const FourierHamiltonian& h) {
    const CMatrix u = polar_unitary(propagator(h, h.period(), 4000));
    Eigen::ComplexEigenSolver<CMatrix> es(u);
    std::vector<std::pair<double, CVector>> out;
    for (long k = 0; k < u.rows(); ++k) {
        const double e = -std::arg(es.eigenvalues()(k)) / h.period();
        out.push_back({fold(e, h.omega()), es.eigenvectors().col(k).normalized()});
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
    return out;
}

CVector plus() {
    CVector p(2);
    p << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    return p;
}
}  // namespace

TEST_CASE("precision bits") {
    CHECK(precision_bits(1e-3) == 10);
    CHECK(precision_bits(0.25) == 2);
    CHECK(precision_bits(0.2) == 3);
    CHECK(precision_bits(1.0) == 1);
    CHECK_THROWS_AS(precision_bits(0.0), DomainError);
}

TEST_CASE("rounding promise zones") {
    CHECK(check_rounding_promise({0.125}, 0.5, 2).ok);
    const PromiseCheck bad = check_rounding_promise({0.02}, 0.5, 2);
    CHECK(!bad.ok);
    REQUIRE(bad.violating.size() == 1);
    CHECK(bad.violating[0] == 0.02);
    CHECK(check_rounding_promise({0.0625}, 0.5, 2).ok);
    CHECK(!check_rounding_promise({-0.0625}, 0.5, 2).ok);
}

TEST_CASE("register map") {
    const auto a = qpe_register_map(0.3, reg(3, 0.5));
    REQUIRE(a.size() == 1);
    CHECK(a[0].k == 2);
    const auto b = qpe_register_map(-0.3, reg(3, 0.5));
    CHECK(b[0].k == -3);
    const auto c = qpe_register_map(0.24, reg(3, std::nullopt));
    REQUIRE(c.size() == 2);
    CHECK(c[0].k == 1);
    CHECK(c[1].k == 2);
    for (const auto& bin : c) CHECK(std::abs(bin.k / 8.0 - 0.24) <= 0.125);
    CHECK(c[0].weight + c[1].weight == doctest::Approx(1.0));
    CHECK(c[1].weight == doctest::Approx(0.24 * 8 - 1));
    // on-grid value: same bin as the promise map, second weight 0
    const auto p = qpe_register_map(0.25, reg(3, 0.5));
    const auto q = qpe_register_map(0.25, reg(3, std::nullopt));
    CHECK(q[0].k == p[0].k);
    CHECK(q[0].weight == 1.0);
    CHECK(q[1].weight == 0.0);
    // wrap into [-2^(b-1), 2^(b-1))
    CHECK(qpe_register_map(0.5, reg(3, 0.5))[0].k == -4);
}

TEST_CASE("inherited promise") {
    const FourierHamiltonian sz = sz_model(0.3);
    for (int L : {1, 3, 6}) CHECK(inherited_promise_check(sz, L, L, 0.5, 3).ok);
    const FourierHamiltonian h = rabi();
    const double nu = 0.3;
    const int L = cutoff_for_accuracy(h.M(), h.alphaT(), nu / std::ldexp(1.0, 5));
    // zones near the window edge carry edge-localized eigenvectors; scan the inner 3/4 as fqpe_sambe does
    CHECK(inherited_promise_check(h, L, 3 * L / 4, nu, 4).ok);
    const PromiseCheck small = inherited_promise_check(h, 3, 3, nu, 4);
    CHECK(small.ok == small.violating.empty());
    // x = 0.0627 sits inside the zone at b' = 4 for nu = 0.9
    const FourierHamiltonian near = sz_model(0.0627);
    const PromiseCheck pc = inherited_promise_check(near, 2, 2, 0.9, 4);
    CHECK(!pc.ok);
    CHECK(!pc.violating.empty());
}

TEST_CASE("quantum arithmetic") {
    const double w = kTwoPi;
    Quotient q = quantum_arithmetic(-2.8 * w, w);
    CHECK(q.l == 3);
    CHECK(q.remainder == doctest::Approx(0.2 * w));
    q = quantum_arithmetic(0.2 * w, w);
    CHECK(q.l == 0);
    q = quantum_arithmetic(-0.5 * w, w);
    CHECK(q.l == 0);
    CHECK(q.remainder == doctest::Approx(-0.5 * w));
}

TEST_CASE("physical QPE, trivial model") {
    const FourierHamiltonian h = sz_model(0.25);
    const QpeOutcome out = fqpe_physical(h, plus(), {1e-3, 1e-3, std::nullopt, 0.0});
    REQUIRE(out.entries.size() == 2);
    CHECK(out.entries[0].value == doctest::Approx(-0.25 * kTwoPi));
    CHECK(out.entries[1].value == doctest::Approx(0.25 * kTwoPi));
    for (const auto& e : out.entries) CHECK(e.prob == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(out.entries[0].post_state(1)) == doctest::Approx(1.0));
    CHECK(std::abs(out.entries[1].post_state(0)) == doctest::Approx(1.0));
    CHECK(out.total_prob() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("physical QPE, rabi overlaps") {
    const FourierHamiltonian h = rabi();
    const auto pairs = oracle_pairs(h);
    CVector zero = CVector::Zero(2);
    zero(0) = 1;
    const QpeOutcome out = fqpe_physical(h, zero, {1e-3, 1e-3, 0.5, 0.0});
    REQUIRE(out.entries.size() == 2);
    for (std::size_t n = 0; n < 2; ++n) {
        CHECK(std::abs(out.entries[n].value - pairs[n].first) <= kTwoPi / 1024);
        CHECK(std::abs(out.entries[n].prob - std::norm(pairs[n].second.dot(zero))) < 1e-8);
    }
    // the other eigenstate only shows up at round-off level of the oracle mismatch
    const QpeOutcome one = fqpe_physical(h, pairs[0].second, {1e-3, 1e-3, 0.5, 0.0});
    REQUIRE(!one.entries.empty());
    CHECK(one.entries[0].prob == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t k = 1; k < one.entries.size(); ++k) CHECK(one.entries[k].prob < 1e-12);
    CHECK_THROWS_AS(fqpe_physical(h, zero, {1e-3, 1e-3, 0.99, 0.0}), PromiseViolation);
    // t != 0: post states are U(t) phi_n(0)
    const QpeOutcome later = fqpe_physical(h, zero, {1e-3, 1e-3, 0.5, 0.3});
    const CMatrix ut = propagator(h, 0.3, 4000);
    for (std::size_t n = 0; n < 2; ++n)
        CHECK(std::abs(std::abs(later.entries[n].post_state.dot(ut * pairs[n].second)) - 1.0) < 1e-8);
}

TEST_CASE("initial sambe state") {
    std::mt19937_64 rng(2);
    const CVector psi = random_state(2, rng);
    for (int L : {1, 3}) {
        const CVector s = build_initial_sambe_state(psi, L);
        CHECK(s.size() == 16 * L);
        CHECK(s.norm() == doctest::Approx(1.0));
        const SambeWindow w = make_window(4 * L);
        CHECK(std::abs(embed(psi, 0, w).dot(s) - 1.0 / std::sqrt(8.0 * L)) < 1e-14);
        for (int l = w.lo(); l <= w.hi(); ++l)
            CHECK((fourier_component(s, l, w, 2) - psi / std::sqrt(8.0 * L)).norm() < 1e-15);
    }
}

TEST_CASE("decomposition: M = 0 exact, rabi within bounds") {
    const InitialDecomposition d0 = decompose_initial_state(plus(), sz_model(0.25), 3);
    CHECK(std::abs(d0.psi1_norm - 0.5) <= 1e-12);
    CHECK(d0.neg_norm <= 1e-12);
    const FourierHamiltonian h = rabi();
    const InitialDecomposition d = decompose_initial_state(plus(), h, 10);
    for (std::size_t n = 0; n < d.psi1_norm_n.size(); ++n) {
        CHECK(std::abs(d.psi1_norm_n[n] - 0.5) <= d.psi1_bound);
        CHECK(d.neg_norm_n[n] <= d.neg_bound);
    }
    CHECK(d.psi1_bound == doctest::Approx(bounds::psi1_deviation(10, 1, h.alphaT())));
    CHECK(d.neg_norm <= d.coeff_l1 * d.neg_bound);
}

TEST_CASE("sambe QPE, trivial model") {
    const FourierHamiltonian h = sz_model(0.25);
    SambeQpeOptions o;
    o.L = 2;
    const QpeOutcome out = fqpe_sambe(h, plus(), o);
    REQUIRE(out.entries.size() == 2);
    for (const auto& e : out.entries) {
        CHECK(e.prob == doctest::Approx(0.5).epsilon(1e-12));
        const SambeWindow w = make_window(16);
        CHECK(fourier_component(e.post_state, 0, w, 2).norm() == doctest::Approx(1.0));
    }
    CHECK(out.diagnostics["pre_qaa_success"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(out.diagnostics["qaa_agreement"].get<double>() <= 1e-9);
    CHECK(out.total_prob() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sambe QPE, rabi overlaps and QAA weight") {
    const FourierHamiltonian h = rabi();
    const auto pairs = oracle_pairs(h);
    CVector zero = CVector::Zero(2);
    zero(0) = 1;
    SambeQpeOptions o;
    o.L = 12;
    o.nu = 0.5;
    const QpeOutcome out = fqpe_sambe(h, zero, o);
    REQUIRE(out.entries.size() == 2);
    for (std::size_t n = 0; n < 2; ++n) CHECK(std::abs(out.entries[n].prob - std::norm(pairs[n].second.dot(zero))) < 1e-6);
    const double ts = tail_sum(12, 1, h.alphaT());
    CHECK(out.diagnostics["post_qaa_weight"].get<double>() >= 1 - 10 * ts);
    for (double s : out.diagnostics["singular_values"]) CHECK(f3(s) * f3(s) >= 1 - 10 * ts);
    CHECK(out.total_prob() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("no-promise QPE on a bin edge") {
    // x = 0.25 + 2^-11: halfway between two b' = 10 bins
    const double x = 0.25 + std::ldexp(1.0, -11);
    const FourierHamiltonian h = sz_model(x);
    SambeQpeOptions o;
    o.L = 2;
    const QpeOutcome out = fqpe_sambe(h, plus(), o);
    CHECK(out.entries.size() == 4);
    for (const auto& e : out.entries) {
        const double dist = std::abs(std::abs(e.value / kTwoPi) - x);
        CHECK(dist <= std::ldexp(1.0, -10));
        CHECK(e.prob == doctest::Approx(0.25).epsilon(1e-9));
    }
    CHECK(out.total_prob() == doctest::Approx(1.0).epsilon(1e-9));
    const QpeOutcome ph = fqpe_physical(h, plus(), {1e-3, 1e-3, std::nullopt, 0.0});
    CHECK(ph.entries.size() == 4);
}

TEST_CASE("f3 and dense QSVT") {
    CHECK(f3(0.5) == doctest::Approx(1.0));
    CHECK(f3(0.0) == 0.0);
    CHECK(f3(1.0) == doctest::Approx(-1.0));
    std::mt19937_64 rng(9);
    const CMatrix w = matrix_exponential_i(random_hermitian(6, rng), 1.0);
    CMatrix pi = CMatrix::Zero(6, 6);
    pi(0, 0) = pi(1, 1) = pi(2, 2) = 1;
    const CMatrix p0 = CMatrix::Identity(6, 6).leftCols(2);
    const QaaComparison q = qsvt_amplify(w, pi, p0);
    CHECK(q.agreement <= 1e-9);
    const RVector sa = singular_values(pi * w * p0);
    const RVector sq = singular_values(q.matrix_route);
    for (long k = 0; k < 2; ++k) {
        bool found = false;
        for (long j = 0; j < 2; ++j) found = found || std::abs(std::abs(f3(sa(j))) - sq(k)) < 1e-9;
        CHECK(found);
    }
}

TEST_CASE("approximate QSVT bound") {
    CHECK(approx_qsvt_error_bound(3, 1e-6, 4) == doctest::Approx(1.8e-5));
    CHECK(approx_qsvt_error_bound(3, 0.0, 4) == 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const QsvtExperiment e = qsvt_experiment(8, 1e-3, seed);
        CHECK(e.measured <= e.bound + kNumericFloor);
    }
}

TEST_CASE("cost shapes") {
    CostParams p;
    p.alphaT = 1;
    p.eps = p.delta = p.nu = 0.1;
    const CostReport r = cost_formulas(p, CostKind::Thm3);
    CHECK(r.queries == doctest::Approx((1 + std::log(100.0)) / 0.01 * std::log(10.0)));
    p.nu = 1.0;
    p.N = 2;
    const CostReport t4 = cost_formulas(p, CostKind::Thm4);
    CHECK(t4.queries == doctest::Approx((1 + 2 + std::log(1 / 0.01)) / 0.1 * std::log(10.0)));
    CostParams q = p;
    q.eps = 0.05;
    const double ratio = cost_formulas(q, CostKind::StandardExp).queries / cost_formulas(p, CostKind::StandardExp).queries;
    CHECK(ratio == doctest::Approx(2.0));
    const double r4 = cost_formulas(q, CostKind::Thm4).queries / t4.queries;
    CHECK(r4 > 2.0);
    CHECK(r4 < 2.0 * std::log(1 / 0.005) / std::log(1 / 0.01) + 1e-12);
    CHECK(parse_cost_kind("prep_sambe") == CostKind::PrepSambe);
    CHECK_THROWS_AS(parse_cost_kind("x"), ConfigError);
    CHECK(to_json(r)["label"].get<std::string>().find(',') == std::string::npos);
}

TEST_CASE("sampling is deterministic") {
    const QpeOutcome out = fqpe_physical(sz_model(0.25), plus(), {1e-3, 1e-3, std::nullopt, 0.0});
    const auto a = sample_outcomes(out, 200, 42), b = sample_outcomes(out, 200, 42);
    CHECK(a == b);
    const long ones = std::count(a.begin(), a.end(), 1);
    CHECK(ones > 60);
    CHECK(ones < 140);
    const auto j = to_json(out, true);
    CHECK(j["entries"].size() == 2);
    CHECK(j["entries"][0]["bin"] == "-256/2^10");
    CHECK(j["post_states"].size() == 2);
}
