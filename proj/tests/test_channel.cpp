#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "memsched/channel.hpp"

using namespace memsched;

namespace {

const std::vector<ChannelParams> kGrid = {
    ChannelParams(0.2, 0.2),  ChannelParams(0.1, 0.3),  ChannelParams(0.3, 0.1),
    ChannelParams(0.05, 0.4), ChannelParams(0.45, 0.5), ChannelParams(0.01, 0.01),
};

// brute-force k-step transition by repeated matrix multiplication
OnOffMatrix matmul(const OnOffMatrix& a, const OnOffMatrix& b) {
    return {a.p00 * b.p00 + a.p01 * b.p10, a.p00 * b.p01 + a.p01 * b.p11,
            a.p10 * b.p00 + a.p11 * b.p10, a.p10 * b.p01 + a.p11 * b.p11};
}

OnOffMatrix power_oracle(const ChannelParams& p, int k) {
    OnOffMatrix acc = p.k_step(1);
    for (int i = 1; i < k; ++i) acc = matmul(acc, p.k_step(1));
    return acc;
}

} // namespace

TEST_CASE("construction rejects non-ergodic and non-correlated parameters") {
    CHECK_THROWS_AS(ChannelParams(0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams(0.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams(0.5, 0.5), std::invalid_argument); // x = 1: i.i.d.
    CHECK_THROWS_AS(ChannelParams(0.7, 0.4), std::invalid_argument);
    CHECK_NOTHROW(ChannelParams(0.49, 0.5));
}

TEST_CASE("stationary probability identity pi_on * x = p01") {
    for (const auto& p : kGrid) {
        CHECK(std::abs(p.pi_on() * p.x() - p.p01()) <= kProbTol);
        CHECK(p.pi_on() > 0.0);
        CHECK(p.pi_on() < 1.0);
    }
    CHECK(ChannelParams(0.2, 0.2).pi_on() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("k-step closed form") {
    const ChannelParams p(0.2, 0.2);
    CHECK_THROWS_AS(p.k_step(0), std::invalid_argument);

    const auto m1 = p.k_step(1);
    CHECK(m1.p01 == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(m1.p11 == doctest::Approx(0.8).epsilon(1e-14));

    const auto m2 = p.k_step(2); // 0.5 * (1 - 0.6^2)
    CHECK(m2.p01 == doctest::Approx(0.32).epsilon(1e-14));
    CHECK(m2.p11 == doctest::Approx(0.68).epsilon(1e-14));

    const auto big = p.k_step(200); // both entries converge to pi_on
    CHECK(std::abs(big.p01 - 0.5) < 1e-12);
    CHECK(std::abs(big.p11 - 0.5) < 1e-12);
}

TEST_CASE("k-step rows are stochastic and match repeated multiplication") {
    for (const auto& p : kGrid) {
        for (int k : {1, 2, 3, 5, 8, 13, 21, 34}) {
            const auto m = p.k_step(k);
            for (double e : {m.p00, m.p01, m.p10, m.p11}) {
                CHECK(e >= 0.0);
                CHECK(e <= 1.0);
            }
            CHECK(std::abs(m.p00 + m.p01 - 1.0) <= kProbTol);
            CHECK(std::abs(m.p10 + m.p11 - 1.0) <= kProbTol);

            const auto oracle = power_oracle(p, k);
            CHECK(std::abs(m.p01 - oracle.p01) <= kProbTol);
            CHECK(std::abs(m.p11 - oracle.p11) <= kProbTol);
        }
    }
}

TEST_CASE("Chapman-Kolmogorov composition") {
    for (const auto& p : kGrid) {
        for (int a : {1, 2, 7, 20}) {
            for (int b : {1, 3, 11}) {
                const auto lhs = p.k_step(a + b);
                const auto rhs = matmul(p.k_step(a), p.k_step(b));
                CHECK(std::abs(lhs.p01 - rhs.p01) <= kProbTol);
                CHECK(std::abs(lhs.p11 - rhs.p11) <= kProbTol);
                CHECK(std::abs(lhs.p00 - rhs.p00) <= kProbTol);
                CHECK(std::abs(lhs.p10 - rhs.p10) <= kProbTol);
            }
        }
    }
}

TEST_CASE("monotone chain of k-step probabilities") {
    for (const auto& p : kGrid) {
        double prev01 = p.p01(), prev11 = p.p11();
        for (int k = 1; k <= 64; ++k) {
            const double p01k = p.k_step_01(k);
            const double p11k = p.k_step_11(k);
            CHECK(p01k >= prev01 - kProbTol);         // P01^(k) nondecreasing
            CHECK(p11k <= prev11 + kProbTol);         // P11^(k) nonincreasing
            CHECK(p01k <= p.pi_on() + kProbTol);
            CHECK(p11k >= p.pi_on() - kProbTol);
            prev01 = p01k;
            prev11 = p11k;
        }
    }
}

TEST_CASE("belief update: idle map and feedback resets") {
    const std::vector<ChannelParams> ch = {ChannelParams(0.2, 0.2)};

    // stationary belief is the fixed point of the idle map
    auto next = belief_update({0.5}, std::nullopt, std::nullopt, ch);
    CHECK(next[0] == doctest::Approx(0.5).epsilon(1e-15));

    // idle from P01^(1) gives P01^(2)
    next = belief_update({0.2}, std::nullopt, std::nullopt, ch);
    CHECK(next[0] == doctest::Approx(0.32).epsilon(1e-14));

    // feedback resets regardless of the prior belief
    next = belief_update({0.9}, 0, ChannelState::Off, ch);
    CHECK(next[0] == doctest::Approx(0.2).epsilon(1e-15));
    next = belief_update({0.1}, 0, ChannelState::On, ch);
    CHECK(next[0] == doctest::Approx(0.8).epsilon(1e-15));

    CHECK_THROWS_AS(belief_update({0.5}, 0, std::nullopt, ch), std::invalid_argument);
    CHECK_THROWS_AS(belief_update({0.5}, std::nullopt, ChannelState::On, ch),
                    std::invalid_argument);
}

TEST_CASE("idle updates walk the k-step ladder") {
    for (const auto& p : kGrid) {
        const std::vector<ChannelParams> ch = {p};
        double from_off = p.k_step_01(1);
        double from_on = p.k_step_11(1);
        for (int k = 1; k <= 64; ++k) {
            CHECK(std::abs(from_off - p.k_step_01(k)) <= kProbTol);
            CHECK(std::abs(from_on - p.k_step_11(k)) <= kProbTol);
            from_off = belief_update({from_off}, std::nullopt, std::nullopt, ch)[0];
            from_on = belief_update({from_on}, std::nullopt, std::nullopt, ch)[0];
        }
    }
}

TEST_CASE("mode map splits at the stationary probability") {
    const ChannelParams p(0.2, 0.2);
    CHECK(mode_of(0.8, p) == Mode::M1);
    CHECK(mode_of(0.5, p) == Mode::M2);  // boundary belongs to M2
    CHECK(mode_of(0.32, p) == Mode::M2);
    CHECK(mode_of(0.2, p) == Mode::M2);
    CHECK(mode_of(0.500001, p) == Mode::M1);
    CHECK_THROWS_AS(mode_of(0.1, p), std::invalid_argument);  // below p01
    CHECK_THROWS_AS(mode_of(0.9, p), std::invalid_argument);  // above p11
}

TEST_CASE("state sampler hits the stationary ON fraction") {
    const auto run_fraction = [](const ChannelParams& p, std::uint64_t steps, std::uint64_t seed) {
        const std::vector<ChannelParams> ch = {p};
        Rng rng(seed);
        auto s = sample_stationary(ch, rng);
        std::uint64_t on = 0;
        for (std::uint64_t t = 0; t < steps; ++t) {
            on += s[0] == ChannelState::On;
            s = sample_step(s, ch, rng);
        }
        return static_cast<double>(on) / static_cast<double>(steps);
    };
    CHECK(std::abs(run_fraction(ChannelParams(0.2, 0.2), 1'000'000, 42) - 0.5) < 0.005);
    CHECK(std::abs(run_fraction(ChannelParams(0.1, 0.3), 1'000'000, 43) - 0.25) < 0.005);
}

TEST_CASE("degenerate parameters stay absorbing (sampler-only, unchecked)") {
    const auto p = ChannelParams::unchecked(0.0, 0.2);
    const std::vector<ChannelParams> ch = {p};
    Rng rng(7);
    ChannelStateSample s = {ChannelState::Off};
    for (int t = 0; t < 1000; ++t) {
        s = sample_step(s, ch, rng);
        REQUIRE(s[0] == ChannelState::Off);
    }
}

TEST_CASE("belief tracker pins beliefs to the closed-form state set") {
    const std::vector<ChannelParams> ch = {ChannelParams(0.2, 0.2), ChannelParams(0.1, 0.3)};
    BeliefTracker tracker(ch);
    BeliefVector omega = stationary_belief(ch);
    Rng rng(11);
    auto states = sample_stationary(ch, rng);
    for (int t = 0; t < 2000; ++t) {
        const int served = static_cast<int>(rng.below(2));
        omega = belief_update(omega, served, states[served], ch);
        tracker.observe(served, states[served]);
        tracker.step_idle(1 - served);
        REQUIRE(tracker.consistent(0, omega[0]));
        REQUIRE(tracker.consistent(1, omega[1]));
        states = sample_step(states, ch, rng);
    }
}
