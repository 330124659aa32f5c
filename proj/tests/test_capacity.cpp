#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "memsched/capacity.hpp"
#include "memsched/rng.hpp"

using namespace memsched;

namespace {

const ChannelParams kSym(0.2, 0.2);
const std::vector<ChannelParams> kSymPair = {kSym, kSym};
const std::vector<ChannelParams> kAsymPair = {ChannelParams(0.1, 0.3), ChannelParams(0.3, 0.1)};

} // namespace

TEST_CASE("c_M closed form and its limit") {
    CHECK(c_of_m(kSym, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c_of_m(kSym, 2) == doctest::Approx(8.0 / 13.0).epsilon(1e-14));
    CHECK(std::abs(c_of_m(kSym, 2) - 0.615) < 5e-4);
    CHECK(c_infinity(kSym) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
    CHECK_THROWS(c_of_m(kSym, 0));
}

TEST_CASE("c_M is nondecreasing and squeezed by c~_M and c_inf") {
    for (const auto& p : {kSym, ChannelParams(0.1, 0.3), ChannelParams(0.3, 0.1),
                          ChannelParams(0.05, 0.4)}) {
        double prev = 0.0;
        for (int m = 1; m <= 64; ++m) {
            const double cm = c_of_m(p, m);
            CHECK(cm >= prev - 1e-15);
            CHECK(c_tilde(p, m) <= cm + 1e-12);
            CHECK(cm <= c_infinity(p) + 1e-12);
            prev = cm;
        }
    }
}

TEST_CASE("geometric gap bounds the distance to the limit") {
    CHECK(geometric_gap(kSym, 2) == doctest::Approx(5.0 / 7.0 * 0.36).epsilon(1e-12));
    CHECK(geometric_gap(kSym, 1) == doctest::Approx(5.0 / 7.0 * 0.6).epsilon(1e-12));
    CHECK(geometric_gap(kSym, 200) < 1e-40);
    CHECK(c_infinity(kSym) - c_of_m(kSym, 2) <= geometric_gap(kSym, 2));
    for (int m = 1; m <= 64; ++m)
        CHECK(c_infinity(kSym) - c_of_m(kSym, m) <= geometric_gap(kSym, m) + 1e-15);
}

TEST_CASE("expected dwell") {
    CHECK(expected_dwell(kSym, 2) == doctest::Approx(2.6).epsilon(1e-14));
    CHECK(expected_dwell(kSym, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eta vector: symmetric pair splits c_2 evenly") {
    const auto eta = eta_vector(ActivationVector::from_string("11"), kSymPair);
    CHECK(std::abs(eta[0] - c_of_m(kSym, 2) / 2.0) <= 1e-12);
    CHECK(std::abs(eta[1] - c_of_m(kSym, 2) / 2.0) <= 1e-12);

    const auto solo = eta_vector(ActivationVector::from_string("10"), kSymPair);
    CHECK(solo[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(solo[1] == 0.0);
}

TEST_CASE("eta vector: asymmetric pair, hand-derived values") {
    // E[L1] = 23/15, E[L2] = 29/5, total 22/3
    const auto eta = eta_vector(ActivationVector::from_string("11"), kAsymPair);
    CHECK(eta[0] == doctest::Approx(4.0 / 55.0).epsilon(1e-12));
    CHECK(eta[1] == doctest::Approx(36.0 / 55.0).epsilon(1e-12));
}

TEST_CASE("symmetric eta equals (c_M / M) phi for every subset") {
    const std::vector<ChannelParams> five(5, kSym);
    for (std::uint64_t mask = 1; mask < 32; ++mask) {
        const auto phi = ActivationVector::from_mask(mask, 5);
        const auto eta = eta_vector(phi, five);
        const double share = c_of_m(kSym, phi.count()) / phi.count();
        for (int n = 0; n < 5; ++n) {
            if (phi.active(n))
                CHECK(std::abs(eta[n] - share) <= 1e-12);
            else
                CHECK(eta[n] == 0.0);
        }
    }
}

TEST_CASE("outer bound caps and membership") {
    const auto b = outer_bound(kSymPair);
    CHECK(b.per_channel_cap[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(b.sum_cap == doctest::Approx(5.0 / 7.0).epsilon(1e-14));

    CHECK(outer_membership({0.35, 0.35}, kSymPair));  // sum 0.70 <= 0.7143
    CHECK_FALSE(outer_membership({0.55, 0.0}, kSymPair)); // exceeds pi_on
    CHECK_FALSE(outer_membership({0.5, 0.25}, kSymPair)); // sum above the cap

    const auto asym = outer_bound(kAsymPair);
    CHECK(asym.sum_cap == doctest::Approx(15.0 / 17.0).epsilon(1e-12)); // max c_inf
    CHECK(asym.per_channel_cap[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(asym.per_channel_cap[1] == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("inner membership with certificate") {
    const RegionModel region(kSymPair);

    auto res = inner_membership({0.30, 0.30}, region);
    CHECK(res.verdict == Membership::Inside);
    // certificate must reconstruct a dominating mixture
    std::vector<double> mu(2, 0.0);
    double total = 0.0;
    for (const auto& [mask, w] : res.certificate) {
        const auto eta = eta_vector(ActivationVector::from_mask(mask, 2), kSymPair);
        for (int i = 0; i < 2; ++i) mu[i] += w * eta[i];
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mu[0] >= 0.30 - 1e-9);
    CHECK(mu[1] >= 0.30 - 1e-9);

    CHECK(inner_membership({0.32, 0.32}, region).verdict == Membership::Outside);
    CHECK(inner_membership({0.0, 0.0}, region).verdict == Membership::Inside);

    const double half = c_of_m(kSym, 2) / 2.0;
    CHECK(inner_membership({half, half}, region).verdict == Membership::Boundary);

    CHECK_THROWS_AS(inner_membership({0.1, 0.1, 0.1}, region), std::invalid_argument);
}

TEST_CASE("every vertex lies inside the outer bound (small grid)") {
    for (const auto& channels : {kSymPair, kAsymPair}) {
        for (std::uint64_t mask = 1; mask < 4; ++mask) {
            const auto eta = eta_vector(ActivationVector::from_mask(mask, 2), channels);
            CHECK(outer_membership(eta, channels));
        }
    }
}

TEST_CASE("vertex sum rate stays below one slot per slot") {
    // a round always spends at least one slot per visit without a delivery
    const std::vector<ChannelParams> mixed = {ChannelParams(0.2, 0.2), ChannelParams(0.1, 0.3),
                                              ChannelParams(0.3, 0.1), ChannelParams(0.05, 0.4)};
    for (std::uint64_t mask = 1; mask < 16; ++mask) {
        const auto eta = eta_vector(ActivationVector::from_mask(mask, 4), mixed);
        double sum = 0.0;
        for (double e : eta) sum += e;
        CHECK(sum < 1.0);
        for (double e : eta) CHECK(e >= 0.0);
    }
}

TEST_CASE("weight conversion: two-policy worked example") {
    // Phi = {(1,0), (1,1)} on the symmetric pair: chi = (2, 5.2)
    CHECK(round_length_chi(0b01, kSymPair) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(round_length_chi(0b11, kSymPair) == doctest::Approx(5.2).epsilon(1e-14));

    const MixtureWeights beta(WeightKind::TimeFraction, {{0b01, 0.5}, {0b11, 0.5}});
    const auto alpha = beta_to_alpha(beta, kSymPair);
    CHECK(alpha.weights().at(0b01) == doctest::Approx(13.0 / 18.0).epsilon(1e-12));
    CHECK(alpha.weights().at(0b11) == doctest::Approx(5.0 / 18.0).epsilon(1e-12));

    const auto back = alpha_to_beta(alpha, kSymPair);
    CHECK(back.weights().at(0b01) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(back.weights().at(0b11) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("weight conversion: identities") {
    // equal chi: masks of equal active count over symmetric channels
    const MixtureWeights beta(WeightKind::TimeFraction, {{0b01, 0.3}, {0b10, 0.7}});
    const auto alpha = beta_to_alpha(beta, kSymPair);
    CHECK(alpha.weights().at(0b01) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(alpha.weights().at(0b10) == doctest::Approx(0.7).epsilon(1e-12));

    const MixtureWeights point(WeightKind::TimeFraction, {{0b11, 1.0}});
    CHECK(beta_to_alpha(point, kSymPair).weights().at(0b11) == doctest::Approx(1.0));
}

TEST_CASE("alpha/beta round trip on random distributions") {
    Rng rng(301);
    const std::vector<ChannelParams> four(4, ChannelParams(0.15, 0.25));
    for (int trial = 0; trial < 20; ++trial) {
        std::map<std::uint64_t, double> w;
        double total = 0.0;
        for (std::uint64_t mask = 1; mask < 16; ++mask) {
            if (rng.uniform() < 0.4) continue;
            const double x = rng.uniform();
            w[mask] = x;
            total += x;
        }
        if (w.empty()) w[1] = total = 1.0;
        for (auto& [mask, x] : w) x /= total;

        const MixtureWeights alpha(WeightKind::PerRoundSelection, w);
        const auto beta = alpha_to_beta(alpha, four);
        const auto alpha2 = beta_to_alpha(beta, four);
        for (const auto& [mask, x] : alpha.weights())
            REQUIRE(std::abs(alpha2.weights().at(mask) - x) <= 1e-12);
    }
}

TEST_CASE("mixture weight validation") {
    CHECK_THROWS_AS(MixtureWeights(WeightKind::TimeFraction, {{0b1, 0.7}, {0b10, 0.4}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MixtureWeights(WeightKind::TimeFraction, {{0b1, -0.2}, {0b10, 1.2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MixtureWeights(WeightKind::TimeFraction, {{0, 1.0}}), std::invalid_argument);
}

TEST_CASE("user diversity") {
    CHECK(user_diversity(DirectionVector({1.0, 1.0, 1.0})) == 3);
    CHECK(user_diversity(DirectionVector({1.0, 2.0, 1.0})) == 2);
    CHECK(user_diversity(DirectionVector({1.0, 0.0, 0.0})) == 1);
    CHECK(user_diversity(DirectionVector({2.0, 1.0})) == 1);
    CHECK(user_diversity(DirectionVector({1.0, 1.0})) == 2);
    for (int n = 2; n <= 8; ++n)
        CHECK(user_diversity(DirectionVector(std::vector<double>(n, 1.0))) == n);
    CHECK_THROWS_AS(DirectionVector({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(DirectionVector({-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("diversity mixture achieves c_d along the direction") {
    const auto mix = guaranteed_sum_throughput(DirectionVector({1.0, 2.0, 1.0}), kSym);
    CHECK(mix.d == 2);
    CHECK(mix.sum_throughput == doctest::Approx(c_of_m(kSym, 2)).epsilon(1e-14));
    // beta = {(1,1,0): 0.5, (0,1,1): 0.5}
    CHECK(mix.beta.weights().at(0b011) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(mix.beta.weights().at(0b110) == doctest::Approx(0.5).epsilon(1e-9));

    const auto two = guaranteed_sum_throughput(DirectionVector({1.0, 1.0}), kSym);
    CHECK(two.sum_throughput == doctest::Approx(c_of_m(kSym, 2)).epsilon(1e-14));

    const auto solo = guaranteed_sum_throughput(DirectionVector({1.0, 0.0}), kSym);
    CHECK(solo.sum_throughput == doctest::Approx(0.5).epsilon(1e-14)); // c_1 = pi_on
}

TEST_CASE("proximity bound") {
    const double half = c_of_m(kSym, 2) / 2.0;
    const double gap = proximity_gap(DirectionVector({1.0, 1.0}), {half, half}, kSym);
    CHECK(gap == doctest::Approx(5.0 / 7.0 * 0.36).epsilon(1e-12)); // ~0.2571
    CHECK(std::abs(gap - 0.2571) < 1e-3);

    // favored-user limit: second term goes to zero
    const double near_cap =
        proximity_gap(DirectionVector({1.0, 0.0}), {0.499999, 0.0001}, kSym);
    CHECK(near_cap < 1e-5);

    // large diversity: first term vanishes
    const std::vector<double> ones(10, 1.0);
    std::vector<double> lam(10, c_of_m(kSym, 10) / 10.0);
    const double balanced = proximity_gap(DirectionVector(ones), lam, kSym);
    CHECK(balanced == doctest::Approx(c_infinity(kSym) * std::pow(0.6, 10)).epsilon(1e-9));
}

TEST_CASE("boundary sweep on the two-user example") {
    const RegionModel region(kSymPair);
    const auto rows = boundary_sweep(
        region, {DirectionVector({1.0, 1.0}), DirectionVector({1.0, 0.0}),
                 DirectionVector({0.0, 1.0})});

    const double half = c_of_m(kSym, 2) / 2.0;   // 0.30769
    const double outer_half = 5.0 / 7.0 / 2.0;   // 0.35714
    CHECK(rows[0].inner_point[0] == doctest::Approx(half).epsilon(1e-6));
    CHECK(rows[0].inner_point[1] == doctest::Approx(half).epsilon(1e-6));
    CHECK(rows[0].outer_point[0] == doctest::Approx(outer_half).epsilon(1e-12));
    CHECK(rows[0].outer_point[1] == doctest::Approx(outer_half).epsilon(1e-12));

    CHECK(rows[1].inner_point[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rows[1].inner_point[1] == 0.0);
    CHECK(rows[1].outer_point[0] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(rows[2].inner_point[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rows[2].outer_point[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("region model dimension cap") {
    CHECK_THROWS_AS(RegionModel(std::vector<ChannelParams>(17, kSym)), std::invalid_argument);
}
