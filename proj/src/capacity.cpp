#include "memsched/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "memsched/lp.hpp"

namespace memsched {

namespace {
constexpr double kWeightSumTol = 1e-9;
constexpr double kLpTol = 1e-9;
} // namespace

double c_of_m(const ChannelParams& p, int m) {
    if (m < 1) throw std::invalid_argument("c_of_m: M must be >= 1");
    const double g = p.p01() * (1.0 - std::pow(1.0 - p.x(), m));
    return g / (p.x() * p.p10() + g);
}

double c_infinity(const ChannelParams& p) {
    return p.p01() / (p.x() * p.p10() + p.p01());
}

double c_tilde(const ChannelParams& p, int m) {
    return c_infinity(p) * (1.0 - std::pow(1.0 - p.x(), m));
}

double geometric_gap(const ChannelParams& p, int m) {
    return c_infinity(p) * std::pow(1.0 - p.x(), m);
}

double expected_dwell(const ChannelParams& p, int m) {
    return 1.0 + p.k_step_01(static_cast<std::uint64_t>(m)) / p.p10();
}

std::vector<double> eta_vector(const ActivationVector& phi,
                               const std::vector<ChannelParams>& channels) {
    if (static_cast<std::size_t>(phi.size()) != channels.size())
        throw std::invalid_argument("eta_vector: dimension mismatch");
    const int m = phi.count();
    double total = 0.0;
    std::vector<double> eta(channels.size(), 0.0);
    for (int n = 0; n < phi.size(); ++n)
        if (phi.active(n)) total += expected_dwell(channels[n], m);
    for (int n = 0; n < phi.size(); ++n)
        if (phi.active(n)) eta[n] = (expected_dwell(channels[n], m) - 1.0) / total;
    return eta;
}

double round_length_chi(std::uint64_t mask, const std::vector<ChannelParams>& channels) {
    const int m = std::popcount(mask);
    double chi = 0.0;
    for (std::size_t n = 0; n < channels.size(); ++n)
        if (mask >> n & 1) chi += expected_dwell(channels[n], m);
    return chi;
}

OuterBound outer_bound(const std::vector<ChannelParams>& channels) {
    OuterBound b;
    b.sum_cap = 0.0;
    for (const auto& c : channels) {
        b.per_channel_cap.push_back(c.pi_on());
        b.sum_cap = std::max(b.sum_cap, c_infinity(c));
    }
    return b;
}

bool outer_membership(const std::vector<double>& lambda,
                      const std::vector<ChannelParams>& channels) {
    if (lambda.size() != channels.size())
        throw std::invalid_argument("outer_membership: dimension mismatch");
    const auto b = outer_bound(channels);
    double sum = 0.0;
    for (std::size_t n = 0; n < lambda.size(); ++n) {
        if (lambda[n] < -kProbTol || lambda[n] > b.per_channel_cap[n] + kProbTol) return false;
        sum += lambda[n];
    }
    return sum <= b.sum_cap + kProbTol;
}

RegionModel::RegionModel(std::vector<ChannelParams> channels)
    : channels_(std::move(channels)) {
    const int n = static_cast<int>(channels_.size());
    if (n < 1 || n > 16)
        throw std::invalid_argument("region model: channel count must be in 1..16");
    vertices_.reserve((1ULL << n) - 1);
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask)
        vertices_.push_back(eta_vector(ActivationVector::from_mask(mask, n), channels_));
    outer_ = outer_bound(channels_);
}

namespace {

// feasibility of: exists beta >= 0, sum beta = 1, sum beta eta^phi >= lambda
bool dominated_by_hull(const std::vector<double>& lambda, const RegionModel& region) {
    const std::size_t k = region.vertices().size();
    const std::size_t n = lambda.size();
    std::vector<lp::Constraint> cons;
    cons.reserve(n + 1);
    for (std::size_t row = 0; row < n; ++row) {
        lp::Constraint c;
        c.coeffs.resize(k);
        for (std::size_t j = 0; j < k; ++j) c.coeffs[j] = region.vertices()[j][row];
        c.rel = lp::Relation::Ge;
        c.rhs = lambda[row];
        cons.push_back(std::move(c));
    }
    cons.push_back({std::vector<double>(k, 1.0), lp::Relation::Eq, 1.0});
    return lp::feasible(cons, kLpTol);
}

} // namespace

InnerMembership inner_membership(const std::vector<double>& lambda, const RegionModel& region) {
    if (static_cast<int>(lambda.size()) != region.n())
        throw std::invalid_argument("inner_membership: dimension mismatch");
    for (double l : lambda)
        if (l < 0.0) throw std::invalid_argument("inner_membership: rates must be nonnegative");

    // maximize s (split into s+ - s-) subject to
    //   sum_phi beta_phi eta^phi_n - s >= lambda_n,  sum beta = 1
    const std::size_t k = region.vertices().size();
    const std::size_t n = lambda.size();
    std::vector<double> objective(k + 2, 0.0);
    objective[k] = 1.0;
    objective[k + 1] = -1.0;

    std::vector<lp::Constraint> cons;
    cons.reserve(n + 1);
    for (std::size_t row = 0; row < n; ++row) {
        lp::Constraint c;
        c.coeffs.resize(k + 2, 0.0);
        for (std::size_t j = 0; j < k; ++j) c.coeffs[j] = region.vertices()[j][row];
        c.coeffs[k] = -1.0;
        c.coeffs[k + 1] = 1.0;
        c.rel = lp::Relation::Ge;
        c.rhs = lambda[row];
        cons.push_back(std::move(c));
    }
    {
        lp::Constraint c;
        c.coeffs.assign(k + 2, 0.0);
        std::fill(c.coeffs.begin(), c.coeffs.begin() + k, 1.0);
        c.rel = lp::Relation::Eq;
        c.rhs = 1.0;
        cons.push_back(std::move(c));
    }

    const auto sol = lp::solve(objective, cons, kLpTol);
    if (!sol.feasible || !sol.bounded)
        throw std::logic_error("inner_membership: slack LP must be feasible and bounded");

    InnerMembership r;
    r.slack = sol.objective;
    r.verdict = r.slack > kLpTol    ? Membership::Inside
                : r.slack >= -kLpTol ? Membership::Boundary
                                     : Membership::Outside;
    if (r.verdict != Membership::Outside) {
        for (std::size_t j = 0; j < k; ++j)
            if (sol.x[j] > 0.0) r.certificate[region.vertex_mask(j)] = sol.x[j];
    }
    return r;
}

MixtureWeights::MixtureWeights(WeightKind kind, std::map<std::uint64_t, double> weights)
    : kind_(kind), weights_(std::move(weights)) {
    double sum = 0.0;
    for (const auto& [mask, w] : weights_) {
        if (mask == 0) throw std::invalid_argument("mixture weights: zero activation mask");
        if (w < 0.0) throw std::invalid_argument("mixture weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("mixture weights must sum to 1 within 1e-9");
    for (auto& [mask, w] : weights_) w /= sum;
}

std::vector<double> closed_beta_to_alpha(const std::vector<double>& beta,
                                         const std::vector<double>& chi) {
    if (beta.size() != chi.size())
        throw std::invalid_argument("closed_beta_to_alpha: dimension mismatch");
    std::vector<double> alpha(beta.size());
    double total = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) {
        alpha[k] = beta[k] / chi[k];
        total += alpha[k];
    }
    for (auto& a : alpha) a /= total;
    return alpha;
}

std::vector<double> closed_alpha_to_beta(const std::vector<double>& alpha,
                                         const std::vector<double>& chi) {
    if (alpha.size() != chi.size())
        throw std::invalid_argument("closed_alpha_to_beta: dimension mismatch");
    std::vector<double> beta(alpha.size());
    double total = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        beta[k] = alpha[k] * chi[k];
        total += beta[k];
    }
    for (auto& b : beta) b /= total;
    return beta;
}

namespace {

MixtureWeights convert_weights(const MixtureWeights& in, const std::vector<ChannelParams>& channels,
                               WeightKind out_kind) {
    std::vector<std::uint64_t> masks;
    std::vector<double> w, chi;
    for (const auto& [mask, weight] : in.weights()) {
        masks.push_back(mask);
        w.push_back(weight);
        chi.push_back(round_length_chi(mask, channels));
    }
    const auto out = out_kind == WeightKind::PerRoundSelection ? closed_beta_to_alpha(w, chi)
                                                               : closed_alpha_to_beta(w, chi);
    std::map<std::uint64_t, double> result;
    for (std::size_t k = 0; k < masks.size(); ++k) result[masks[k]] = out[k];
    return {out_kind, std::move(result)};
}

} // namespace

MixtureWeights beta_to_alpha(const MixtureWeights& beta, const std::vector<ChannelParams>& channels) {
    if (beta.kind() != WeightKind::TimeFraction)
        throw std::invalid_argument("beta_to_alpha: input must be time fractions");
    return convert_weights(beta, channels, WeightKind::PerRoundSelection);
}

MixtureWeights alpha_to_beta(const MixtureWeights& alpha, const std::vector<ChannelParams>& channels) {
    if (alpha.kind() != WeightKind::PerRoundSelection)
        throw std::invalid_argument("alpha_to_beta: input must be selection probabilities");
    return convert_weights(alpha, channels, WeightKind::TimeFraction);
}

DirectionVector::DirectionVector(std::vector<double> v) : v_(std::move(v)) {
    bool positive = false;
    for (double x : v_) {
        if (x < 0.0) throw std::invalid_argument("direction vector entries must be nonnegative");
        if (x > 0.0) positive = true;
    }
    if (!positive) throw std::invalid_argument("direction vector must have a positive entry");
}

namespace {

// feasibility of v = sum_{phi in Phi_d} beta_phi phi with beta >= 0; when
// `out` is non-null the witness weights (unnormalized) are stored there
bool diverse_feasible(const std::vector<double>& v, int d,
                      std::map<std::uint64_t, double>* out) {
    const int n = static_cast<int>(v.size());
    if (n > 16) throw std::invalid_argument("user diversity: channel count must be <= 16");
    std::vector<std::uint64_t> masks;
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask)
        if (std::popcount(mask) == d) masks.push_back(mask);

    std::vector<lp::Constraint> cons;
    cons.reserve(n);
    for (int row = 0; row < n; ++row) {
        lp::Constraint c;
        c.coeffs.resize(masks.size());
        for (std::size_t j = 0; j < masks.size(); ++j)
            c.coeffs[j] = (masks[j] >> row & 1) ? 1.0 : 0.0;
        c.rel = lp::Relation::Eq;
        c.rhs = v[row];
        cons.push_back(std::move(c));
    }
    const auto sol = lp::solve(std::vector<double>(masks.size(), 0.0), cons, kLpTol);
    if (!sol.feasible) return false;
    if (out) {
        out->clear();
        for (std::size_t j = 0; j < masks.size(); ++j)
            if (sol.x[j] > kLpTol) (*out)[masks[j]] = sol.x[j];
    }
    return true;
}

} // namespace

int user_diversity(const DirectionVector& v) {
    const int n = v.n();
    for (int d = n; d >= 2; --d)
        if (diverse_feasible(v.values(), d, nullptr)) return d;
    return 1;
}

DiversityMixture guaranteed_sum_throughput(const DirectionVector& v, const ChannelParams& symmetric) {
    const int n = v.n();
    std::map<std::uint64_t, double> witness;
    int d = 1;
    for (int cand = n; cand >= 1; --cand) {
        if (diverse_feasible(v.values(), cand, &witness)) {
            d = cand;
            break;
        }
    }
    double total = 0.0;
    for (const auto& [mask, w] : witness) total += w;
    std::map<std::uint64_t, double> beta;
    for (const auto& [mask, w] : witness) beta[mask] = w / total;
    return {d, c_of_m(symmetric, d), MixtureWeights(WeightKind::TimeFraction, std::move(beta))};
}

double proximity_gap(const DirectionVector& v, const std::vector<double>& lambda_int,
                     const ChannelParams& symmetric) {
    const int d = user_diversity(v);
    const double favored = *std::max_element(lambda_int.begin(), lambda_int.end());
    const double first = std::pow(1.0 - symmetric.x(), d);
    const double second = symmetric.pi_on() / favored - 1.0;
    return c_infinity(symmetric) * std::min(first, second);
}

std::vector<SweepRow> boundary_sweep(const RegionModel& region,
                                     const std::vector<DirectionVector>& directions) {
    if (directions.empty())
        throw std::invalid_argument("boundary_sweep: need at least one direction");
    std::vector<SweepRow> rows;
    rows.reserve(directions.size());
    for (const auto& dir : directions) {
        if (dir.n() != region.n())
            throw std::invalid_argument("boundary_sweep: direction dimension mismatch");
        const auto& v = dir.values();
        double norm1 = 0.0;
        for (double x : v) norm1 += x;
        std::vector<double> unit(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) unit[i] = v[i] / norm1;

        // inner boundary scale by bisection: theta * unit stays dominated
        double lo = 0.0, hi = 1.0;
        std::vector<double> probe(unit.size());
        for (int iter = 0; iter < 200 && hi - lo > 1e-9; ++iter) {
            const double mid = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < unit.size(); ++i) probe[i] = mid * unit[i];
            if (dominated_by_hull(probe, region))
                lo = mid;
            else
                hi = mid;
        }
        const double theta_in = lo;

        // outer boundary scale: nearest hyperplane crossing
        double theta_out = region.outer().sum_cap; // sum(theta * unit) = theta
        for (std::size_t i = 0; i < unit.size(); ++i)
            if (unit[i] > 0.0)
                theta_out = std::min(theta_out, region.outer().per_channel_cap[i] / unit[i]);

        SweepRow row;
        row.direction = v;
        row.inner_point.resize(unit.size());
        row.outer_point.resize(unit.size());
        row.sum_gap = 0.0;
        for (std::size_t i = 0; i < unit.size(); ++i) {
            row.inner_point[i] = theta_in * unit[i];
            row.outer_point[i] = theta_out * unit[i];
            row.sum_gap += row.outer_point[i] - row.inner_point[i];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace memsched
