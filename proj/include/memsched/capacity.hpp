#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "memsched/activation.hpp"
#include "memsched/channel.hpp"

namespace memsched {

// --- closed-form throughput quantities (symmetric channels) ---

// sum throughput of round robin over M symmetric channels:
//   c_M = P01 (1-(1-x)^M) / (x P10 + P01 (1-(1-x)^M))
double c_of_m(const ChannelParams& p, int m);

// limit of c_M as M -> infinity; also the per-channel sum-rate cap
double c_infinity(const ChannelParams& p);

// lower envelope c~_M = c_inf (1 - (1-x)^M), with c~_M <= c_M <= c_inf
double c_tilde(const ChannelParams& p, int m);

// bound on c_inf - c_M: c_inf (1-x)^M, decaying geometrically in M
double geometric_gap(const ChannelParams& p, int m);

// expected dwell E[L] = 1 + P01^(M)/P10 of one visit in a round of M channels
double expected_dwell(const ChannelParams& p, int m);

// --- region geometry ---

// per-channel throughput vector of RR(phi): active n gets
// (E[L_n]-1) / sum_active E[L_j], inactive channels get 0
std::vector<double> eta_vector(const ActivationVector& phi,
                               const std::vector<ChannelParams>& channels);

// expected round length chi_phi = sum_active E[L_n] of RR(phi)
double round_length_chi(std::uint64_t mask, const std::vector<ChannelParams>& channels);

struct OuterBound {
    std::vector<double> per_channel_cap; // pi_{n,ON}
    double sum_cap;                      // max_n c_{n,inf}
};

OuterBound outer_bound(const std::vector<ChannelParams>& channels);

// true iff lambda satisfies all N+1 outer hyperplanes (closed region)
bool outer_membership(const std::vector<double>& lambda,
                      const std::vector<ChannelParams>& channels);

// Inner-bound vertex set {eta^phi} over all 2^N - 1 activation vectors plus
// the outer hyperplanes.  N is capped at 16: the vertex set is exponential.
class RegionModel {
public:
    explicit RegionModel(std::vector<ChannelParams> channels);

    int n() const { return static_cast<int>(channels_.size()); }
    const std::vector<ChannelParams>& channels() const { return channels_; }
    const std::vector<std::vector<double>>& vertices() const { return vertices_; }
    std::uint64_t vertex_mask(std::size_t idx) const { return idx + 1; } // masks 1..2^N-1
    const OuterBound& outer() const { return outer_; }

private:
    std::vector<ChannelParams> channels_;
    std::vector<std::vector<double>> vertices_; // index mask-1
    OuterBound outer_;
};

enum class Membership { Inside, Boundary, Outside };

struct InnerMembership {
    Membership verdict;
    double slack; // max s with  sum_phi beta_phi eta^phi >= lambda + s, entrywise
    std::map<std::uint64_t, double> certificate; // nonzero beta weights, empty when outside
};

// Decide whether lambda is dominated by a convex combination of the vertices.
// |slack| <= 1e-9 classifies as Boundary.
InnerMembership inner_membership(const std::vector<double>& lambda, const RegionModel& region);

// --- mixture weights ---

enum class WeightKind : std::uint8_t {
    PerRoundSelection, // alpha: probability a round picks phi
    TimeFraction       // beta: long-run fraction of slots spent in RR(phi)
};

class MixtureWeights {
public:
    MixtureWeights(WeightKind kind, std::map<std::uint64_t, double> weights);

    WeightKind kind() const { return kind_; }
    const std::map<std::uint64_t, double>& weights() const { return weights_; }

private:
    WeightKind kind_;
    std::map<std::uint64_t, double> weights_;
};

// Closed-form conversions between per-round selection probabilities alpha and
// time fractions beta:  beta_k = alpha_k chi_k / sum_j alpha_j chi_j  and its
// inverse alpha_k proportional to beta_k / chi_k.
MixtureWeights beta_to_alpha(const MixtureWeights& beta, const std::vector<ChannelParams>& channels);
MixtureWeights alpha_to_beta(const MixtureWeights& alpha, const std::vector<ChannelParams>& channels);

// same conversions on raw (weight, round-length) vectors
std::vector<double> closed_beta_to_alpha(const std::vector<double>& beta,
                                         const std::vector<double>& chi);
std::vector<double> closed_alpha_to_beta(const std::vector<double>& alpha,
                                         const std::vector<double>& chi);

// --- user diversity and proximity ---

class DirectionVector {
public:
    explicit DirectionVector(std::vector<double> v);
    const std::vector<double>& values() const { return v_; }
    int n() const { return static_cast<int>(v_.size()); }

private:
    std::vector<double> v_;
};

// largest d such that v is a nonnegative combination of activation vectors
// with exactly d active channels (searched from N downward; always >= 1)
int user_diversity(const DirectionVector& v);

struct DiversityMixture {
    int d;
    double sum_throughput;  // c_{d(v)}
    MixtureWeights beta;    // normalized weights over Phi_d realizing v
};

// constructive mixture achieving sum throughput c_{d(v)} along direction v
// (symmetric channels)
DiversityMixture guaranteed_sum_throughput(const DirectionVector& v, const ChannelParams& symmetric);

// upper bound on the sum-throughput loss of the inner bound in direction v:
//   c_inf * min[ (1-x)^{d(v)}, pi_ON / max_n lambda_int_n - 1 ]
double proximity_gap(const DirectionVector& v, const std::vector<double>& lambda_int,
                     const ChannelParams& symmetric);

// --- boundary sweep ---

struct SweepRow {
    std::vector<double> direction;   // as given
    std::vector<double> inner_point; // boundary of the inner bound along v
    std::vector<double> outer_point; // boundary of the outer bound along v
    double sum_gap;                  // sum_n (outer_n - inner_n)
};

// Boundary points along each direction: the inner bound by bisection on the
// scale theta with lambda = theta v/|v|_1 (tolerance 1e-9, <= 200 iterations),
// the outer bound by the nearest hyperplane crossing.
std::vector<SweepRow> boundary_sweep(const RegionModel& region,
                                     const std::vector<DirectionVector>& directions);

} // namespace memsched
