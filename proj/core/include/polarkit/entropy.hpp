#pragma once

#include "polarkit/tables.hpp"

#include <map>
#include <span>
#include <string>

namespace polarkit {

/// Per-province polarization proxies, all in nats.
struct EntropyMeasures {
    double h_unweighted = 0.0;  // -sum p ln p
    double h_religiosity = 0.0; // -sum (p*r) ln (p*r)
    double h_political = 0.0;   // -sum (p*s) ln (p*s)
};

/// Shannon entropy of a vote-share distribution in nats, with 0 ln 0 := 0.
/// Shares must be nonnegative and sum to 1 within 1e-9; the result lies in
/// [0, ln n]. Accumulation is compensated so the value is independent of
/// platform summation quirks.
/// Throws InvalidDistribution.
double shannon_entropy(std::span<const double> shares);

/// Weighted variant: with q_i = p_i * w_i, returns -sum q_i ln q_i. The q_i
/// are deliberately NOT renormalized, so this is not the entropy of a
/// probability distribution; q_i = 0 terms contribute zero. Weights must lie
/// in [0,1]. With all weights 1 the result is bit-identical to
/// shannon_entropy on the same shares.
/// Throws LengthMismatch, WeightOutOfRange, InvalidDistribution.
double weighted_entropy(std::span<const double> shares, std::span<const double> weights);

/// Laakso-Taagepera effective number of parties, 1 / sum p_i^2. Provided as a
/// cross-check column only.
double effective_number_of_parties(std::span<const double> shares);

/// All three measures for every province in the election. Party terms are
/// accumulated in ascending party_id order. Every party appearing in the
/// election must have a profile (MissingProfile otherwise). The returned map
/// is ordered by canonical province name.
std::map<std::string, EntropyMeasures> province_entropies(const ElectionTable& elections,
                                                          const WeightTable& weights);

} // namespace polarkit
