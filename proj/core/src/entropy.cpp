#include "polarkit/entropy.hpp"

#include "polarkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace polarkit {

namespace {

constexpr double kSumTolerance = 1e-9;

// Kahan-compensated sum over terms sorted ascending, so the result depends
// only on the multiset of values: permutation-invariant bit-for-bit and
// platform-deterministic.
double compensated_sorted_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    double comp = 0.0;
    for (double term : terms) {
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double neg_q_ln_q_sum(std::span<const double> q) {
    std::vector<double> terms;
    terms.reserve(q.size());
    for (double qi : q) {
        if (qi <= 0.0) continue; // 0 ln 0 := 0
        terms.push_back(-qi * std::log(qi));
    }
    return compensated_sorted_sum(std::move(terms));
}

void check_distribution(std::span<const double> shares) {
    for (double p : shares)
        if (p < 0.0)
            throw Error(errc::invalid_distribution, "negative share " + std::to_string(p));
    const double sum = compensated_sorted_sum({shares.begin(), shares.end()});
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw Error(errc::invalid_distribution,
                    "shares sum to " + std::to_string(sum) + ", expected 1 within 1e-9");
}

} // namespace

double shannon_entropy(std::span<const double> shares) {
    check_distribution(shares);
    return neg_q_ln_q_sum(shares);
}

double weighted_entropy(std::span<const double> shares, std::span<const double> weights) {
    if (shares.size() != weights.size())
        throw Error(errc::length_mismatch,
                    std::to_string(shares.size()) + " shares vs " +
                        std::to_string(weights.size()) + " weights");
    for (double w : weights)
        if (!(w >= 0.0 && w <= 1.0))
            throw Error(errc::weight_out_of_range, "weight " + std::to_string(w) + " outside [0,1]");
    check_distribution(shares);

    std::vector<double> q(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) q[i] = shares[i] * weights[i];
    return neg_q_ln_q_sum(q);
}

double effective_number_of_parties(std::span<const double> shares) {
    check_distribution(shares);
    double hh = 0.0;
    for (double p : shares) hh += p * p;
    return hh > 0.0 ? 1.0 / hh : 0.0;
}

std::map<std::string, EntropyMeasures> province_entropies(const ElectionTable& elections,
                                                          const WeightTable& weights) {
    std::map<std::string, EntropyMeasures> out;
    for (const auto& [province, votes] : elections.rows) {
        auto shares = votes.shares;
        std::sort(shares.begin(), shares.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::vector<double> p, r, s;
        p.reserve(shares.size());
        r.reserve(shares.size());
        s.reserve(shares.size());
        for (const auto& [party, share] : shares) {
            auto it = weights.rows.find(party);
            if (it == weights.rows.end())
                throw Error(errc::missing_profile,
                            "party '" + party + "' has votes in province '" + province +
                                "' but no weight row");
            p.push_back(share);
            r.push_back(it->second.religiosity);
            s.push_back(it->second.political);
        }

        EntropyMeasures m;
        m.h_unweighted = shannon_entropy(p);
        m.h_religiosity = weighted_entropy(p, r);
        m.h_political = weighted_entropy(p, s);
        out.emplace(province, m);
    }
    return out;
}

} // namespace polarkit
