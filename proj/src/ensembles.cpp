#include "polarlab/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace polarlab {

namespace {

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t guard) {
    std::size_t v = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (v > guard / base)
            throw std::invalid_argument("enumeration guard exceeded");
        v *= base;
    }
    return v;
}

void check_codewords(const BlockCode& code, const Channel& w) {
    if (code.codewords.empty()) throw std::invalid_argument("code has no codewords");
    for (const auto& cw : code.codewords) {
        if (cw.size() != code.length)
            throw std::invalid_argument("codeword length mismatch");
        for (std::uint8_t s : cw)
            if (s >= w.input_size())
                throw std::invalid_argument("codeword symbol outside the input alphabet");
    }
}

// likelihood of output vector y under codeword cw
double block_likelihood(const Channel& w, const std::vector<std::uint8_t>& cw,
                        const std::vector<std::size_t>& y) {
    double lik = 1.0;
    for (std::size_t i = 0; i < cw.size(); ++i) lik *= w.prob(cw[i], y[i]);
    return lik;
}

bool next_output(std::vector<std::size_t>& y, std::size_t alphabet) {
    for (std::size_t pos = 0; pos < y.size(); ++pos) {
        if (++y[pos] < alphabet) return true;
        y[pos] = 0;
    }
    return false;
}

double pairwise_error_raw(const Channel& w, const std::vector<std::uint8_t>& cm,
                          const std::vector<std::uint8_t>& cm2) {
    std::vector<std::size_t> y(cm.size(), 0);
    double total = 0.0;
    do {
        double lik = block_likelihood(w, cm, y);
        if (lik == 0.0) continue;
        if (block_likelihood(w, cm2, y) >= lik) total += lik;
    } while (next_output(y, w.output_size()));
    return total;
}

double z_product_raw(const Channel& w, const std::vector<std::uint8_t>& cm,
                     const std::vector<std::uint8_t>& cm2) {
    double prod = 1.0;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        double z = 0.0;
        for (std::size_t y = 0; y < w.output_size(); ++y)
            z += std::sqrt(w.prob(cm[i], y) * w.prob(cm2[i], y));
        prod *= z;
    }
    return prod;
}

}  // namespace

BlockCode BlockCode::from_generator(std::vector<std::vector<std::uint8_t>> g) {
    if (g.empty() || g[0].empty()) throw std::invalid_argument("empty generator matrix");
    std::size_t k = g.size(), n = g[0].size();
    for (const auto& row : g)
        if (row.size() != n) throw std::invalid_argument("ragged generator matrix");
    if (k > 20) throw std::invalid_argument("generator matrix too large to enumerate");
    BlockCode code;
    code.length = n;
    code.codewords.reserve(std::size_t{1} << k);
    for (std::size_t m = 0; m < (std::size_t{1} << k); ++m) {
        std::vector<std::uint8_t> cw(n, 0);
        for (std::size_t j = 0; j < k; ++j)
            if (m >> j & 1)
                for (std::size_t i = 0; i < n; ++i) cw[i] ^= g[j][i] & 1;
        code.codewords.push_back(std::move(cw));
    }
    code.generator = std::move(g);
    return code;
}

double BlockCode::rate() const {
    return std::log2(static_cast<double>(message_count())) / static_cast<double>(length);
}

double pairwise_error_exact(const BlockCode& code, const Channel& w, std::size_t m,
                            std::size_t m2) {
    check_codewords(code, w);
    if (m == m2) throw std::invalid_argument("pairwise error needs distinct message indices");
    if (m >= code.message_count() || m2 >= code.message_count())
        throw std::out_of_range("message index out of range");
    checked_pow(w.output_size(), code.length, kEnumerationGuard);
    return pairwise_error_raw(w, code.codewords[m], code.codewords[m2]);
}

double pairwise_z_product(const BlockCode& code, const Channel& w, std::size_t m,
                          std::size_t m2) {
    check_codewords(code, w);
    if (m >= code.message_count() || m2 >= code.message_count())
        throw std::out_of_range("message index out of range");
    return z_product_raw(w, code.codewords[m], code.codewords[m2]);
}

namespace {

// Enumerate a pair of i.i.d. Q codewords and average fn over the pair.
template <typename Fn>
double ensemble_average(std::size_t n, const Channel& w, const InputDist& q, Fn&& fn) {
    if (q.size() != w.input_size())
        throw std::invalid_argument("input distribution does not match channel");
    std::size_t singles = checked_pow(w.input_size(), n, kEnumerationGuard);
    // pairs times outputs must stay enumerable
    std::size_t pairs = singles > kEnumerationGuard / singles ? 0 : singles * singles;
    std::size_t outputs = checked_pow(w.output_size(), n, kEnumerationGuard);
    if (pairs == 0 || pairs > kEnumerationGuard / std::max<std::size_t>(outputs, 1))
        throw std::invalid_argument("enumeration guard exceeded");

    std::vector<std::vector<std::uint8_t>> words;
    std::vector<double> weights;
    words.reserve(singles);
    weights.reserve(singles);
    std::vector<std::uint8_t> cw(n, 0);
    while (true) {
        double wgt = 1.0;
        for (std::uint8_t s : cw) wgt *= q[s];
        words.push_back(cw);
        weights.push_back(wgt);
        std::size_t pos = 0;
        while (pos < n && ++cw[pos] == w.input_size()) cw[pos++] = 0;
        if (pos == n) break;
    }
    double total = 0.0;
    for (std::size_t a = 0; a < words.size(); ++a) {
        if (weights[a] == 0.0) continue;
        for (std::size_t b = 0; b < words.size(); ++b) {
            double wgt = weights[a] * weights[b];
            if (wgt == 0.0) continue;
            total += wgt * fn(words[a], words[b]);
        }
    }
    return total;
}

}  // namespace

double ensemble_pairwise_average(std::size_t n, const Channel& w, const InputDist& q) {
    if (n == 0) throw std::invalid_argument("block length must be positive");
    double avg = ensemble_average(n, w, q,
                                  [&](const auto& a, const auto& b) {
                                      return pairwise_error_raw(w, a, b);
                                  });
    double bound = std::exp2(-static_cast<double>(n) * cutoff_rate(w, q));
    if (avg > bound + 1e-9)
        throw std::logic_error("ensemble pairwise average exceeds its cutoff-rate bound");
    return avg;
}

double ensemble_z_product_average(std::size_t n, const Channel& w, const InputDist& q) {
    if (n == 0) throw std::invalid_argument("block length must be positive");
    return ensemble_average(n, w, q,
                            [&](const auto& a, const auto& b) {
                                return z_product_raw(w, a, b);
                            });
}

GuessworkReport guesswork_exact(const BlockCode& code, const Channel& w) {
    check_codewords(code, w);
    checked_pow(w.output_size(), code.length, kEnumerationGuard);
    std::size_t m_count = code.message_count();
    GuessworkReport report;
    std::vector<std::size_t> y(code.length, 0);
    std::vector<double> lik(m_count);
    double inv_m = 1.0 / static_cast<double>(m_count);
    do {
        for (std::size_t m = 0; m < m_count; ++m)
            lik[m] = block_likelihood(w, code.codewords[m], y);
        for (std::size_t m = 0; m < m_count; ++m) {
            if (lik[m] == 0.0) continue;
            std::size_t rank = 0, at_least = 0;
            for (std::size_t m2 = 0; m2 < m_count; ++m2) {
                if (m2 == m) continue;
                if (lik[m2] > lik[m] || (lik[m2] == lik[m] && m2 < m)) ++rank;
                if (lik[m2] >= lik[m]) ++at_least;
            }
            report.expected_guesswork += inv_m * lik[m] * static_cast<double>(rank);
            report.pairwise_sum += inv_m * lik[m] * static_cast<double>(at_least);
        }
    } while (next_output(y, w.output_size()));
    if (report.expected_guesswork > report.pairwise_sum + 1e-9)
        throw std::logic_error("guesswork exceeded its pairwise-error sum");
    return report;
}

double SchemeReport::at(const std::string& name) const {
    for (const auto& [key, value] : values)
        if (key == name) return value;
    throw std::out_of_range("scheme report has no entry named " + name);
}

std::string SchemeReport::to_json() const {
    nlohmann::ordered_json j;
    j["scheme"] = scheme;
    nlohmann::ordered_json vals;
    for (const auto& [key, value] : values) vals[key] = value;
    j["values"] = std::move(vals);
    return j.dump(2);
}

SchemeReport massey_split(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("erasure probability must lie in [0,1]");
    double c_qec = 2.0 * (1.0 - eps);
    double r0_qec = std::log2(4.0 / (1.0 + 3.0 * eps));
    double c_bec = 1.0 - eps;
    double r0_bec = std::log2(2.0 / (1.0 + eps));

    // the closed forms must agree with the generic channel computations
    Channel q4 = qec(eps);
    Channel b2 = bec(eps);
    InputDist u4 = InputDist::uniform(4), u2 = InputDist::uniform(2);
    if (std::abs(capacity(q4, u4) - c_qec) > 1e-10 ||
        std::abs(cutoff_rate(q4, u4) - r0_qec) > 1e-10 ||
        std::abs(capacity(b2, u2) - c_bec) > 1e-10 ||
        std::abs(cutoff_rate(b2, u2) - r0_bec) > 1e-10)
        throw std::logic_error("closed-form channel quantities disagree with numerics");

    SchemeReport report;
    report.scheme = "massey_qec_split";
    report.values = {
        {"eps", eps},
        {"qec_capacity", c_qec},
        {"qec_cutoff", r0_qec},
        {"bec_capacity_each", c_bec},
        {"bec_cutoff_each", r0_bec},
        {"split_capacity_total", 2.0 * c_bec},
        {"split_cutoff_total", 2.0 * r0_bec},
        {"cutoff_gain", 2.0 * r0_bec - r0_qec},
    };
    return report;
}

namespace {

double binary_cutoff(double p) {
    return 1.0 - std::log2(1.0 + 2.0 * std::sqrt(p * (1.0 - p)));
}

bool full_rank_gf2(const std::vector<std::uint32_t>& rows) {
    std::uint32_t pivot[32] = {0};
    std::size_t rank = 0;
    for (std::uint32_t row : rows) {
        for (int bit = 31; bit >= 0 && row; --bit) {
            if (!(row >> bit & 1)) continue;
            if (pivot[bit]) {
                row ^= pivot[bit];
            } else {
                pivot[bit] = row;
                row = 0;
                ++rank;
            }
        }
    }
    return rank == rows.size();
}

}  // namespace

SchemeReport pinsker_analysis(const std::vector<std::vector<std::uint8_t>>& g, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("crossover probability must lie in [0,1]");
    if (g.empty() || g[0].empty()) throw std::invalid_argument("empty generator matrix");
    std::size_t k = g.size(), n = g[0].size();
    if (k > 10 || n > 14)
        throw std::invalid_argument("generator exceeds the exact-enumeration guard (10 x 14)");
    std::vector<std::uint32_t> row_masks(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
        if (g[j].size() != n) throw std::invalid_argument("ragged generator matrix");
        for (std::size_t i = 0; i < n; ++i)
            if (g[j][i] & 1) row_masks[j] |= std::uint32_t{1} << i;
    }
    if (!full_rank_gf2(row_masks)) throw std::invalid_argument("generator matrix is rank-deficient");

    std::size_t m_count = std::size_t{1} << k;
    std::vector<std::uint32_t> cw(m_count, 0);
    for (std::size_t m = 0; m < m_count; ++m)
        for (std::size_t j = 0; j < k; ++j)
            if (m >> j & 1) cw[m] ^= row_masks[j];

    // All-zero codeword transmitted; exact ML over every channel output.
    // Likelihood p^d (1-p)^(n-d) is ordered by distance d alone, so compare
    // distances; ties go to the lower message index.
    double pe = 0.0;
    std::vector<double> pbit(k, 0.0);
    bool flip = p > 0.5;  // for p > 1/2 larger distance is more likely
    for (std::uint32_t y = 0; y < (std::uint32_t{1} << n); ++y) {
        std::size_t best = 0;
        int best_d = std::popcount(cw[0] ^ y);
        if (p != 0.5) {
            for (std::size_t m = 1; m < m_count; ++m) {
                int d = std::popcount(cw[m] ^ y);
                if (flip ? d > best_d : d < best_d) {
                    best = m;
                    best_d = d;
                }
            }
        }
        int weight = std::popcount(y);
        double prob = std::pow(p, weight) * std::pow(1.0 - p, static_cast<int>(n) - weight);
        if (prob == 0.0) continue;
        if (best != 0) pe += prob;
        for (std::size_t j = 0; j < k; ++j)
            if (best >> j & 1) pbit[j] += prob;
    }

    double r0_frame = binary_cutoff(pe);
    SchemeReport report;
    report.scheme = "pinsker_inner_code";
    report.values = {
        {"crossover", p},
        {"inner_k", static_cast<double>(k)},
        {"inner_n", static_cast<double>(n)},
        {"inner_rate", static_cast<double>(k) / static_cast<double>(n)},
        {"frame_error", pe},
        {"cutoff_at_frame_error", r0_frame},
    };
    double aggregate = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double r0_bit = binary_cutoff(pbit[j]);
        if (r0_bit < r0_frame - 1e-12)
            throw std::logic_error("per-coordinate cutoff fell below the frame cutoff");
        report.values.emplace_back("bit_error_" + std::to_string(j + 1), pbit[j]);
        report.values.emplace_back("cutoff_bit_" + std::to_string(j + 1), r0_bit);
        aggregate += r0_bit;
    }
    report.values.emplace_back("aggregate_cutoff", aggregate);
    report.values.emplace_back("normalized_rate_cutoff",
                               static_cast<double>(k) / static_cast<double>(n) * r0_frame);
    return report;
}

UnionBoundReport union_bound(std::size_t n, double rate, const Channel& w,
                             const InputDist& q) {
    if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");
    UnionBoundReport report;
    report.value = std::exp2(-static_cast<double>(n) * (cutoff_rate(w, q) - rate));
    report.vacuous = report.value >= 1.0;
    return report;
}

}  // namespace polarlab
