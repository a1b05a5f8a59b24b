#include "polarlab/polar_code.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace polarlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate_code(const PolarCodeSpec& code) {
    if (code.level < 0 || code.level > 30)
        throw std::invalid_argument("code level must lie in 0..30");
    std::size_t n = code.block_length();
    std::size_t k = code.active.size();
    if (code.frozen_pattern.size() != n - k)
        throw std::invalid_argument("frozen pattern length must be N - K");
    if (!code.scores.empty() && code.scores.size() != n)
        throw std::invalid_argument("score vector length must be N");
    std::size_t prev = 0;
    for (std::size_t idx : code.active) {
        if (idx < 1 || idx > n || idx <= prev)
            throw std::invalid_argument("active set must be sorted 1-based indices in 1..N");
        prev = idx;
    }
}

}  // namespace

std::vector<std::uint8_t> polar_transform(std::vector<std::uint8_t> u) {
    std::size_t n = u.size();
    if (!is_power_of_two(n))
        throw std::invalid_argument("transform length must be a power of two");
    for (std::size_t size = 2; size <= n; size <<= 1) {
        std::size_t half = size >> 1;
        for (std::size_t block = 0; block < n; block += size)
            for (std::size_t j = 0; j < half; ++j)
                u[block + j] ^= u[block + half + j];
    }
    return u;
}

std::vector<std::vector<std::uint8_t>> transform_matrix(int level) {
    if (level < 0 || level > 10)
        throw std::invalid_argument("transform matrix supports levels 0..10");
    std::size_t n = std::size_t{1} << level;
    std::vector<std::vector<std::uint8_t>> f(n, std::vector<std::uint8_t>(n, 0));
    f[0][0] = 1;
    for (std::size_t size = 1; size < n; size <<= 1) {
        // [[F, 0], [F, F]]
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j) {
                f[size + i][j] = f[i][j];
                f[size + i][size + j] = f[i][j];
            }
    }
    return f;
}

PolarCodeSpec construct(const std::vector<double>& scores, std::size_t k,
                        std::vector<std::uint8_t> frozen_pattern) {
    std::size_t n = scores.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("score vector length must be 2^n");
    if (k > n) throw std::out_of_range("code dimension exceeds block length");
    for (double s : scores)
        if (!(s >= 0.0 && s <= 1.0))
            throw std::invalid_argument("scores must lie in [0,1]");
    if (frozen_pattern.empty()) frozen_pattern.assign(n - k, 0);
    if (frozen_pattern.size() != n - k)
        throw std::invalid_argument("frozen pattern length must be N - K");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a > b;  // ties go to the larger index
    });
    std::vector<std::size_t> active(order.begin(), order.begin() + k);
    std::sort(active.begin(), active.end());
    for (std::size_t& idx : active) ++idx;  // 1-based

    PolarCodeSpec code;
    code.level = static_cast<int>(std::log2(static_cast<double>(n)) + 0.5);
    code.active = std::move(active);
    code.frozen_pattern = std::move(frozen_pattern);
    code.scores = scores;
    return code;
}

PolarCodeSpec construct(const ZProfile& profile, std::size_t k,
                        std::vector<std::uint8_t> frozen_pattern) {
    return construct(profile.z, k, std::move(frozen_pattern));
}

PolarCodeSpec construct(const BecProfile& profile, std::size_t k,
                        std::vector<std::uint8_t> frozen_pattern) {
    return construct(profile.eps, k, std::move(frozen_pattern));
}

std::vector<std::uint8_t> encode(const PolarCodeSpec& code,
                                 std::span<const std::uint8_t> data) {
    validate_code(code);
    if (data.size() != code.dimension())
        throw std::invalid_argument("data length must equal the code dimension");
    std::size_t n = code.block_length();
    std::vector<std::uint8_t> u(n, 0);
    std::vector<bool> is_active(n, false);
    std::size_t di = 0;
    for (std::size_t idx : code.active) {
        is_active[idx - 1] = true;
        u[idx - 1] = data[di++] & 1;
    }
    std::size_t fi = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!is_active[i]) u[i] = code.frozen_pattern[fi++] & 1;
    return polar_transform(std::move(u));
}

ReceivedBlock ReceivedBlock::from_symbols(std::vector<std::size_t> symbols) {
    if (symbols.empty()) throw std::invalid_argument("empty received block");
    ReceivedBlock rx;
    rx.symbols_ = std::move(symbols);
    return rx;
}

ReceivedBlock ReceivedBlock::from_likelihoods(std::vector<std::array<double, 2>> pairs) {
    if (pairs.empty()) throw std::invalid_argument("empty received block");
    for (const auto& pr : pairs) {
        if (!(pr[0] >= 0.0) || !(pr[1] >= 0.0))
            throw std::invalid_argument("likelihoods must be nonnegative");
        if (pr[0] == 0.0 && pr[1] == 0.0)
            throw std::invalid_argument("likelihood pair cannot be all zero");
    }
    ReceivedBlock rx;
    rx.pairs_ = std::move(pairs);
    return rx;
}

std::size_t ReceivedBlock::length() const {
    return has_symbols() ? symbols_.size() : pairs_.size();
}

namespace {

struct LogPair {
    double v[2];
};

// log2(2^a + 2^b); symmetric in its arguments bit-for-bit.
double log2_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

LogPair combine_noise(const LogPair& a, const LogPair& b) {
    return {{log2_add(a.v[0] + b.v[0], a.v[1] + b.v[1]) - 1.0,
             log2_add(a.v[1] + b.v[0], a.v[0] + b.v[1]) - 1.0}};
}

LogPair combine_known(const LogPair& a, const LogPair& b, std::uint8_t u) {
    return {{a.v[u] + b.v[0] - 1.0, a.v[u ^ 1] + b.v[1] - 1.0}};
}

struct Decoder {
    const std::vector<std::uint8_t>& is_frozen;   // per position
    const std::vector<std::uint8_t>& forced_bit;  // valid where frozen
    std::vector<std::uint8_t>& u_hat;
    bool any_active_decided = false;

    // Decodes positions [base, base+len), writing the block's transform bits
    // into xout[0..len). `pairs` holds the block's symbol likelihoods.
    void run(const LogPair* pairs, std::size_t len, std::size_t base,
             std::uint8_t* xout, LogPair* work) {
        if (len == 1) {
            const LogPair& p = *pairs;
            std::uint8_t bit;
            if (is_frozen[base]) {
                bit = forced_bit[base];
                // Zero likelihood on a forced bit proves the input corrupt
                // only while every earlier decision was itself forced; after
                // the first fallible data decision it is ordinary error
                // propagation and decoding continues.
                if (!any_active_decided && p.v[bit] == kNegInf)
                    throw std::runtime_error(
                        "zero likelihood at a frozen position: corrupted input");
            } else {
                bit = p.v[0] > p.v[1] ? 0 : 1;  // tie decides 1
                if (!any_active_decided && p.v[0] == kNegInf && p.v[1] == kNegInf)
                    throw std::runtime_error("received block has zero likelihood");
                any_active_decided = true;
            }
            u_hat[base] = bit;
            xout[0] = bit;
            return;
        }
        std::size_t half = len >> 1;
        LogPair* child = work;
        for (std::size_t j = 0; j < half; ++j)
            child[j] = combine_noise(pairs[j], pairs[half + j]);
        run(child, half, base, xout, work + half);
        for (std::size_t j = 0; j < half; ++j)
            child[j] = combine_known(pairs[j], pairs[half + j], xout[j]);
        run(child, half, base + half, xout + half, work + half);
        for (std::size_t j = 0; j < half; ++j) xout[j] ^= xout[half + j];
    }
};

}  // namespace

ScDecodeResult sc_decode(const PolarCodeSpec& code, const ReceivedBlock& rx,
                         const Channel& w) {
    validate_code(code);
    if (w.input_size() != 2)
        throw std::invalid_argument("successive cancellation requires a binary-input channel");
    std::size_t n = code.block_length();
    if (rx.length() != n)
        throw std::invalid_argument("received block length must equal the block length");

    std::vector<LogPair> leaves(n);
    if (rx.has_symbols()) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t y = rx.symbols()[i];
            if (y >= w.output_size())
                throw std::invalid_argument("received symbol outside the output alphabet");
            leaves[i] = {{std::log2(w.prob(0, y)), std::log2(w.prob(1, y))}};
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pr = rx.likelihoods()[i];
            leaves[i] = {{std::log2(pr[0]), std::log2(pr[1])}};
        }
    }

    std::vector<std::uint8_t> is_frozen(n, 1), forced(n, 0);
    for (std::size_t idx : code.active) is_frozen[idx - 1] = 0;
    std::size_t fi = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (is_frozen[i]) forced[i] = code.frozen_pattern[fi++] & 1;

    std::vector<std::uint8_t> u_hat(n, 0), x(n, 0);
    std::vector<LogPair> scratch(n);
    Decoder dec{is_frozen, forced, u_hat};
    dec.run(leaves.data(), n, 0, x.data(), scratch.data());

    ScDecodeResult result;
    result.u = std::move(u_hat);
    result.data.reserve(code.dimension());
    for (std::size_t idx : code.active) result.data.push_back(result.u[idx - 1]);
    return result;
}

UnionBoundValue fer_union_bound(const PolarCodeSpec& code) {
    validate_code(code);
    if (code.scores.empty())
        throw std::invalid_argument("code spec carries no scores");
    UnionBoundValue b;
    for (std::size_t idx : code.active) b.raw += code.scores[idx - 1];
    b.clipped = std::min(1.0, b.raw);
    return b;
}

std::string code_to_json(const PolarCodeSpec& code) {
    nlohmann::ordered_json j;
    j["n"] = code.level;
    j["active"] = code.active;
    j["frozen_pattern"] = code.frozen_pattern;
    j["scores"] = code.scores;
    return j.dump(2);
}

PolarCodeSpec code_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PolarCodeSpec code;
    code.level = j.at("n").get<int>();
    code.active = j.at("active").get<std::vector<std::size_t>>();
    code.frozen_pattern = j.at("frozen_pattern").get<std::vector<std::uint8_t>>();
    code.scores = j.at("scores").get<std::vector<double>>();
    validate_code(code);
    return code;
}

}  // namespace polarlab
