#ifndef POLARLAB_ENSEMBLES_HPP
#define POLARLAB_ENSEMBLES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polarlab/channel.hpp"

namespace polarlab {

/// Enumeration guard for exhaustive output sums.
inline constexpr std::size_t kEnumerationGuard = std::size_t{1} << 22;

/// A block code over a channel input alphabet, listed codeword by codeword.
struct BlockCode {
    std::size_t length = 0;                          // N
    std::vector<std::vector<std::uint8_t>> codewords;  // M x N input symbols
    std::vector<std::vector<std::uint8_t>> generator;  // optional, GF(2)

    /// Enumerate the 2^K codewords spanned by a binary generator matrix;
    /// message bit j (least significant first) selects row j.
    static BlockCode from_generator(std::vector<std::vector<std::uint8_t>> g);

    std::size_t message_count() const { return codewords.size(); }
    double rate() const;
};

/// Exact probability, under transmission of codeword m, that codeword m2
/// looks at least as likely to a maximum-likelihood decoder; computed by
/// full output enumeration.
double pairwise_error_exact(const BlockCode& code, const Channel& w, std::size_t m,
                            std::size_t m2);

/// Product over positions of the per-letter Bhattacharyya overlap between
/// the two codewords; upper-bounds pairwise_error_exact.
double pairwise_z_product(const BlockCode& code, const Channel& w, std::size_t m,
                          std::size_t m2);

/// Exact average of pairwise_error_exact over a pair of independent
/// Q-i.i.d. codewords of length n.
double ensemble_pairwise_average(std::size_t n, const Channel& w, const InputDist& q);

/// Exact average of pairwise_z_product over the same ensemble; factorizes
/// into [sum_y (sum_x Q(x) sqrt(W(y|x)))^2]^n.
double ensemble_z_product_average(std::size_t n, const Channel& w, const InputDist& q);

struct GuessworkReport {
    double expected_guesswork = 0.0;  // E[G0] under ML guessing order
    double pairwise_sum = 0.0;        // (1/M) sum_m sum_{m'!=m} P_{m,m'}
};

/// Average number of incorrect guesses a maximum-likelihood-ordered guessing
/// decoder makes before hitting the transmitted message (uniform messages);
/// ties in the guessing order go to the lower message index.
GuessworkReport guesswork_exact(const BlockCode& code, const Channel& w);

/// Named scalar results of a scheme analysis.
struct SchemeReport {
    std::string scheme;
    std::vector<std::pair<std::string, double>> values;

    double at(const std::string& name) const;
    std::string to_json() const;
};

/// Quaternary-erasure-channel splitting: capacity and cutoff rate of the
/// QEC against the totals of the two fully-correlated binary erasure
/// channels obtained by relabeling; closed forms are cross-checked against
/// the numeric channel quantities.
SchemeReport massey_split(double eps);

/// Concatenated-scheme inner-code analysis on a BSC: exact ML frame and
/// per-coordinate bit error rates of the linear code spanned by g
/// (all-zero codeword transmitted, valid by linearity and symmetry), the
/// per-coordinate cutoff rates they induce, and the aggregate.
SchemeReport pinsker_analysis(const std::vector<std::vector<std::uint8_t>>& g, double p);

struct UnionBoundReport {
    double value = 0.0;
    bool vacuous = false;  // bound >= 1 carries no information
};

/// 2^{-n (R0(Q) - R)}.
UnionBoundReport union_bound(std::size_t n, double rate, const Channel& w,
                             const InputDist& q);

}  // namespace polarlab

#endif
