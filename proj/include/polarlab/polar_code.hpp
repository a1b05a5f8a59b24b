#ifndef POLARLAB_POLAR_CODE_HPP
#define POLARLAB_POLAR_CODE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polarlab/channel.hpp"
#include "polarlab/polarize.hpp"

namespace polarlab {

/// A polar code: block length N = 2^level, active (data-carrying) index set,
/// the fixed pattern for the frozen positions, and the per-index quality
/// scores the construction was based on.
struct PolarCodeSpec {
    int level = 0;
    std::vector<std::size_t> active;        // 1-based, sorted ascending
    std::vector<std::uint8_t> frozen_pattern;  // one bit per frozen index, ascending
    std::vector<double> scores;             // length N

    std::size_t block_length() const { return std::size_t{1} << level; }
    std::size_t dimension() const { return active.size(); }
    double rate() const {
        return static_cast<double>(dimension()) / static_cast<double>(block_length());
    }
};

/// Butterfly evaluation of x = u F, F = [[1,0],[1,1]]^(kron n); O(N log N),
/// self-inverse over GF(2). Length must be a power of two.
std::vector<std::uint8_t> polar_transform(std::vector<std::uint8_t> u);

/// Dense transform matrix, level <= 10.
std::vector<std::vector<std::uint8_t>> transform_matrix(int level);

/// Select the K best (smallest-score) indices as the active set; ties go to
/// the larger index. The frozen pattern is assigned to frozen indices in
/// ascending order.
PolarCodeSpec construct(const std::vector<double>& scores, std::size_t k,
                        std::vector<std::uint8_t> frozen_pattern = {});
PolarCodeSpec construct(const ZProfile& profile, std::size_t k,
                        std::vector<std::uint8_t> frozen_pattern = {});
PolarCodeSpec construct(const BecProfile& profile, std::size_t k,
                        std::vector<std::uint8_t> frozen_pattern = {});

std::vector<std::uint8_t> encode(const PolarCodeSpec& code,
                                 std::span<const std::uint8_t> data);

/// Channel observations for one block: either output symbol indices or
/// per-position likelihood pairs (W(y|0), W(y|1)).
class ReceivedBlock {
  public:
    static ReceivedBlock from_symbols(std::vector<std::size_t> symbols);
    static ReceivedBlock from_likelihoods(std::vector<std::array<double, 2>> pairs);

    std::size_t length() const;
    bool has_symbols() const { return !symbols_.empty(); }
    const std::vector<std::size_t>& symbols() const { return symbols_; }
    const std::vector<std::array<double, 2>>& likelihoods() const { return pairs_; }

  private:
    std::vector<std::size_t> symbols_;
    std::vector<std::array<double, 2>> pairs_;
};

struct ScDecodeResult {
    std::vector<std::uint8_t> data;  // decisions at active positions
    std::vector<std::uint8_t> u;     // all N input decisions
};

/// Successive-cancellation decoding with exact log-domain likelihoods.
/// Frozen positions are forced to the pattern; active positions decide 0
/// iff the likelihood ratio favors 0 strictly (ties decide 1).
ScDecodeResult sc_decode(const PolarCodeSpec& code, const ReceivedBlock& rx,
                         const Channel& w);

struct UnionBoundValue {
    double raw = 0.0;      // sum of active-index scores
    double clipped = 0.0;  // min(raw, 1)
};

UnionBoundValue fer_union_bound(const PolarCodeSpec& code);

// JSON: {"n":..., "active":[...], "frozen_pattern":[...], "scores":[...]}.
std::string code_to_json(const PolarCodeSpec& code);
PolarCodeSpec code_from_json(const std::string& text);

}  // namespace polarlab

#endif
