#ifndef POLARLAB_POLARIZE_HPP
#define POLARLAB_POLARIZE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polarlab/channel.hpp"

namespace polarlab {

/// Largest output alphabet exact synthesis will materialize.
inline constexpr std::size_t kSynthesisAlphabetGuard = std::size_t{1} << 22;

/// An exactly synthesized bit-channel together with its construction path.
/// `branch` is a string over {-,+} applied left to right; `index` is the
/// 1-based position in 1..2^n, where a '-' step maps i to 2i-1 and a '+'
/// step maps i to 2i.
struct SynthChannel {
    Channel channel;
    std::string branch;
    std::size_t index = 1;
};

/// Erasure probabilities of the 2^n bit-channels of an erasure channel.
struct BecProfile {
    int level = 0;
    std::vector<double> eps;
};

/// Bhattacharyya upper bounds for the 2^n bit-channels of a binary-input
/// channel; exact when the root channel is an erasure channel.
struct ZProfile {
    int level = 0;
    std::vector<double> z;
};

enum class OutputMerge {
    keep,      // keep every composite output symbol distinct
    lossless,  // merge outputs with identical likelihood ratio
};

/// One channel-combining step: returns the pair (worse, better) of
/// bit-channels carved out of two independent uses of w. The first output
/// alphabet is Y^2 (index y1*|Y|+y2); the second is Y^2 x {0,1}
/// (index (y1*|Y|+y2)*2 + u1).
std::pair<Channel, Channel> polar_pair(const Channel& w);

/// Collapse output symbols whose likelihood ratios W(y|0):W(y|1) coincide;
/// preserves symmetric capacity and the Bhattacharyya parameter.
Channel merge_equivalent_outputs(const Channel& w);

std::string branch_of_index(int level, std::size_t index);

/// Exact recursive synthesis of bit-channel `index` at depth `level`.
/// Fails if any intermediate output alphabet would exceed the guard.
SynthChannel synthesize_bit_channel(const Channel& w, int level, std::size_t index,
                                    OutputMerge merge = OutputMerge::keep);

/// Closed-form erasure recursion e -> (2e - e^2, e^2), level <= 25.
BecProfile bec_polarize(double eps, int level);

/// Bhattacharyya bound recursion z -> (2z - z^2, z^2), level <= 25.
ZProfile z_bound_recursion(double z0, int level);

enum class ScoreKind {
    rate,   // good means > 1 - delta
    noise,  // good means < delta (Z or erasure values)
};

struct PolarizationStats {
    double good_fraction = 0.0;
    double bad_fraction = 0.0;
    double middling_fraction = 0.0;
    std::size_t good_count = 0;
    std::size_t bad_count = 0;
    std::size_t middling_count = 0;
};

PolarizationStats polarization_stats(std::span<const double> values, double delta,
                                     ScoreKind kind);

/// (1/N) sum_i (1 - log2(1 + Z_i)).
double normalized_cutoff(const ZProfile& profile);
double normalized_cutoff(const BecProfile& profile);
double normalized_cutoff(std::span<const SynthChannel> channels);

}  // namespace polarlab

#endif
