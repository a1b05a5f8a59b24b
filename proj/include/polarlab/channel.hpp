#ifndef POLARLAB_CHANNEL_HPP
#define POLARLAB_CHANNEL_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polarlab {

/// Validation tolerance for probability vectors and row sums.
inline constexpr double kProbTol = 1e-12;

/// A discrete memoryless channel W: X -> Y stored as a row-stochastic
/// |X| x |Y| transition matrix, immutable after construction.
class Channel {
  public:
    Channel(std::size_t input_size, std::size_t output_size,
            std::vector<double> transitions,
            std::vector<std::string> output_labels = {});

    std::size_t input_size() const { return input_size_; }
    std::size_t output_size() const { return output_size_; }

    /// W(y|x)
    double prob(std::size_t x, std::size_t y) const {
        return transitions_[x * output_size_ + y];
    }
    std::span<const double> row(std::size_t x) const {
        return {transitions_.data() + x * output_size_, output_size_};
    }
    const std::vector<double>& transitions() const { return transitions_; }
    const std::vector<std::string>& output_labels() const { return output_labels_; }

  private:
    std::size_t input_size_;
    std::size_t output_size_;
    std::vector<double> transitions_;  // row-major
    std::vector<std::string> output_labels_;
};

/// A probability distribution over channel inputs.
class InputDist {
  public:
    explicit InputDist(std::vector<double> probs);
    static InputDist uniform(std::size_t n);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t x) const { return probs_[x]; }
    const std::vector<double>& probs() const { return probs_; }

  private:
    std::vector<double> probs_;
};

/// Summary of the standard single-channel information quantities.
/// Optimized capacity/cutoff are present when the input alphabet is small
/// enough for the simplex search; the binary-only fields are present for
/// binary-input channels.
struct ChannelReport {
    std::optional<double> capacity_bits;     // max over Q
    std::optional<double> cutoff_rate_bits;  // max over Q
    std::optional<double> bhattacharyya;     // binary-input only
    double symmetric_capacity = 0.0;
    double symmetric_cutoff = 0.0;
    std::optional<bool> is_symmetric;        // binary-input only
};

// Constructors for the standard channels.
Channel bsc(double crossover);
Channel bec(double erasure);  // outputs ordered {0, 1, ?}
Channel qec(double erasure);  // outputs ordered {0, 1, 2, 3, ?}

/// Mutual information C(W,Q) in bits per use; zero-probability terms drop.
double capacity(const Channel& w, const InputDist& q);

/// R0(W,Q) = -log2 sum_y [sum_x Q(x) sqrt(W(y|x))]^2.
double cutoff_rate(const Channel& w, const InputDist& q);

/// Z(W) = sum_y sqrt(W(y|0) W(y|1)); binary-input only.
double bhattacharyya(const Channel& w);

/// E0(rho, Q) = -log2 sum_y [sum_x Q(x) W(y|x)^{1/(1+rho)}]^{1+rho}, rho in [0,1].
double gallager_e0(const Channel& w, const InputDist& q, double rho);

/// max over rho in [0,1] of E0(rho,Q) - rho*R, located by ternary search on
/// the concave objective to |drho| <= 1e-9. If rho_star is non-null it
/// receives the maximizing rho (a diagnostic: the exponent leaves the
/// slope -1 region once rho_star drops below 1).
double random_coding_exponent(const Channel& w, const InputDist& q, double rate,
                              double* rho_star = nullptr);

enum class InputObjective { capacity, cutoff };

/// Maximize capacity or cutoff rate over the input simplex; |X| <= 4.
std::pair<InputDist, double> optimize_input(const Channel& w, InputObjective objective);

/// True iff some pairing permutation of outputs maps W(.|0) onto W(.|1);
/// binary-input only.
bool is_symmetric(const Channel& w);

double symmetric_capacity(const Channel& w);
double symmetric_cutoff(const Channel& w);

ChannelReport analyze(const Channel& w);

// JSON serialization: {"inputs": n, "outputs": m, "rows": [[...]]}.
std::string channel_to_json(const Channel& w);
Channel channel_from_json(const std::string& text);

}  // namespace polarlab

#endif
