#ifndef POLARLAB_SIM_HPP
#define POLARLAB_SIM_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polarlab/channel.hpp"
#include "polarlab/polar_code.hpp"

namespace polarlab {

struct SimConfig {
    PolarCodeSpec code;
    Channel channel;
    std::uint64_t trials = 0;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
    std::uint64_t early_stop_frame_errors = 0;  // 0 disables early stopping
    std::string channel_name;                   // echoed into reports
    double channel_param = 0.0;
};

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

struct SimReport {
    std::uint64_t trials_requested = 0;
    std::uint64_t trials_run = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
    double fer = 0.0;
    double ber = 0.0;
    ConfidenceInterval fer_ci;  // 95%
    ConfidenceInterval ber_ci;  // 95%
    double union_bound = 0.0;
    bool early_stopped = false;
    double wall_time_s = 0.0;
    // config echo
    std::string channel_name;
    double channel_param = 0.0;
    std::size_t block_length = 0;
    std::size_t dimension = 0;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;

    std::string to_json() const;
};

/// Seeded Monte Carlo transmission experiment: random data, polar encoding,
/// channel sampling, successive-cancellation decoding. Per-trial randomness
/// is derived from (master_seed, trial index), so the statistics are
/// identical for any worker count.
SimReport run_sim(const SimConfig& cfg);

struct SweepRow {
    SimConfig config;
    std::optional<SimReport> report;
    std::string error;  // empty on success
};

/// Run one simulation per grid point; per-point failures are recorded in the
/// row instead of aborting the sweep.
std::vector<SweepRow> sweep(const std::vector<SimConfig>& grid);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// 95% interval for k successes in n trials: normal approximation for
/// k >= 10, exact Clopper-Pearson otherwise.
ConfidenceInterval proportion_ci(std::uint64_t k, std::uint64_t n);

}  // namespace polarlab

#endif
