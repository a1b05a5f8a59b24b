#include "polarlab/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "polarlab/rng.hpp"

namespace polarlab {

namespace {

// --- regularized incomplete beta, for Clopper-Pearson intervals ---

double beta_cont_fraction(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cont_fraction(a, b, x) / a;
    return 1.0 - bt * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double beta_inv(double p, double a, double b) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (betai(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ConfidenceInterval clopper_pearson(std::uint64_t k, std::uint64_t n) {
    const double alpha = 0.05;
    ConfidenceInterval ci;
    double dk = static_cast<double>(k), dn = static_cast<double>(n);
    ci.low = k == 0 ? 0.0 : beta_inv(alpha / 2.0, dk, dn - dk + 1.0);
    ci.high = k == n ? 1.0 : beta_inv(1.0 - alpha / 2.0, dk + 1.0, dn - dk);
    return ci;
}

}  // namespace

ConfidenceInterval proportion_ci(std::uint64_t k, std::uint64_t n) {
    if (n == 0) return {0.0, 0.0};
    if (k < 10) return clopper_pearson(k, n);
    double p = static_cast<double>(k) / static_cast<double>(n);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - 1.96 * se), std::min(1.0, p + 1.96 * se)};
}

namespace {

struct TrialCounts {
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
};

class TrialRunner {
  public:
    TrialRunner(const SimConfig& cfg) : cfg_(cfg) {
        const Channel& w = cfg.channel;
        if (w.input_size() != 2)
            throw std::invalid_argument("simulation requires a binary-input channel");
        std::size_t m = w.output_size();
        row_cdf_.resize(2 * m);
        for (std::size_t x = 0; x < 2; ++x) {
            double acc = 0.0;
            for (std::size_t y = 0; y < m; ++y) {
                acc += w.prob(x, y);
                row_cdf_[x * m + y] = acc;
            }
        }
    }

    // runs trials [first, last), accumulating into counts
    void run_range(std::uint64_t first, std::uint64_t last, TrialCounts& counts) const {
        std::size_t n = cfg_.code.block_length();
        std::size_t k = cfg_.code.dimension();
        std::size_t m = cfg_.channel.output_size();
        std::vector<std::uint8_t> data(k);
        std::vector<std::size_t> y(n);
        for (std::uint64_t t = first; t < last; ++t) {
            CounterRng rng(cfg_.master_seed, t);
            for (std::size_t i = 0; i < k; ++i) data[i] = rng.next_bit();
            std::vector<std::uint8_t> x = encode(cfg_.code, data);
            for (std::size_t i = 0; i < n; ++i) {
                double u = rng.next_unit();
                const double* cdf = row_cdf_.data() + x[i] * m;
                std::size_t sym = 0;
                while (sym + 1 < m && u >= cdf[sym]) ++sym;
                y[i] = sym;
            }
            auto decoded = sc_decode(cfg_.code, ReceivedBlock::from_symbols(y), cfg_.channel);
            std::uint64_t wrong = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (decoded.data[i] != data[i]) ++wrong;
            ++counts.frames;
            if (wrong > 0) ++counts.frame_errors;
            counts.bit_errors += wrong;
        }
    }

  private:
    const SimConfig& cfg_;
    std::vector<double> row_cdf_;
};

}  // namespace

SimReport run_sim(const SimConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    if (cfg.workers < 1) throw std::invalid_argument("need at least one worker");
    auto start = std::chrono::steady_clock::now();
    TrialRunner runner(cfg);

    // Trials are processed in fixed rounds; workers split each round by
    // contiguous index ranges. Per-trial streams depend only on the trial
    // index, so the counts (and any early-stop point, which is only checked
    // at round boundaries) are identical for every worker count.
    const std::uint64_t round_size = 4096;
    TrialCounts total;
    std::uint64_t next_trial = 0;
    bool early_stopped = false;
    while (next_trial < cfg.trials) {
        std::uint64_t round_end = std::min(cfg.trials, next_trial + round_size);
        std::uint64_t span = round_end - next_trial;
        unsigned workers = static_cast<unsigned>(
            std::min<std::uint64_t>(cfg.workers, std::max<std::uint64_t>(span, 1)));
        std::vector<TrialCounts> partial(workers);
        if (workers == 1) {
            runner.run_range(next_trial, round_end, partial[0]);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            std::uint64_t chunk = (span + workers - 1) / workers;
            for (unsigned wi = 0; wi < workers; ++wi) {
                std::uint64_t lo = next_trial + wi * chunk;
                std::uint64_t hi = std::min(round_end, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([&runner, lo, hi, &partial, wi] {
                    runner.run_range(lo, hi, partial[wi]);
                });
            }
            for (auto& th : pool) th.join();
        }
        for (const auto& pc : partial) {
            total.frames += pc.frames;
            total.frame_errors += pc.frame_errors;
            total.bit_errors += pc.bit_errors;
        }
        next_trial = round_end;
        if (cfg.early_stop_frame_errors > 0 &&
            total.frame_errors >= cfg.early_stop_frame_errors && next_trial < cfg.trials) {
            early_stopped = true;
            break;
        }
    }

    SimReport report;
    report.trials_requested = cfg.trials;
    report.trials_run = total.frames;
    report.frame_errors = total.frame_errors;
    report.bit_errors = total.bit_errors;
    report.fer = static_cast<double>(total.frame_errors) / static_cast<double>(total.frames);
    report.fer_ci = proportion_ci(total.frame_errors, total.frames);
    std::uint64_t bits = total.frames * cfg.code.dimension();
    report.ber = bits == 0 ? 0.0 : static_cast<double>(total.bit_errors) / static_cast<double>(bits);
    report.ber_ci = proportion_ci(total.bit_errors, bits);
    // a spec without scores carries no bound; report the vacuous one
    report.union_bound = cfg.code.scores.empty() ? 1.0 : fer_union_bound(cfg.code).clipped;
    report.early_stopped = early_stopped;
    report.channel_name = cfg.channel_name;
    report.channel_param = cfg.channel_param;
    report.block_length = cfg.code.block_length();
    report.dimension = cfg.code.dimension();
    report.master_seed = cfg.master_seed;
    report.workers = cfg.workers;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string SimReport::to_json() const {
    nlohmann::ordered_json j;
    j["trials_requested"] = trials_requested;
    j["trials"] = trials_run;
    j["frame_errors"] = frame_errors;
    j["bit_errors"] = bit_errors;
    j["fer"] = fer;
    j["fer_ci_low"] = fer_ci.low;
    j["fer_ci_high"] = fer_ci.high;
    j["ber"] = ber;
    j["ber_ci_low"] = ber_ci.low;
    j["ber_ci_high"] = ber_ci.high;
    j["union_bound"] = union_bound;
    j["early_stopped"] = early_stopped;
    j["wall_time_s"] = wall_time_s;
    j["config"] = {{"channel", channel_name},
                   {"param", channel_param},
                   {"n", block_length},
                   {"k", dimension},
                   {"seed", master_seed},
                   {"workers", workers}};
    return j.dump(2);
}

std::vector<SweepRow> sweep(const std::vector<SimConfig>& grid) {
    if (grid.empty()) throw std::invalid_argument("empty sweep grid");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (const SimConfig& cfg : grid) {
        SweepRow row{cfg, std::nullopt, ""};
        try {
            row.report = run_sim(cfg);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "channel_param,N,K,rate,trials,frame_errors,fer,fer_ci_low,fer_ci_high,"
           "ber,union_bound,seed,error\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const SweepRow& row : rows) {
        const SimConfig& cfg = row.config;
        out << fmt(cfg.channel_param) << ',' << cfg.code.block_length() << ','
            << cfg.code.dimension() << ',' << fmt(cfg.code.rate()) << ',';
        if (row.report) {
            const SimReport& r = *row.report;
            out << r.trials_run << ',' << r.frame_errors << ',' << fmt(r.fer) << ','
                << fmt(r.fer_ci.low) << ',' << fmt(r.fer_ci.high) << ',' << fmt(r.ber) << ','
                << fmt(r.union_bound) << ',' << r.master_seed << ',';
        } else {
            out << ",,,,,,," << cfg.master_seed << ',';
        }
        // commas inside error text would break the row
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out << err << '\n';
    }
    out.flush();
}

}  // namespace polarlab
