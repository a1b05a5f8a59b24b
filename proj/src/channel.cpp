#include "polarlab/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace polarlab {

namespace {

void check_unit_interval(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

Channel::Channel(std::size_t input_size, std::size_t output_size,
                 std::vector<double> transitions, std::vector<std::string> output_labels)
    : input_size_(input_size),
      output_size_(output_size),
      transitions_(std::move(transitions)),
      output_labels_(std::move(output_labels)) {
    if (input_size_ < 2) throw std::invalid_argument("channel needs at least 2 inputs");
    if (output_size_ < 1) throw std::invalid_argument("channel needs at least 1 output");
    if (transitions_.size() != input_size_ * output_size_)
        throw std::invalid_argument("transition matrix size mismatch");
    if (!output_labels_.empty() && output_labels_.size() != output_size_)
        throw std::invalid_argument("output label count mismatch");
    for (std::size_t x = 0; x < input_size_; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < output_size_; ++y) {
            double v = prob(x, y);
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("transition probability outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw std::invalid_argument("channel row does not sum to 1");
    }
}

InputDist::InputDist(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("empty input distribution");
    double sum = 0.0;
    for (double v : probs_) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("input probability outside [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("input distribution does not sum to 1");
}

InputDist InputDist::uniform(std::size_t n) {
    return InputDist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Channel bsc(double crossover) {
    check_unit_interval(crossover, "crossover probability");
    double p = crossover;
    return Channel(2, 2, {1.0 - p, p, p, 1.0 - p}, {"0", "1"});
}

Channel bec(double erasure) {
    check_unit_interval(erasure, "erasure probability");
    double e = erasure;
    return Channel(2, 3,
                   {1.0 - e, 0.0, e,
                    0.0, 1.0 - e, e},
                   {"0", "1", "?"});
}

Channel qec(double erasure) {
    check_unit_interval(erasure, "erasure probability");
    double e = erasure;
    std::vector<double> rows(4 * 5, 0.0);
    for (std::size_t x = 0; x < 4; ++x) {
        rows[x * 5 + x] = 1.0 - e;
        rows[x * 5 + 4] = e;
    }
    return Channel(4, 5, std::move(rows), {"0", "1", "2", "3", "?"});
}

static void check_dims(const Channel& w, const InputDist& q) {
    if (q.size() != w.input_size())
        throw std::invalid_argument("input distribution does not match channel input alphabet");
}

double capacity(const Channel& w, const InputDist& q) {
    check_dims(w, q);
    double bits = 0.0;
    for (std::size_t y = 0; y < w.output_size(); ++y) {
        double py = 0.0;
        for (std::size_t x = 0; x < w.input_size(); ++x) py += q[x] * w.prob(x, y);
        if (py <= 0.0) continue;
        for (std::size_t x = 0; x < w.input_size(); ++x) {
            double joint = q[x] * w.prob(x, y);
            if (joint <= 0.0) continue;
            bits += joint * std::log2(w.prob(x, y) / py);
        }
    }
    return bits;
}

double cutoff_rate(const Channel& w, const InputDist& q) {
    check_dims(w, q);
    double total = 0.0;
    for (std::size_t y = 0; y < w.output_size(); ++y) {
        double inner = 0.0;
        for (std::size_t x = 0; x < w.input_size(); ++x)
            inner += q[x] * std::sqrt(w.prob(x, y));
        total += inner * inner;
    }
    return -std::log2(total);
}

double bhattacharyya(const Channel& w) {
    if (w.input_size() != 2)
        throw std::invalid_argument("Bhattacharyya parameter requires a binary input alphabet");
    double z = 0.0;
    for (std::size_t y = 0; y < w.output_size(); ++y)
        z += std::sqrt(w.prob(0, y) * w.prob(1, y));
    return z;
}

double gallager_e0(const Channel& w, const InputDist& q, double rho) {
    check_dims(w, q);
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
    double expo = 1.0 / (1.0 + rho);
    double total = 0.0;
    for (std::size_t y = 0; y < w.output_size(); ++y) {
        double inner = 0.0;
        for (std::size_t x = 0; x < w.input_size(); ++x)
            inner += q[x] * std::pow(w.prob(x, y), expo);
        total += std::pow(inner, 1.0 + rho);
    }
    return -std::log2(total);
}

double random_coding_exponent(const Channel& w, const InputDist& q, double rate,
                              double* rho_star) {
    check_dims(w, q);
    if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");
    auto objective = [&](double rho) { return gallager_e0(w, q, rho) - rho * rate; };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-9) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (objective(m1) < objective(m2))
            lo = m1;
        else
            hi = m2;
    }
    double rho = 0.5 * (lo + hi);
    double best = objective(rho);
    // the maximum may sit exactly on an endpoint
    for (double r : {0.0, 1.0}) {
        double v = objective(r);
        if (v > best) {
            best = v;
            rho = r;
        }
    }
    if (rho_star) *rho_star = rho;
    return std::max(0.0, best);
}

namespace {

double evaluate_input(const Channel& w, const std::vector<double>& q, InputObjective obj) {
    InputDist dist(q);
    return obj == InputObjective::capacity ? capacity(w, dist) : cutoff_rate(w, dist);
}

// 1-D golden-section search for binary inputs, refining Q(0) to 1e-9.
std::pair<InputDist, double> optimize_binary(const Channel& w, InputObjective obj) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    auto f = [&](double q0) { return evaluate_input(w, {q0, 1.0 - q0}, obj); };
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    double q0 = 0.5 * (lo + hi);
    return {InputDist({q0, 1.0 - q0}), f(q0)};
}

// Grid over the simplex with shrinking local refinement. The objectives are
// unimodal over the simplex (capacity is concave; the cutoff objective is a
// monotone transform of a convex quadratic), so refining around the incumbent
// converges to the global optimum; final value accuracy well under 1e-6.
std::pair<InputDist, double> optimize_simplex(const Channel& w, InputObjective obj,
                                              double initial_step) {
    std::size_t k = w.input_size();
    std::vector<double> best(k, 1.0 / static_cast<double>(k));
    double best_val = evaluate_input(w, best, obj);
    std::vector<double> center = best;
    double step = initial_step;
    double window = 1.0;  // first pass scans the whole simplex
    for (int round = 0; round < 5; ++round) {
        std::vector<double> q(k, 0.0);
        // enumerate grid points of the simplex within `window` of `center`
        auto lo_of = [&](std::size_t i) {
            return std::max(0.0, center[i] - window);
        };
        auto hi_of = [&](std::size_t i) {
            return std::min(1.0, center[i] + window);
        };
        // iterative odometer over the first k-1 coordinates
        std::vector<double> lo(k - 1), hi(k - 1);
        std::vector<int> steps(k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            lo[i] = lo_of(i);
            hi[i] = hi_of(i);
            steps[i] = static_cast<int>(std::floor((hi[i] - lo[i]) / step)) + 1;
        }
        std::vector<int> idx(k - 1, 0);
        while (true) {
            double sum = 0.0;
            bool valid = true;
            for (std::size_t i = 0; i + 1 < k; ++i) {
                q[i] = std::min(lo[i] + idx[i] * step, 1.0);
                sum += q[i];
                if (sum > 1.0 + 1e-15) {
                    valid = false;
                    break;
                }
            }
            if (valid) {
                q[k - 1] = std::max(0.0, 1.0 - sum);
                double val = evaluate_input(w, q, obj);
                if (val > best_val) {
                    best_val = val;
                    best = q;
                }
            }
            std::size_t pos = 0;
            while (pos + 1 < k && ++idx[pos] >= steps[pos]) {
                idx[pos] = 0;
                ++pos;
            }
            if (pos + 1 >= k) break;
        }
        center = best;
        window = 3.0 * step;
        step /= 10.0;
    }
    return {InputDist(best), best_val};
}

}  // namespace

std::pair<InputDist, double> optimize_input(const Channel& w, InputObjective objective) {
    if (w.input_size() > 4)
        throw std::invalid_argument("input optimization supports at most 4 inputs");
    if (w.input_size() == 2) return optimize_binary(w, objective);
    return optimize_simplex(w, objective, w.input_size() == 3 ? 1e-3 : 1e-2);
}

bool is_symmetric(const Channel& w) {
    if (w.input_size() != 2)
        throw std::invalid_argument("symmetry test requires a binary input alphabet");
    // W is symmetric iff the multiset of output columns (a,b) equals the
    // multiset of swapped columns (b,a).
    std::vector<std::pair<double, double>> cols, swapped;
    for (std::size_t y = 0; y < w.output_size(); ++y) {
        cols.emplace_back(w.prob(0, y), w.prob(1, y));
        swapped.emplace_back(w.prob(1, y), w.prob(0, y));
    }
    std::sort(cols.begin(), cols.end());
    std::sort(swapped.begin(), swapped.end());
    for (std::size_t y = 0; y < cols.size(); ++y) {
        if (std::abs(cols[y].first - swapped[y].first) > kProbTol) return false;
        if (std::abs(cols[y].second - swapped[y].second) > kProbTol) return false;
    }
    return true;
}

double symmetric_capacity(const Channel& w) {
    return capacity(w, InputDist::uniform(w.input_size()));
}

double symmetric_cutoff(const Channel& w) {
    return cutoff_rate(w, InputDist::uniform(w.input_size()));
}

ChannelReport analyze(const Channel& w) {
    ChannelReport report;
    report.symmetric_capacity = symmetric_capacity(w);
    report.symmetric_cutoff = symmetric_cutoff(w);
    if (w.input_size() <= 4) {
        report.capacity_bits = optimize_input(w, InputObjective::capacity).second;
        report.cutoff_rate_bits = optimize_input(w, InputObjective::cutoff).second;
    }
    if (w.input_size() == 2) {
        report.bhattacharyya = bhattacharyya(w);
        report.is_symmetric = is_symmetric(w);
    }
    return report;
}

std::string channel_to_json(const Channel& w) {
    nlohmann::ordered_json j;
    j["inputs"] = w.input_size();
    j["outputs"] = w.output_size();
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t y = 0; y < w.output_size(); ++y) row.push_back(w.prob(x, y));
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

Channel channel_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::size_t inputs = j.at("inputs").get<std::size_t>();
    std::size_t outputs = j.at("outputs").get<std::size_t>();
    const auto& rows = j.at("rows");
    if (rows.size() != inputs) throw std::invalid_argument("channel json: row count mismatch");
    std::vector<double> flat;
    flat.reserve(inputs * outputs);
    for (const auto& row : rows) {
        if (row.size() != outputs)
            throw std::invalid_argument("channel json: column count mismatch");
        for (const auto& v : row) flat.push_back(v.get<double>());
    }
    return Channel(inputs, outputs, std::move(flat));
}

}  // namespace polarlab
