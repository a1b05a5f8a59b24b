#include "polarlab/polarize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polarlab {

namespace {

void require_binary_input(const Channel& w) {
    if (w.input_size() != 2)
        throw std::invalid_argument("polar combining requires a binary input alphabet");
}

void check_level(int level, int max_level) {
    if (level < 0) throw std::invalid_argument("level must be nonnegative");
    if (level > max_level)
        throw std::invalid_argument("level exceeds supported maximum " +
                                    std::to_string(max_level));
}

// worse channel: observation (y1,y2), the partner input acts as noise
Channel polar_minus(const Channel& w) {
    std::size_t m = w.output_size();
    std::vector<double> minus(2 * m * m);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t y1 = 0; y1 < m; ++y1)
            for (std::size_t y2 = 0; y2 < m; ++y2)
                minus[u * m * m + y1 * m + y2] =
                    0.5 * (w.prob(u, y1) * w.prob(0, y2) + w.prob(1 - u, y1) * w.prob(1, y2));
    return Channel(2, m * m, std::move(minus));
}

// better channel: observation (y1,y2,u1), the partner input is known
Channel polar_plus(const Channel& w) {
    std::size_t m = w.output_size();
    std::vector<double> plus(2 * 2 * m * m);
    for (std::size_t u2 = 0; u2 < 2; ++u2)
        for (std::size_t y1 = 0; y1 < m; ++y1)
            for (std::size_t y2 = 0; y2 < m; ++y2)
                for (std::size_t u1 = 0; u1 < 2; ++u1)
                    plus[u2 * 2 * m * m + (y1 * m + y2) * 2 + u1] =
                        0.5 * w.prob(u1 ^ u2, y1) * w.prob(u2, y2);
    return Channel(2, 2 * m * m, std::move(plus));
}

}  // namespace

std::pair<Channel, Channel> polar_pair(const Channel& w) {
    require_binary_input(w);
    return {polar_minus(w), polar_plus(w)};
}

Channel merge_equivalent_outputs(const Channel& w) {
    require_binary_input(w);
    std::size_t m = w.output_size();
    // sort outputs by the posterior key p1/(p0+p1); equal keys merge
    struct Entry {
        double key;
        double p0, p1;
    };
    std::vector<Entry> entries;
    entries.reserve(m);
    for (std::size_t y = 0; y < m; ++y) {
        double p0 = w.prob(0, y), p1 = w.prob(1, y);
        double mass = p0 + p1;
        if (mass <= 0.0) continue;  // unreachable symbol
        entries.push_back({p1 / mass, p0, p1});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.key < b.key; });
    std::vector<double> col0, col1;
    std::size_t i = 0;
    while (i < entries.size()) {
        double p0 = entries[i].p0, p1 = entries[i].p1;
        std::size_t j = i + 1;
        while (j < entries.size() && entries[j].key - entries[i].key <= 1e-12) {
            p0 += entries[j].p0;
            p1 += entries[j].p1;
            ++j;
        }
        col0.push_back(p0);
        col1.push_back(p1);
        i = j;
    }
    std::vector<double> rows;
    rows.reserve(2 * col0.size());
    rows.insert(rows.end(), col0.begin(), col0.end());
    rows.insert(rows.end(), col1.begin(), col1.end());
    return Channel(2, col0.size(), std::move(rows));
}

std::string branch_of_index(int level, std::size_t index) {
    check_level(level, 25);
    if (index < 1 || index > (std::size_t{1} << level))
        throw std::invalid_argument("bit-channel index out of range");
    std::string branch(static_cast<std::size_t>(level), '-');
    std::size_t bits = index - 1;
    for (int k = 0; k < level; ++k)
        if (bits >> (level - 1 - k) & 1) branch[static_cast<std::size_t>(k)] = '+';
    return branch;
}

SynthChannel synthesize_bit_channel(const Channel& w, int level, std::size_t index,
                                    OutputMerge merge) {
    require_binary_input(w);
    check_level(level, 25);
    std::string branch = branch_of_index(level, index);
    Channel current = w;
    for (char step : branch) {
        std::size_t m = current.output_size();
        std::size_t next = step == '-' ? m * m : 2 * m * m;
        if (next > kSynthesisAlphabetGuard)
            throw std::runtime_error(
                "synthesized output alphabet would exceed the guard; "
                "use bec_polarize or z_bound_recursion instead");
        current = step == '-' ? polar_minus(current) : polar_plus(current);
        if (merge == OutputMerge::lossless) current = merge_equivalent_outputs(current);
    }
    return SynthChannel{std::move(current), std::move(branch), index};
}

namespace {

std::vector<double> polarize_values(double v0, int level) {
    std::vector<double> values{v0};
    for (int step = 0; step < level; ++step) {
        std::vector<double> next(values.size() * 2);
        for (std::size_t i = 0; i < values.size(); ++i) {
            double v = values[i];
            next[2 * i] = 2.0 * v - v * v;
            next[2 * i + 1] = v * v;
        }
        values = std::move(next);
    }
    return values;
}

}  // namespace

BecProfile bec_polarize(double eps, int level) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("erasure probability must lie in [0,1]");
    check_level(level, 25);
    BecProfile profile{level, polarize_values(eps, level)};
    // capacity conservation is built into the recursion; guard against drift
    double total = std::accumulate(profile.eps.begin(), profile.eps.end(), 0.0,
                                   [](double acc, double e) { return acc + (1.0 - e); });
    double expect = static_cast<double>(profile.eps.size()) * (1.0 - eps);
    if (std::abs(total - expect) > 1e-9 * std::max(1.0, expect))
        throw std::logic_error("erasure recursion lost capacity conservation");
    return profile;
}

ZProfile z_bound_recursion(double z0, int level) {
    if (!(z0 >= 0.0 && z0 <= 1.0))
        throw std::invalid_argument("Bhattacharyya parameter must lie in [0,1]");
    check_level(level, 25);
    return ZProfile{level, polarize_values(z0, level)};
}

PolarizationStats polarization_stats(std::span<const double> values, double delta,
                                     ScoreKind kind) {
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("delta must lie in (0, 0.5)");
    if (values.empty()) throw std::invalid_argument("empty value vector");
    PolarizationStats stats;
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("polarization values must lie in [0,1]");
        bool good = kind == ScoreKind::rate ? v > 1.0 - delta : v < delta;
        bool bad = kind == ScoreKind::rate ? v < delta : v > 1.0 - delta;
        if (good)
            ++stats.good_count;
        else if (bad)
            ++stats.bad_count;
        else
            ++stats.middling_count;
    }
    double n = static_cast<double>(values.size());
    stats.good_fraction = stats.good_count / n;
    stats.bad_fraction = stats.bad_count / n;
    stats.middling_fraction = stats.middling_count / n;
    return stats;
}

namespace {

double normalized_cutoff_from_z(std::span<const double> z) {
    double total = 0.0;
    for (double v : z) total += 1.0 - std::log2(1.0 + v);
    return total / static_cast<double>(z.size());
}

}  // namespace

double normalized_cutoff(const ZProfile& profile) {
    return normalized_cutoff_from_z(profile.z);
}

double normalized_cutoff(const BecProfile& profile) {
    return normalized_cutoff_from_z(profile.eps);
}

double normalized_cutoff(std::span<const SynthChannel> channels) {
    if (channels.empty()) throw std::invalid_argument("empty channel set");
    std::vector<double> z;
    z.reserve(channels.size());
    for (const auto& sc : channels) z.push_back(bhattacharyya(sc.channel));
    return normalized_cutoff_from_z(z);
}

}  // namespace polarlab
