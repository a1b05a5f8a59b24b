// polarlab: channel analysis, polar-code construction and decoding
// experiments, and desk-scale coding-theory oracles, with JSON/CSV output.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polarlab/channel.hpp"
#include "polarlab/ensembles.hpp"
#include "polarlab/polar_code.hpp"
#include "polarlab/polarize.hpp"
#include "polarlab/sim.hpp"

namespace {

using namespace polarlab;

bool verbose_logging() {
    const char* env = std::getenv("POLARLAB_LOG");
    return env != nullptr && *env != '\0';
}

void log_note(const std::string& text) {
    if (verbose_logging()) std::cerr << "[polarlab] " << text << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

/// Text rows of 0/1 digits (spaces allowed), one matrix row per line.
std::vector<std::vector<std::uint8_t>> read_bit_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<std::uint8_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::uint8_t> row;
        for (char c : line) {
            if (c == '0' || c == '1') row.push_back(static_cast<std::uint8_t>(c - '0'));
            else if (c != ' ' && c != '\t' && c != '\r')
                throw std::runtime_error("unexpected character in bit matrix: " + path);
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("no rows in bit matrix: " + path);
    return rows;
}

struct ChannelOpts {
    std::optional<double> bsc_p, bec_e, qec_e;
    std::string dmc_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--bsc", bsc_p, "binary symmetric channel, crossover probability");
        cmd->add_option("--bec", bec_e, "binary erasure channel, erasure probability");
        cmd->add_option("--qec", qec_e, "quaternary erasure channel, erasure probability");
        cmd->add_option("--dmc", dmc_path, "channel transition matrix, JSON file");
    }

    int count() const {
        return int(bsc_p.has_value()) + int(bec_e.has_value()) + int(qec_e.has_value()) +
               int(!dmc_path.empty());
    }

    Channel resolve(std::string& name, double& param) const {
        if (count() != 1)
            throw CLI::ValidationError("channel",
                                       "give exactly one of --bsc/--bec/--qec/--dmc");
        if (bsc_p) {
            name = "bsc";
            param = *bsc_p;
            return bsc(*bsc_p);
        }
        if (bec_e) {
            name = "bec";
            param = *bec_e;
            return bec(*bec_e);
        }
        if (qec_e) {
            name = "qec";
            param = *qec_e;
            return qec(*qec_e);
        }
        name = "dmc";
        param = 0.0;
        return channel_from_json(read_file(dmc_path));
    }
};

std::string report_json(const ChannelReport& rep, const std::string& name, double param) {
    nlohmann::ordered_json j;
    j["channel"] = name;
    j["param"] = param;
    if (rep.capacity_bits) j["capacity_bits"] = *rep.capacity_bits;
    if (rep.cutoff_rate_bits) j["cutoff_rate_bits"] = *rep.cutoff_rate_bits;
    if (rep.bhattacharyya) j["bhattacharyya"] = *rep.bhattacharyya;
    j["symmetric_capacity"] = rep.symmetric_capacity;
    j["symmetric_cutoff"] = rep.symmetric_cutoff;
    if (rep.is_symmetric) j["is_symmetric"] = *rep.is_symmetric;
    return j.dump(2);
}

std::vector<double> scores_for(const Channel& w, const std::string& name, double param,
                               int level, bool& exact) {
    if (name == "bec") {
        exact = true;
        return bec_polarize(param, level).eps;
    }
    exact = false;
    return z_bound_recursion(bhattacharyya(w), level).z;
}

int run_channel(const ChannelOpts& copts, const std::string& out,
                const std::string& emit_channel) {
    std::string name;
    double param = 0.0;
    Channel w = copts.resolve(name, param);
    if (w.input_size() > 4)
        log_note("input alphabet above 4: reporting symmetric quantities only");
    write_output(out, report_json(analyze(w), name, param));
    if (!emit_channel.empty()) write_output(emit_channel, channel_to_json(w));
    return 0;
}

int run_polarize(const ChannelOpts& copts, int level, bool exact_synthesis,
                 const std::string& out) {
    std::string name;
    double param = 0.0;
    Channel w = copts.resolve(name, param);
    std::ostringstream csv;
    csv << "index,branch,eps_or_z,symmetric_capacity,cutoff_rate\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    if (exact_synthesis) {
        log_note("exact synthesis of " + std::to_string(std::size_t{1} << level) +
                 " bit-channels");
        for (std::size_t i = 1; i <= (std::size_t{1} << level); ++i) {
            SynthChannel sc = synthesize_bit_channel(w, level, i, OutputMerge::lossless);
            double z = bhattacharyya(sc.channel);
            csv << i << ',' << sc.branch << ',' << fmt(z) << ','
                << fmt(symmetric_capacity(sc.channel)) << ','
                << fmt(1.0 - std::log2(1.0 + z)) << '\n';
        }
    } else {
        bool exact = false;
        std::vector<double> scores = scores_for(w, name, param, level, exact);
        if (!exact)
            log_note("scores are Bhattacharyya upper bounds (conservative), not exact");
        for (std::size_t i = 1; i <= scores.size(); ++i) {
            double v = scores[i - 1];
            csv << i << ',' << branch_of_index(level, i) << ',' << fmt(v) << ',';
            if (exact) csv << fmt(1.0 - v);  // erasure recursion is exact
            csv << ',' << fmt(1.0 - std::log2(1.0 + v)) << '\n';
        }
    }
    write_output(out, csv.str());
    return 0;
}

int run_construct(const ChannelOpts& copts, int level, std::size_t k,
                  const std::string& frozen_bits, const std::string& out) {
    std::string name;
    double param = 0.0;
    Channel w = copts.resolve(name, param);
    bool exact = false;
    std::vector<double> scores = scores_for(w, name, param, level, exact);
    if (!exact)
        log_note("construction scores are Bhattacharyya upper bounds (conservative)");
    std::vector<std::uint8_t> pattern;
    for (char c : frozen_bits) {
        if (c == '0' || c == '1') pattern.push_back(static_cast<std::uint8_t>(c - '0'));
        else throw CLI::ValidationError("--frozen-pattern", "expects a string of 0/1");
    }
    PolarCodeSpec code = construct(scores, k, std::move(pattern));
    UnionBoundValue ub = fer_union_bound(code);
    log_note("active set of " + std::to_string(code.dimension()) + "; bound " +
             std::to_string(ub.raw) + (exact ? " (exact)" : " (upper bound)"));
    write_output(out, code_to_json(code));
    return 0;
}

std::vector<double> parse_grid(const std::string& csv_list) {
    std::vector<double> values;
    std::stringstream ss(csv_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(std::stod(item));
    }
    return values;
}

int run_simulate(const ChannelOpts& copts, const std::string& code_path,
                 std::uint64_t trials, std::uint64_t seed, unsigned workers,
                 std::uint64_t early_stop, const std::string& sweep_eps,
                 const std::string& sweep_k, int level, const std::string& out) {
    if (!sweep_eps.empty() || !sweep_k.empty()) {
        std::vector<SimConfig> grid;
        if (!sweep_eps.empty()) {
            if (code_path.empty())
                throw CLI::ValidationError("--sweep-eps", "needs --code for N and K");
            // a fresh construction per channel point, at the dimension of the
            // reference code
            PolarCodeSpec ref = code_from_json(read_file(code_path));
            for (double eps : parse_grid(sweep_eps)) {
                SimConfig cfg{construct(bec_polarize(eps, ref.level), ref.dimension()),
                              bec(eps), trials, seed, workers, early_stop, "bec", eps};
                grid.push_back(std::move(cfg));
            }
        } else {
            std::string name;
            double param = 0.0;
            Channel w = copts.resolve(name, param);
            bool exact = false;
            std::vector<double> scores = scores_for(w, name, param, level, exact);
            for (double kf : parse_grid(sweep_k)) {
                SimConfig cfg{construct(scores, static_cast<std::size_t>(kf)), w,
                              trials, seed, workers, early_stop, name, param};
                grid.push_back(std::move(cfg));
            }
        }
        auto rows = sweep(grid);
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        write_output(out, csv.str());
        return 0;
    }

    if (code_path.empty()) throw CLI::ValidationError("--code", "is required");
    std::string name;
    double param = 0.0;
    Channel w = copts.resolve(name, param);
    SimConfig cfg{code_from_json(read_file(code_path)), w, trials, seed,
                  workers, early_stop, name, param};
    log_note("simulating N=" + std::to_string(cfg.code.block_length()) + " K=" +
             std::to_string(cfg.code.dimension()) + " over " + std::to_string(trials) +
             " trials, " + std::to_string(workers) + " worker(s)");
    SimReport rep = run_sim(cfg);
    write_output(out, rep.to_json());
    return 0;
}

int run_ensemble_pairwise(const ChannelOpts& copts, std::size_t n, double q0,
                          const std::string& out) {
    std::string name;
    double param = 0.0;
    Channel w = copts.resolve(name, param);
    InputDist q = w.input_size() == 2 && q0 != 0.5
                      ? InputDist({q0, 1.0 - q0})
                      : InputDist::uniform(w.input_size());
    double avg = ensemble_pairwise_average(n, w, q);
    double zavg = ensemble_z_product_average(n, w, q);
    double r0 = cutoff_rate(w, q);
    nlohmann::ordered_json j;
    j["channel"] = name;
    j["param"] = param;
    j["n"] = n;
    j["pairwise_error_average"] = avg;
    j["z_product_average"] = zavg;
    j["cutoff_rate"] = r0;
    j["bound"] = std::exp2(-double(n) * r0);
    write_output(out, j.dump(2));
    return 0;
}

int run_ensemble_guesswork(const ChannelOpts& copts, const std::string& codewords_path,
                           const std::string& out) {
    std::string name;
    double param = 0.0;
    Channel w = copts.resolve(name, param);
    BlockCode code;
    code.codewords = read_bit_matrix(codewords_path);
    code.length = code.codewords[0].size();
    GuessworkReport g = guesswork_exact(code, w);
    nlohmann::ordered_json j;
    j["channel"] = name;
    j["param"] = param;
    j["codewords"] = code.message_count();
    j["length"] = code.length;
    j["rate"] = code.rate();
    j["expected_guesswork"] = g.expected_guesswork;
    j["pairwise_sum"] = g.pairwise_sum;
    write_output(out, j.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polar coding laboratory"};
    app.require_subcommand(1);

    std::string out;

    // channel
    auto* cmd_channel = app.add_subcommand("channel", "report channel quantities as JSON");
    ChannelOpts ch_channel;
    ch_channel.attach(cmd_channel);
    std::string emit_channel;
    cmd_channel->add_option("--out", out, "output file (default stdout)");
    cmd_channel->add_option("--emit-channel", emit_channel,
                            "also write the transition matrix JSON here");

    // polarize
    auto* cmd_polarize =
        app.add_subcommand("polarize", "bit-channel quality profile as CSV");
    ChannelOpts ch_polarize;
    ch_polarize.attach(cmd_polarize);
    int pol_level = 3;
    bool pol_exact = false;
    cmd_polarize->add_option("--n", pol_level, "recursion level (N = 2^n)")->required();
    cmd_polarize->add_flag("--exact", pol_exact, "synthesize bit-channels exactly");
    cmd_polarize->add_option("--out", out, "output file (default stdout)");

    // construct
    auto* cmd_construct =
        app.add_subcommand("construct", "select a polar code and write its spec JSON");
    ChannelOpts ch_construct;
    ch_construct.attach(cmd_construct);
    int con_level = 10;
    std::size_t con_k = 0;
    std::string frozen_bits;
    cmd_construct->add_option("--n", con_level, "recursion level (N = 2^n)")->required();
    cmd_construct->add_option("--k", con_k, "data positions")->required();
    cmd_construct->add_option("--frozen-pattern", frozen_bits,
                              "bits for the frozen positions (default all zero)");
    cmd_construct->add_option("--out", out, "output file (default stdout)");

    // simulate
    auto* cmd_simulate =
        app.add_subcommand("simulate", "Monte Carlo transmission experiments");
    ChannelOpts ch_simulate;
    ch_simulate.attach(cmd_simulate);
    std::string code_path, sweep_eps, sweep_k;
    std::uint64_t trials = 10000, seed = 1, early_stop = 0;
    unsigned workers = 1;
    int sim_level = 10;
    cmd_simulate->add_option("--code", code_path, "polar code spec JSON");
    cmd_simulate->add_option("--trials", trials, "trials per point");
    cmd_simulate->add_option("--seed", seed, "master seed");
    cmd_simulate->add_option("--workers", workers, "worker threads");
    cmd_simulate->add_option("--early-stop", early_stop,
                             "stop after this many frame errors (0 = off)");
    cmd_simulate->add_option("--sweep-eps", sweep_eps,
                             "comma list of erasure probabilities (CSV sweep)");
    cmd_simulate->add_option("--sweep-k", sweep_k,
                             "comma list of dimensions at a fixed channel (CSV sweep)");
    cmd_simulate->add_option("--n", sim_level, "recursion level for --sweep-k");
    cmd_simulate->add_option("--out", out, "output file (default stdout)");

    // schemes
    auto* cmd_schemes = app.add_subcommand("schemes", "cutoff-rate boosting analyses");
    cmd_schemes->require_subcommand(1);
    auto* cmd_massey =
        cmd_schemes->add_subcommand("massey", "erasure-channel splitting report");
    double massey_eps = 0.25;
    cmd_massey->add_option("--eps", massey_eps, "erasure probability")->required();
    cmd_massey->add_option("--out", out, "output file (default stdout)");
    auto* cmd_pinsker =
        cmd_schemes->add_subcommand("pinsker", "inner block code cleanup analysis");
    std::string generator_path;
    double pinsker_p = 0.05;
    cmd_pinsker->add_option("--generator", generator_path, "generator matrix text file")
        ->required();
    cmd_pinsker->add_option("--p", pinsker_p, "crossover probability")->required();
    cmd_pinsker->add_option("--out", out, "output file (default stdout)");

    // ensemble
    auto* cmd_ensemble =
        app.add_subcommand("ensemble", "exact random-coding and guesswork oracles");
    cmd_ensemble->require_subcommand(1);
    auto* cmd_pairwise = cmd_ensemble->add_subcommand(
        "pairwise", "ensemble-average pairwise error and its factorized bound");
    ChannelOpts ch_pairwise;
    ch_pairwise.attach(cmd_pairwise);
    std::size_t ens_n = 3;
    double ens_q0 = 0.5;
    cmd_pairwise->add_option("--n", ens_n, "block length")->required();
    cmd_pairwise->add_option("--q0", ens_q0, "P(input = 0) for binary channels");
    cmd_pairwise->add_option("--out", out, "output file (default stdout)");
    auto* cmd_guesswork =
        cmd_ensemble->add_subcommand("guesswork", "exact guesswork of a listed code");
    ChannelOpts ch_guesswork;
    ch_guesswork.attach(cmd_guesswork);
    std::string codewords_path;
    cmd_guesswork->add_option("--codewords", codewords_path, "codeword text file")
        ->required();
    cmd_guesswork->add_option("--out", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
        if (*cmd_channel) return run_channel(ch_channel, out, emit_channel);
        if (*cmd_polarize) return run_polarize(ch_polarize, pol_level, pol_exact, out);
        if (*cmd_construct)
            return run_construct(ch_construct, con_level, con_k, frozen_bits, out);
        if (*cmd_simulate)
            return run_simulate(ch_simulate, code_path, trials, seed, workers, early_stop,
                                sweep_eps, sweep_k, sim_level, out);
        if (*cmd_massey) {
            write_output(out, massey_split(massey_eps).to_json());
            return 0;
        }
        if (*cmd_pinsker) {
            write_output(out,
                         pinsker_analysis(read_bit_matrix(generator_path), pinsker_p)
                             .to_json());
            return 0;
        }
        if (*cmd_pairwise) return run_ensemble_pairwise(ch_pairwise, ens_n, ens_q0, out);
        if (*cmd_guesswork) return run_ensemble_guesswork(ch_guesswork, codewords_path, out);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
