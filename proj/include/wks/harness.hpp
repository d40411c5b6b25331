#pragma once

// Monte Carlo experiment driver: per-trial seed derivation, the worker pool,
// cost/ratio statistics and the results file formats. Workers only fill a
// pre-sized record array by trial index and aggregation happens serially in
// index order afterwards, so results are byte-identical at any parallelism.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "wks/adversary.hpp"
#include "wks/algorithms.hpp"
#include "wks/core.hpp"
#include "wks/offline.hpp"
#include "wks/rational.hpp"
#include "wks/rng.hpp"
#include "wks/stats.hpp"
#include "wks/trace_io.hpp"

namespace wks {

enum class OptMode { Auto, Dp, AdvBound, Both };

inline OptMode parse_opt_mode(const std::string& s) {
    if (s == "auto") return OptMode::Auto;
    if (s == "dp") return OptMode::Dp;
    if (s == "adv") return OptMode::AdvBound;
    if (s == "both") return OptMode::Both;
    throw std::invalid_argument("unknown opt mode '" + s + "'; expected auto, dp, adv or both");
}

inline std::string opt_mode_name(OptMode m) {
    switch (m) {
        case OptMode::Auto: return "auto";
        case OptMode::Dp: return "dp";
        case OptMode::AdvBound: return "adv";
        case OptMode::Both: return "both";
    }
    return "auto";
}

struct ExperimentConfig {
    int k = 2;
    std::optional<std::int64_t> beta;
    std::optional<Rational> epsilon;
    std::int64_t trials = 1000;
    std::uint64_t seed = 0;
    std::string algorithm = "cheapest";
    OptMode opt_mode = OptMode::Auto;
    std::optional<double> alpha;
    int jobs = 1;
    std::int64_t max_requests = 100'000'000;
    double z = kZ99;
    std::optional<std::vector<PointId>> initial;
};

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.k < 1) throw std::domain_error("config: k must be >= 1");
    if (cfg.trials < 1) throw std::domain_error("config: trials must be >= 1");
    if (cfg.jobs < 1) throw std::domain_error("config: jobs must be >= 1");
    if (cfg.beta.has_value() == cfg.epsilon.has_value()) {
        throw std::domain_error("config: provide exactly one of beta and epsilon");
    }
    if (cfg.beta && *cfg.beta < 2) throw std::domain_error("config: beta must be an integer >= 2");
    if (cfg.epsilon && *cfg.epsilon <= 0) throw std::domain_error("config: epsilon must be > 0");
}

inline std::int64_t resolved_beta(const ExperimentConfig& cfg) {
    return cfg.beta ? *cfg.beta : choose_beta(cfg.k, *cfg.epsilon);
}

// Trace and algorithm randomness for one trial, derived from the master seed
// by position only, so trials can run in any order on any worker.
struct TrialSeeds {
    std::uint64_t trace_seed = 0;
    std::uint64_t alg_seed = 0;
};

inline TrialSeeds trial_seeds(std::uint64_t master, std::int64_t trial) {
    PathRng base = PathRng::from_seed(master).child(static_cast<std::uint64_t>(trial));
    return {base.child(0).key(), base.child(1).key()};
}

struct TrialRecord {
    std::int64_t trial = 0;
    std::uint64_t seed = 0;
    std::int64_t alg_cost = 0;
    std::int64_t opt_cost = 0;
    std::int64_t adv_cost = 0;
    std::int64_t calls = 0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::int64_t beta = 2;
    std::int32_t space_size = 0;
    bool opt_is_dp = false;
    std::vector<TrialRecord> records;
    RunStats stats;
};

inline bool opt_mode_uses_dp(OptMode mode, int k, std::int32_t space_size) {
    switch (mode) {
        case OptMode::Dp:
        case OptMode::Both: return true;
        case OptMode::AdvBound: return false;
        case OptMode::Auto: return k <= 3 && space_size <= 10;
    }
    return false;
}

namespace detail {

template <typename Fn>
inline void run_indexed(std::int64_t count, int jobs, Fn&& fn) {
    if (jobs <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            std::int64_t i = cursor.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                cursor.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

// One trace per trial: run the algorithm over the flat requests, serve the
// same trace constructively, and take the offline optimum per the resolved
// opt mode (the constructive cost doubles as the optimum's upper bound when
// the DP is off). Deterministic in (config minus jobs).
inline ExperimentResult estimate_costs(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentResult result;
    result.config = cfg;
    result.beta = resolved_beta(cfg);

    Rational expect = expected_requests(cfg.k, result.beta);
    if (expect > Rational(cfg.max_requests)) {
        throw std::range_error("estimate_costs: expected about " +
                               std::to_string(to_double(expect)) +
                               " requests per trace, above the cap of " +
                               std::to_string(cfg.max_requests));
    }

    result.space_size = detail::checked_int32(
        detail::checked_add(n_seq(cfg.k - 1), 1, "experiment space"), "experiment space");
    UniformSpace space(result.space_size);
    WeightVector weights(cfg.k, result.beta);
    Configuration initial = cfg.initial ? Configuration(space, *cfg.initial)
                                        : Configuration::all_at(space, cfg.k, 0);
    if (initial.k() != cfg.k) {
        throw std::domain_error("config: initial configuration must list k positions");
    }
    result.opt_is_dp = opt_mode_uses_dp(cfg.opt_mode, cfg.k, result.space_size);

    TraceLimits limits{cfg.max_requests};
    result.records.assign(static_cast<std::size_t>(cfg.trials), TrialRecord{});

    detail::run_indexed(cfg.trials, cfg.jobs, [&](std::int64_t i) {
        TrialSeeds seeds = trial_seeds(cfg.seed, i);
        Trace trace = generate_trace(cfg.k, result.beta, seeds.trace_seed, limits);
        auto alg = make_algorithm(cfg.algorithm, space, weights, initial, seeds.alg_seed);
        CostLedger ledger = run_online(*alg, trace.requests);
        AdversaryOutcome adv = adversary_serve(trace, initial);
        std::int64_t opt = result.opt_is_dp
                               ? opt_cost_dp(space, weights, trace.requests, initial)
                               : adv.ledger.total;
        result.records[static_cast<std::size_t>(i)] =
            TrialRecord{i,           seeds.trace_seed,  ledger.total,
                        opt,         adv.ledger.total,  static_cast<std::int64_t>(trace.calls.size())};
    });

    result.stats.z = cfg.z;
    for (const TrialRecord& rec : result.records) {
        double a = static_cast<double>(rec.alg_cost);
        double o = static_cast<double>(rec.opt_cost);
        double v = static_cast<double>(rec.adv_cost);
        result.stats.alg.add(a);
        result.stats.opt.add(o);
        result.stats.adv.add(v);
        result.stats.calls.add(static_cast<double>(rec.calls));
        result.stats.alg_opt.add(a, o);
        result.stats.alg_adv.add(a, v);
    }
    return result;
}

// Call-count statistics of the outer marking loop alone, on the same
// per-trial seed derivation estimate_costs uses. beta plays no role in the
// count; it is validated for interface uniformity only.
inline RunStats coupon_call_stats(int k, std::int64_t beta, std::int64_t trials,
                                  std::uint64_t seed, double z = kZ99) {
    if (k < 1) throw std::domain_error("coupon_call_stats: k must be >= 1");
    if (beta < 2) throw std::domain_error("coupon_call_stats: beta must be an integer >= 2");
    if (trials < 1) throw std::domain_error("coupon_call_stats: trials must be >= 1");
    std::int32_t n_points = detail::checked_int32(
        detail::checked_add(n_seq(k - 1), 1, "coupon space"), "coupon space");
    RunStats stats;
    stats.z = z;
    for (std::int64_t i = 0; i < trials; ++i) {
        std::vector<PointId> marks = mark_order_for_seed(n_points, trial_seeds(seed, i).trace_seed);
        stats.calls.add(static_cast<double>(marks.size() - 1));
    }
    return stats;
}

// Runs bare strategy(level, P) subtraces with every server parked on one
// extra point outside P, the precondition of the per-call cost floor (no
// server heavier than the level lightest starts inside P). The floor says
// mean algorithm cost >= beta^level.
inline RunStats conditioned_strategy_experiment(int level, std::int64_t beta,
                                                const std::string& algorithm,
                                                std::int64_t trials, std::uint64_t seed,
                                                double z = kZ99) {
    if (level < 0) throw std::domain_error("conditioned experiment: level must be >= 0");
    if (beta < 2) throw std::domain_error("conditioned experiment: beta must be an integer >= 2");
    if (trials < 1) throw std::domain_error("conditioned experiment: trials must be >= 1");
    std::int64_t n64 = n_seq(level);
    std::int32_t n = detail::checked_int32(detail::checked_add(n64, 1, "conditioned space"),
                                           "conditioned space");
    UniformSpace space(n);
    PointId parking = n - 1;
    std::vector<PointId> pointset(static_cast<std::size_t>(n64));
    for (std::size_t i = 0; i < pointset.size(); ++i) pointset[i] = static_cast<PointId>(i);

    WeightVector weights(level + 1, beta);
    Configuration initial = Configuration::all_at(space, level + 1, parking);

    RunStats stats;
    stats.z = z;
    std::vector<PointId> requests;
    for (std::int64_t i = 0; i < trials; ++i) {
        TrialSeeds seeds = trial_seeds(seed, i);
        StrategyNode node =
            generate_strategy_node(level, pointset, beta, PathRng::from_seed(seeds.trace_seed));
        requests.clear();
        detail::flatten_node(node, requests);
        auto alg = make_algorithm(algorithm, space, weights, initial, seeds.alg_seed);
        CostLedger ledger = run_online(*alg, requests);
        stats.alg.add(static_cast<double>(ledger.total));
    }
    return stats;
}

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline ordered_json series_to_json(const StatSeries& s, double z) {
    ordered_json j;
    j["count"] = s.count();
    j["mean"] = s.mean();
    j["variance"] = s.variance();
    j["stddev"] = s.stddev();
    j["half_width"] = s.half_width(z);
    return j;
}

inline ordered_json gap_to_json(const GapEstimate& g) {
    ordered_json j;
    j["value"] = g.value;
    j["half_width"] = g.half_width;
    return j;
}

}  // namespace detail

// The config echo deliberately omits the parallelism degree: it must not
// influence the output bytes.
inline ordered_json config_to_json(const ExperimentResult& result) {
    const ExperimentConfig& cfg = result.config;
    ordered_json j;
    j["k"] = cfg.k;
    j["beta"] = result.beta;
    if (cfg.epsilon) {
        j["epsilon"] = rational_to_string(*cfg.epsilon);
    } else {
        j["epsilon"] = nullptr;
    }
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["algorithm"] = cfg.algorithm;
    j["opt_mode"] = opt_mode_name(cfg.opt_mode);
    j["opt_is_dp"] = result.opt_is_dp;
    if (cfg.alpha) {
        j["alpha"] = *cfg.alpha;
    } else {
        j["alpha"] = nullptr;
    }
    j["z"] = cfg.z;
    j["max_requests"] = cfg.max_requests;
    if (cfg.initial) {
        j["initial"] = *cfg.initial;
    } else {
        j["initial"] = nullptr;
    }
    return j;
}

inline ordered_json results_to_json(const ExperimentResult& result) {
    ordered_json j;
    j["format"] = "wks-results";
    j["version"] = 1;
    j["config"] = config_to_json(result);
    j["space_size"] = result.space_size;

    ordered_json trials = ordered_json::array();
    for (const TrialRecord& rec : result.records) {
        ordered_json t;
        t["trial"] = rec.trial;
        t["seed"] = rec.seed;
        t["alg_cost"] = rec.alg_cost;
        t["opt_cost"] = rec.opt_cost;
        t["adv_cost"] = rec.adv_cost;
        t["calls"] = rec.calls;
        trials.push_back(std::move(t));
    }
    j["trials"] = std::move(trials);

    const RunStats& s = result.stats;
    ordered_json summary;
    summary["alg"] = detail::series_to_json(s.alg, s.z);
    summary["opt"] = detail::series_to_json(s.opt, s.z);
    summary["adv"] = detail::series_to_json(s.adv, s.z);
    summary["calls"] = detail::series_to_json(s.calls, s.z);
    if (s.opt.mean() != 0.0) summary["ratio_alg_opt"] = detail::gap_to_json(cost_ratio_vs_opt(s));
    if (s.adv.mean() != 0.0) summary["ratio_alg_adv"] = detail::gap_to_json(cost_ratio_vs_adv(s));
    if (result.config.alpha) {
        double alpha = *result.config.alpha;
        ordered_json g = detail::gap_to_json(yao_gap(s, alpha));
        g["alpha"] = alpha;
        summary["yao_gap"] = std::move(g);
        ordered_json ga = detail::gap_to_json(yao_gap_vs_adv(s, alpha));
        ga["alpha"] = alpha;
        summary["yao_gap_adv"] = std::move(ga);
    }
    j["summary"] = std::move(summary);
    return j;
}

inline std::string serialize_results_json(const ExperimentResult& result) {
    return results_to_json(result).dump(2) + "\n";
}

inline std::string results_to_csv(const ExperimentResult& result) {
    std::string out = "trial,seed,alg_cost,opt_cost,adv_cost,calls\n";
    char line[256];
    for (const TrialRecord& rec : result.records) {
        std::snprintf(line, sizeof line, "%lld,%llu,%lld,%lld,%lld,%lld\n",
                      static_cast<long long>(rec.trial), static_cast<unsigned long long>(rec.seed),
                      static_cast<long long>(rec.alg_cost), static_cast<long long>(rec.opt_cost),
                      static_cast<long long>(rec.adv_cost), static_cast<long long>(rec.calls));
        out += line;
    }
    const RunStats& s = result.stats;
    auto series_line = [&](const char* name, const StatSeries& series) {
        out += "# summary ";
        out += name;
        out += " count=" + std::to_string(series.count());
        out += " mean=" + detail::format_double(series.mean());
        out += " variance=" + detail::format_double(series.variance());
        out += " stddev=" + detail::format_double(series.stddev());
        out += " half_width=" + detail::format_double(series.half_width(s.z));
        out += "\n";
    };
    series_line("alg", s.alg);
    series_line("opt", s.opt);
    series_line("adv", s.adv);
    series_line("calls", s.calls);
    if (s.opt.mean() != 0.0) {
        GapEstimate r = cost_ratio_vs_opt(s);
        out += "# ratio alg/opt value=" + detail::format_double(r.value) +
               " half_width=" + detail::format_double(r.half_width) + "\n";
    }
    if (s.adv.mean() != 0.0) {
        GapEstimate r = cost_ratio_vs_adv(s);
        out += "# ratio alg/adv value=" + detail::format_double(r.value) +
               " half_width=" + detail::format_double(r.half_width) + "\n";
    }
    if (result.config.alpha) {
        GapEstimate g = yao_gap(s, *result.config.alpha);
        out += "# yao_gap alpha=" + detail::format_double(*result.config.alpha) +
               " value=" + detail::format_double(g.value) +
               " half_width=" + detail::format_double(g.half_width) + "\n";
        GapEstimate ga = yao_gap_vs_adv(s, *result.config.alpha);
        out += "# yao_gap_adv alpha=" + detail::format_double(*result.config.alpha) +
               " value=" + detail::format_double(ga.value) +
               " half_width=" + detail::format_double(ga.half_width) + "\n";
    }
    const ExperimentConfig& cfg = result.config;
    out += "# config k=" + std::to_string(cfg.k) + " beta=" + std::to_string(result.beta) +
           " epsilon=" + (cfg.epsilon ? rational_to_string(*cfg.epsilon) : "none") +
           " trials=" + std::to_string(cfg.trials) + " seed=" + std::to_string(cfg.seed) +
           " algorithm=" + cfg.algorithm + " opt_mode=" + opt_mode_name(cfg.opt_mode) +
           " opt_is_dp=" + (result.opt_is_dp ? "1" : "0") +
           " z=" + detail::format_double(cfg.z) +
           " max_requests=" + std::to_string(cfg.max_requests) + "\n";
    return out;
}

inline std::string serialize_results(const ExperimentResult& result, const std::string& format) {
    if (format == "json") return serialize_results_json(result);
    if (format == "csv") return results_to_csv(result);
    throw std::invalid_argument("unknown results format '" + format + "'; expected json or csv");
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wks
