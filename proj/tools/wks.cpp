// Command-line front end: trace generation, set-system verification, the
// coupon-collector and per-call-bound experiments, the full cost-ratio
// harness, offline optima of stored traces, and the beta/c-sequence tables.
//
// Exit codes: 0 all checks pass, 1 a verification or statistical check
// failed, 2 usage error, 3 a resource guard refused the computation.

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wks/harness.hpp"

namespace {

struct BetaChoice {
    std::optional<std::int64_t> beta;
    std::string epsilon_text;

    std::optional<wks::Rational> epsilon() const {
        if (epsilon_text.empty()) return std::nullopt;
        return wks::parse_rational(epsilon_text);
    }
};

void add_beta_options(CLI::App* cmd, BetaChoice& choice) {
    auto* b = cmd->add_option("--beta", choice.beta, "Weight base (integer >= 2)");
    auto* e = cmd->add_option("--epsilon", choice.epsilon_text,
                              "Target epsilon; beta becomes choose_beta(k, epsilon)");
    b->excludes(e);
    e->excludes(b);
}

std::int64_t pick_beta(int k, const BetaChoice& choice) {
    auto eps = choice.epsilon();
    if (choice.beta && !eps) return *choice.beta;
    if (!choice.beta && eps) return wks::choose_beta(k, *eps);
    throw std::domain_error("provide exactly one of --beta and --epsilon");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        wks::write_text_file(out_path, text);
    }
}

int cmd_gen(int k, const BetaChoice& choice, std::uint64_t seed, std::int64_t max_requests,
            const std::string& out_path) {
    std::int64_t beta = pick_beta(k, choice);
    wks::Trace trace = wks::generate_trace(k, beta, seed, {max_requests});
    emit(wks::serialize_trace(trace), out_path);
    if (!out_path.empty()) {
        std::printf("trace: k=%d beta=%" PRId64 " seed=%" PRIu64 " calls=%zu requests=%zu -> %s\n",
                    k, beta, seed, trace.calls.size(), trace.requests.size(), out_path.c_str());
    }
    return 0;
}

int cmd_verify_setsys(int max_level) {
    bool all_ok = true;
    for (int level = 1; level <= max_level; ++level) {
        std::vector<wks::PointId> points(static_cast<std::size_t>(wks::n_seq(level)));
        for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<wks::PointId>(i);
        wks::SetSystem sys = wks::build_set_system(points, level);
        wks::SetSystemReport rep = wks::verify_set_system(sys, level);

        bool witness_fn_ok = true;
        for (wks::PointId p : sys.ground) {
            wks::PointId q = wks::property3_witness(sys, p);
            for (const auto& fam : sys.families) {
                bool has_p = std::find(fam.begin(), fam.end(), p) != fam.end();
                bool has_q = std::find(fam.begin(), fam.end(), q) != fam.end();
                if (!has_p && !has_q) {
                    witness_fn_ok = false;
                    break;
                }
            }
            if (!witness_fn_ok) break;
        }

        bool ok = rep.all_ok() && witness_fn_ok;
        all_ok = all_ok && ok;
        std::printf("level %d: n=%" PRId64 " families=%" PRId64
                    " sizes=%s avoidance=%s witness=%s witness_fn=%s\n",
                    level, wks::n_seq(level), wks::family_count(level),
                    rep.sizes_ok ? "ok" : "FAIL", rep.avoidance_ok ? "ok" : "FAIL",
                    rep.witness_ok ? "ok" : "FAIL", witness_fn_ok ? "ok" : "FAIL");
    }
    std::printf("set system: %s\n", all_ok ? "PASS" : "FAIL");
    return all_ok ? 0 : 1;
}

int cmd_coupon(int k, std::int64_t beta, std::int64_t trials, std::uint64_t seed,
               const std::string& out_path, const std::string& format) {
    wks::RunStats stats = wks::coupon_call_stats(k, beta, trials, seed);
    wks::Rational target = wks::expected_calls(k);
    double target_d = wks::to_double(target);
    bool pass = wks::within_ci(stats.calls, target_d, stats.z);
    std::printf("coupon k=%d trials=%" PRId64 ": mean=%.6f target=%s (%.6f) half_width=%.6f %s\n",
                k, trials, stats.calls.mean(), wks::rational_to_string(target).c_str(), target_d,
                stats.calls.half_width(stats.z), pass ? "PASS" : "FAIL");
    if (!out_path.empty() || format == "json") {
        wks::ordered_json j;
        j["format"] = "wks-coupon";
        j["k"] = k;
        j["beta"] = beta;
        j["trials"] = trials;
        j["seed"] = seed;
        j["mean"] = stats.calls.mean();
        j["target"] = wks::rational_to_string(target);
        j["target_decimal"] = target_d;
        j["half_width"] = stats.calls.half_width(stats.z);
        j["pass"] = pass;
        std::string text = j.dump(2) + "\n";
        if (!out_path.empty()) {
            wks::write_text_file(out_path, text);
        } else {
            std::fputs(text.c_str(), stdout);
        }
    }
    return pass ? 0 : 1;
}

int cmd_lemma_alg(std::vector<int> levels, std::int64_t beta, std::vector<std::string> algorithms,
                  std::int64_t trials, std::uint64_t seed) {
    if (levels.empty()) levels = {0, 1, 2};
    if (algorithms.empty()) algorithms = {"cheapest", "weightedrank:1", "stickyheavy:4"};
    bool all_ok = true;
    for (const std::string& alg : algorithms) {
        for (int level : levels) {
            wks::RunStats stats =
                wks::conditioned_strategy_experiment(level, beta, alg, trials, seed);
            wks::WeightVector weights(level + 1, beta);
            double bound = static_cast<double>(weights.weight(level));
            bool pass = wks::clears_lower_bound(stats.alg, bound, stats.z);
            all_ok = all_ok && pass;
            std::printf("lemma-alg %s level=%d beta=%" PRId64
                        ": mean=%.4f bound=%.0f half_width=%.4f %s\n",
                        alg.c_str(), level, beta, stats.alg.mean(), bound,
                        stats.alg.half_width(stats.z), pass ? "PASS" : "FAIL");
        }
    }
    std::printf("per-call bound: %s\n", all_ok ? "PASS" : "FAIL");
    return all_ok ? 0 : 1;
}

int cmd_ratio(const wks::ExperimentConfig& cfg, const std::string& out_path,
              const std::string& format) {
    wks::ExperimentResult result = wks::estimate_costs(cfg);
    std::string text = wks::serialize_results(result, format);
    emit(text, out_path);

    const wks::RunStats& s = result.stats;
    std::FILE* log = out_path.empty() ? stderr : stdout;
    std::fprintf(log,
                 "ratio k=%d beta=%" PRId64 " algorithm=%s trials=%" PRId64
                 ": alg=%.4f opt=%.4f adv=%.4f calls=%.4f\n",
                 cfg.k, result.beta, cfg.algorithm.c_str(), cfg.trials, s.alg.mean(),
                 s.opt.mean(), s.adv.mean(), s.calls.mean());
    if (s.adv.mean() != 0.0) {
        wks::GapEstimate r = wks::cost_ratio_vs_adv(s);
        std::fprintf(log, "ratio alg/adv = %.6f +- %.6f\n", r.value, r.half_width);
    }
    int rc = 0;
    if (cfg.alpha) {
        wks::GapEstimate gap = wks::yao_gap(s, *cfg.alpha);
        bool pass = gap.value > 0.0;
        std::fprintf(log, "yao gap at alpha=%g: %.6f +- %.6f %s\n", *cfg.alpha, gap.value,
                     gap.half_width, pass ? "PASS" : "FAIL");
        rc = pass ? 0 : 1;
    }
    return rc;
}

int cmd_opt(const std::string& trace_path, std::int64_t max_states,
            const std::vector<wks::PointId>& initial_positions, const std::string& out_path,
            const std::string& format) {
    wks::Trace trace = wks::read_trace_file(trace_path);
    wks::WeightVector weights(trace.k, trace.beta);
    wks::Configuration initial =
        initial_positions.empty()
            ? wks::Configuration::all_at(trace.space, trace.k, 0)
            : wks::Configuration(trace.space, initial_positions);
    std::int64_t opt =
        wks::opt_cost_dp(trace.space, weights, trace.requests, initial, {max_states});
    wks::AdversaryOutcome adv = wks::adversary_serve(trace, initial);
    std::int64_t bound = wks::adversary_cost_bound(trace);

    if (format == "json" && !out_path.empty()) {
        wks::ordered_json j;
        j["format"] = "wks-opt";
        j["trace"] = trace_path;
        j["k"] = trace.k;
        j["beta"] = trace.beta;
        j["requests"] = trace.requests.size();
        j["opt_cost"] = opt;
        j["adv_cost"] = adv.ledger.total;
        j["adv_bound"] = bound;
        wks::write_text_file(out_path, j.dump(2) + "\n");
    }
    std::printf("opt: requests=%zu opt_dp=%" PRId64 " adv_serve=%" PRId64 " adv_bound=%" PRId64
                "\n",
                trace.requests.size(), opt, adv.ledger.total, bound);
    return 0;
}

int cmd_beta(int k, const BetaChoice& choice) {
    std::int64_t beta = pick_beta(k, choice);
    std::printf("k=%d beta=%" PRId64 "\n", k, beta);
    for (int level = 0; level <= k - 1; ++level) {
        std::printf("c_%d = %" PRId64 "\n", level, wks::c_seq(beta, level));
    }
    if (k >= 2) {
        std::printf("c_%d closed form = %" PRId64 "\n", k - 1, wks::c_closed_form(beta, k));
    }
    wks::Rational calls = wks::expected_calls(k);
    std::printf("expected calls = %s (%.6f)\n", wks::rational_to_string(calls).c_str(),
                wks::to_double(calls));
    std::printf("expected requests = %.6f\n", wks::to_double(wks::expected_requests(k, beta)));

    wks::WeightVector weights(k, beta);
    wks::Rational heavy(weights.weight(k - 1));
    wks::Rational adv_bound = heavy + calls * wks::Rational(wks::c_seq(beta, k - 1));
    wks::Rational alg_floor = wks::harmonic_exact(wks::n_seq(k - 1)) * heavy;
    std::printf("adversary expected cost bound = %s (%.6f)\n",
                wks::rational_to_string(adv_bound).c_str(), wks::to_double(adv_bound));
    std::printf("algorithm expected cost floor = %s (%.6f)\n",
                wks::rational_to_string(alg_floor).c_str(), wks::to_double(alg_floor));
    std::printf("ratio floor = %.6f (H(n_{k-1}) = %s)\n",
                wks::to_double(alg_floor / adv_bound),
                wks::rational_to_string(wks::harmonic_exact(wks::n_seq(k - 1))).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation laboratory for randomized weighted k-server lower bounds on uniform metrics"};
    app.require_subcommand(1);

    int rc_pending = 0;
    std::function<int()> runner;

    // gen
    {
        auto* cmd = app.add_subcommand("gen", "Generate one adversarial trace");
        auto k = std::make_shared<int>(2);
        auto choice = std::make_shared<BetaChoice>();
        auto seed = std::make_shared<std::uint64_t>(0);
        auto max_requests = std::make_shared<std::int64_t>(100'000'000);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--k", *k, "Number of servers")->required();
        add_beta_options(cmd, *choice);
        cmd->add_option("--seed", *seed, "Master seed");
        cmd->add_option("--max-requests", *max_requests, "Expected-length guard");
        cmd->add_option("--out", *out, "Trace file path (stdout when omitted)");
        cmd->callback([&runner, k, choice, seed, max_requests, out] {
            runner = [=] { return cmd_gen(*k, *choice, *seed, *max_requests, *out); };
        });
    }

    // verify-setsys
    {
        auto* cmd = app.add_subcommand("verify-setsys", "Check the set-system properties");
        auto max_level = std::make_shared<int>(5);
        cmd->add_option("--max-level", *max_level, "Verify levels 1..N")->check(CLI::Range(1, 6));
        cmd->callback([&runner, max_level] {
            runner = [=] { return cmd_verify_setsys(*max_level); };
        });
    }

    // coupon
    {
        auto* cmd = app.add_subcommand("coupon", "Marking-loop call-count statistics");
        auto k = std::make_shared<int>(2);
        auto beta = std::make_shared<std::int64_t>(4);
        auto trials = std::make_shared<std::int64_t>(100'000);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto out = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("text");
        cmd->add_option("--k", *k, "Number of servers")->required();
        cmd->add_option("--beta", *beta, "Weight base (does not affect call counts)");
        cmd->add_option("--trials", *trials, "Number of traces");
        cmd->add_option("--seed", *seed, "Master seed");
        cmd->add_option("--out", *out, "Write a JSON report here");
        cmd->add_option("--format", *format, "text or json")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->callback([&runner, k, beta, trials, seed, out, format] {
            runner = [=] { return cmd_coupon(*k, *beta, *trials, *seed, *out, *format); };
        });
    }

    // lemma-alg
    {
        auto* cmd = app.add_subcommand("lemma-alg", "Per-call lower bound experiment");
        auto levels = std::make_shared<std::vector<int>>();
        auto beta = std::make_shared<std::int64_t>(4);
        auto algorithms = std::make_shared<std::vector<std::string>>();
        auto trials = std::make_shared<std::int64_t>(10'000);
        auto seed = std::make_shared<std::uint64_t>(0);
        cmd->add_option("--level", *levels, "Strategy level(s); default 0 1 2");
        cmd->add_option("--beta", *beta, "Weight base");
        cmd->add_option("--algorithm", *algorithms,
                        "Algorithm spec(s); default all three baselines");
        cmd->add_option("--trials", *trials, "Trials per combination");
        cmd->add_option("--seed", *seed, "Master seed");
        cmd->callback([&runner, levels, beta, algorithms, trials, seed] {
            runner = [=] { return cmd_lemma_alg(*levels, *beta, *algorithms, *trials, *seed); };
        });
    }

    // ratio
    {
        auto* cmd = app.add_subcommand("ratio", "Full cost comparison experiment");
        auto cfg = std::make_shared<wks::ExperimentConfig>();
        auto choice = std::make_shared<BetaChoice>();
        auto alpha = std::make_shared<double>(0.0);
        auto initial = std::make_shared<std::vector<wks::PointId>>();
        auto out = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("--k", cfg->k, "Number of servers")->required();
        add_beta_options(cmd, *choice);
        cmd->add_option("--trials", cfg->trials, "Number of traces");
        cmd->add_option("--seed", cfg->seed, "Master seed");
        cmd->add_option("--algorithm", cfg->algorithm, "Algorithm spec");
        auto* opt_mode = cmd->add_option_function<std::string>(
            "--opt-mode", [cfg](const std::string& s) { cfg->opt_mode = wks::parse_opt_mode(s); },
            "auto, dp, adv or both");
        opt_mode->check(CLI::IsMember({"auto", "dp", "adv", "both"}));
        auto* alpha_opt = cmd->add_option("--alpha", *alpha, "Yao gap coefficient");
        cmd->add_option("--jobs", cfg->jobs, "Worker threads");
        cmd->add_option("--max-requests", cfg->max_requests, "Expected-length guard");
        cmd->add_option("--initial", *initial, "Initial server positions (k points)");
        cmd->add_option("--out", *out, "Results file path (stdout when omitted)");
        cmd->add_option("--format", *format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->callback([&runner, cfg, choice, alpha, alpha_opt, initial, out, format] {
            runner = [=] {
                wks::ExperimentConfig c = *cfg;
                c.beta = choice->beta;
                c.epsilon = choice->epsilon();
                if (alpha_opt->count() > 0) c.alpha = *alpha;
                if (!initial->empty()) c.initial = *initial;
                return cmd_ratio(c, *out, *format);
            };
        });
    }

    // opt
    {
        auto* cmd = app.add_subcommand("opt", "Offline optimum of a stored trace");
        auto path = std::make_shared<std::string>();
        auto max_states = std::make_shared<std::int64_t>(1'000'000);
        auto initial = std::make_shared<std::vector<wks::PointId>>();
        auto out = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("json");
        cmd->add_option("trace", *path, "Trace file")->required();
        cmd->add_option("--max-states", *max_states, "State-space guard for the DP");
        cmd->add_option("--initial", *initial, "Initial server positions (k points)");
        cmd->add_option("--out", *out, "Write a JSON report here");
        cmd->add_option("--format", *format, "json")->check(CLI::IsMember({"json"}));
        cmd->callback([&runner, path, max_states, initial, out, format] {
            runner = [=] { return cmd_opt(*path, *max_states, *initial, *out, *format); };
        });
    }

    // beta
    {
        auto* cmd = app.add_subcommand("beta", "Print beta, the c sequence and cost bounds");
        auto k = std::make_shared<int>(2);
        auto choice = std::make_shared<BetaChoice>();
        cmd->add_option("--k", *k, "Number of servers")->required();
        add_beta_options(cmd, *choice);
        cmd->callback([&runner, k, choice] {
            runner = [=] { return cmd_beta(*k, *choice); };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return runner ? runner() : rc_pending;
    } catch (const std::range_error& e) {
        std::fprintf(stderr, "resource guard: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
