#pragma once

// The adversarial input distribution and its constructive offline serving.
// A trace is one run of the outer marking loop: sample points of a uniform
// space until all are marked, and after every non-final sample issue one
// recursive strategy call on the remaining points. The c_l sequence bounds
// what serving one call costs the adversary; choose_beta picks the weight
// base that makes the total adversary cost (1+epsilon)-close to beta^{k-1}.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wks/core.hpp"
#include "wks/rational.hpp"
#include "wks/rng.hpp"
#include "wks/setsys.hpp"

namespace wks {

// Raised when the adversary's serving invariant breaks on a trace, which
// means the trace or the construction itself is buggy, not the caller.
class internal_consistency_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Per-call serving cost bound: c_0 = 0, c_l = beta^{l-1} + beta*m_l*c_{l-1}
// with m_l = ceil(n_{l-1}/2) + 1 families at level l.
inline std::int64_t c_seq(std::int64_t beta, int level) {
    if (beta < 2) throw std::domain_error("c_seq: beta must be an integer >= 2");
    if (level < 0) throw std::domain_error("c_seq: level must be >= 0");
    std::int64_t c = 0;
    std::int64_t beta_pow = 1;
    for (int l = 1; l <= level; ++l) {
        std::int64_t arity = detail::checked_mul(beta, family_count(l), "c_seq arity");
        c = detail::checked_add(beta_pow, detail::checked_mul(arity, c, "c_seq"), "c_seq");
        if (l < level) beta_pow = detail::checked_mul(beta_pow, beta, "c_seq beta power");
    }
    return c;
}

// Unrolled form of c_{k-1}: beta^{k-2} * sum_{i=1}^{k-1} prod_{j=i}^{k-2}
// (ceil(n_j/2) + 1). Must agree with c_seq(beta, k-1) exactly.
inline std::int64_t c_closed_form(std::int64_t beta, int k) {
    if (k < 2) throw std::domain_error("c_closed_form: k must be >= 2");
    if (beta < 2) throw std::domain_error("c_closed_form: beta must be an integer >= 2");
    std::int64_t sum = 0;
    for (int i = 1; i <= k - 1; ++i) {
        std::int64_t prod = 1;
        for (int j = i; j <= k - 2; ++j) {
            prod = detail::checked_mul(prod, family_count(j + 1), "c_closed_form product");
        }
        sum = detail::checked_add(sum, prod, "c_closed_form sum");
    }
    std::int64_t beta_pow = 1;
    for (int e = 0; e < k - 2; ++e) beta_pow = detail::checked_mul(beta_pow, beta, "c_closed_form beta power");
    return detail::checked_mul(beta_pow, sum, "c_closed_form");
}

// Expected number of strategy calls one trace makes: with N = n_{k-1}+1
// points, the marking loop draws N*H(N) samples in expectation and every
// draw but the last issues a call.
inline Rational expected_calls(int k) {
    if (k < 1) throw std::domain_error("expected_calls: k must be >= 1");
    std::int64_t n_points = detail::checked_add(n_seq(k - 1), 1, "expected_calls");
    return Rational(n_points) * harmonic_exact(n_points) - 1;
}

// Number of leaf requests below one strategy call at level k-1:
// prod_{j=1}^{k-1} beta * (ceil(n_{j-1}/2) + 1).
inline std::int64_t requests_per_call(int k, std::int64_t beta) {
    if (k < 1) throw std::domain_error("requests_per_call: k must be >= 1");
    if (beta < 2) throw std::domain_error("requests_per_call: beta must be an integer >= 2");
    std::int64_t total = 1;
    for (int j = 1; j <= k - 1; ++j) {
        std::int64_t arity = detail::checked_mul(beta, family_count(j), "requests_per_call arity");
        total = detail::checked_mul(total, arity, "requests_per_call");
    }
    return total;
}

inline Rational expected_requests(int k, std::int64_t beta) {
    return expected_calls(k) * Rational(requests_per_call(k, beta));
}

// Weight base for a target epsilon: ceil(1/eps) * ((n_{k-1}+1)*H(n_{k-1}+1)-1)
// * sum_{i=1}^{k-1} prod_{j=i}^{k-2} (ceil(n_j/2)+1), evaluated exactly and
// rounded up to an integer (rounding up only strengthens the adversary-cost
// bound), clamped to the minimum legal base 2.
inline std::int64_t choose_beta(int k, const Rational& epsilon) {
    if (k < 2) throw std::domain_error("choose_beta: k must be >= 2");
    if (epsilon <= 0) throw std::domain_error("choose_beta: epsilon must be > 0");
    BigInt inv_eps = ceil_rational(1 / epsilon);
    BigInt sum = 0;
    for (int i = 1; i <= k - 1; ++i) {
        BigInt prod = 1;
        for (int j = i; j <= k - 2; ++j) prod *= BigInt(family_count(j + 1));
        sum += prod;
    }
    Rational value = Rational(inv_eps) * expected_calls(k) * Rational(sum);
    BigInt beta = ceil_rational(value);
    if (beta < 2) beta = 2;
    return to_int64(beta, "choose_beta");
}

// One node of the recursion tree. Internal nodes remember which family each
// recursive call drew; leaves carry the single requested point.
struct StrategyNode {
    int level = 0;
    std::vector<PointId> pointset;
    std::vector<std::int32_t> chosen_sets;
    std::vector<StrategyNode> children;
    PointId leaf_request = -1;

    friend bool operator==(const StrategyNode&, const StrategyNode&) = default;
};

struct TraceLimits {
    std::int64_t max_requests = 100'000'000;
};

// One full run of the marking loop, with the recursion tree of every call
// and the flat request sequence the online algorithm will see.
struct Trace {
    int k = 1;
    std::int64_t beta = 2;
    std::uint64_t seed = 0;
    UniformSpace space{1};
    std::vector<PointId> mark_order;
    std::vector<StrategyNode> calls;
    std::vector<PointId> requests;

    friend bool operator==(const Trace&, const Trace&) = default;
};

// Subtree generation: the chosen family indices come from this node's own
// draw stream, while each child's subtree is keyed by child(t), so sibling
// subtrees are independent of generation order.
inline StrategyNode generate_strategy_node(int level, std::vector<PointId> pointset,
                                           std::int64_t beta, PathRng rng) {
    StrategyNode node;
    node.level = level;
    if (level == 0) {
        if (pointset.size() != 1) {
            throw std::domain_error("generate_strategy_node: level 0 needs exactly one point");
        }
        node.leaf_request = pointset[0];
        node.pointset = std::move(pointset);
        return node;
    }
    SetSystem sys = build_set_system(pointset, level);
    node.pointset = std::move(pointset);
    std::int64_t arity = detail::checked_mul(beta, family_count(level), "strategy arity");
    std::uint64_t m = static_cast<std::uint64_t>(sys.families.size());
    node.chosen_sets.reserve(static_cast<std::size_t>(arity));
    node.children.reserve(static_cast<std::size_t>(arity));
    for (std::int64_t t = 0; t < arity; ++t) {
        std::int32_t idx = static_cast<std::int32_t>(rng.uniform_below(m));
        node.chosen_sets.push_back(idx);
        node.children.push_back(generate_strategy_node(
            level - 1, sys.families[static_cast<std::size_t>(idx)], beta,
            rng.child(static_cast<std::uint64_t>(t))));
    }
    return node;
}

namespace detail {

inline void flatten_node(const StrategyNode& node, std::vector<PointId>& out) {
    if (node.level == 0) {
        out.push_back(node.leaf_request);
        return;
    }
    for (const StrategyNode& child : node.children) flatten_node(child, out);
}

}  // namespace detail

inline std::vector<PointId> flatten_requests(const Trace& trace) {
    std::vector<PointId> out;
    for (const StrategyNode& call : trace.calls) detail::flatten_node(call, out);
    return out;
}

// The marking loop alone, on the same child(0) stream generate_trace uses,
// so per-seed call counts can be studied without building any subtree.
inline std::vector<PointId> mark_order_for_seed(std::int32_t n_points, std::uint64_t seed) {
    if (n_points < 1) throw std::domain_error("mark_order_for_seed: need at least one point");
    PathRng marks = PathRng::from_seed(seed).child(0);
    std::vector<bool> marked(static_cast<std::size_t>(n_points), false);
    std::int32_t remaining = n_points;
    std::vector<PointId> order;
    while (remaining > 0) {
        PointId p = static_cast<PointId>(marks.uniform_below(static_cast<std::uint64_t>(n_points)));
        order.push_back(p);
        if (!marked[static_cast<std::size_t>(p)]) {
            marked[static_cast<std::size_t>(p)] = true;
            --remaining;
        }
    }
    return order;
}

// Simulates the marking loop on n_{k-1}+1 points: sample p, mark it, and
// while unmarked points remain spawn one strategy call on everything but p.
// Call t's subtree is keyed by child(t+1) of the trace root, the marking
// stream by child(0). Refuses generation when the expected request count
// exceeds the cap.
inline Trace generate_trace(int k, std::int64_t beta, std::uint64_t seed,
                            const TraceLimits& limits = {}) {
    if (k < 1) throw std::domain_error("generate_trace: k must be >= 1");
    if (beta < 2) throw std::domain_error("generate_trace: beta must be an integer >= 2");
    Rational expect = expected_requests(k, beta);
    if (expect > Rational(limits.max_requests)) {
        throw std::range_error("generate_trace: expected about " +
                               std::to_string(to_double(expect)) + " requests, above the cap of " +
                               std::to_string(limits.max_requests));
    }

    std::int32_t n_points =
        detail::checked_int32(detail::checked_add(n_seq(k - 1), 1, "generate_trace space"),
                              "generate_trace space");

    Trace trace;
    trace.k = k;
    trace.beta = beta;
    trace.seed = seed;
    trace.space = UniformSpace(n_points);
    trace.mark_order = mark_order_for_seed(n_points, seed);

    PathRng root = PathRng::from_seed(seed);
    std::vector<PointId> everyone(static_cast<std::size_t>(n_points));
    for (std::int32_t i = 0; i < n_points; ++i) everyone[static_cast<std::size_t>(i)] = i;

    trace.calls.reserve(trace.mark_order.size() - 1);
    for (std::size_t t = 0; t + 1 < trace.mark_order.size(); ++t) {
        PointId p = trace.mark_order[t];
        std::vector<PointId> rest;
        rest.reserve(everyone.size() - 1);
        for (PointId q : everyone) {
            if (q != p) rest.push_back(q);
        }
        trace.calls.push_back(generate_strategy_node(k - 1, std::move(rest), beta,
                                                     root.child(static_cast<std::uint64_t>(t) + 1)));
    }
    trace.requests = flatten_requests(trace);
    return trace;
}

namespace detail {

inline void validate_node(const StrategyNode& node, int level, std::int64_t beta) {
    if (node.level != level) {
        throw std::invalid_argument("trace: node level " + std::to_string(node.level) +
                                    ", expected " + std::to_string(level));
    }
    if (level == 0) {
        if (node.pointset.size() != 1 || node.leaf_request != node.pointset[0]) {
            throw std::invalid_argument("trace: malformed leaf node");
        }
        if (!node.chosen_sets.empty() || !node.children.empty()) {
            throw std::invalid_argument("trace: leaf node with children");
        }
        return;
    }
    SetSystem sys = build_set_system(node.pointset, level);
    std::int64_t arity = checked_mul(beta, family_count(level), "trace arity");
    if (static_cast<std::int64_t>(node.chosen_sets.size()) != arity ||
        static_cast<std::int64_t>(node.children.size()) != arity) {
        throw std::invalid_argument("trace: node arity must be beta * family count");
    }
    for (std::size_t t = 0; t < node.children.size(); ++t) {
        std::int32_t idx = node.chosen_sets[t];
        if (idx < 0 || static_cast<std::size_t>(idx) >= sys.families.size()) {
            throw std::invalid_argument("trace: chosen set index out of range");
        }
        if (node.children[t].pointset != sys.families[static_cast<std::size_t>(idx)]) {
            throw std::invalid_argument("trace: child point set is not the chosen family");
        }
        validate_node(node.children[t], level - 1, beta);
    }
}

}  // namespace detail

// Structural well-formedness: sizes, the marking discipline (the final sample
// is the one that completes the marking), and every recursion-tree link.
// Throws invalid_argument on the first violation.
inline void validate_trace(const Trace& trace) {
    if (trace.k < 1) throw std::invalid_argument("trace: k must be >= 1");
    if (trace.beta < 2) throw std::invalid_argument("trace: beta must be >= 2");
    std::int64_t n_points = detail::checked_add(n_seq(trace.k - 1), 1, "trace space");
    if (trace.space.size() != n_points) {
        throw std::invalid_argument("trace: space must have n_{k-1}+1 points");
    }
    if (trace.mark_order.empty()) throw std::invalid_argument("trace: empty mark order");

    std::vector<bool> seen(static_cast<std::size_t>(n_points), false);
    std::int64_t distinct = 0;
    for (std::size_t t = 0; t < trace.mark_order.size(); ++t) {
        PointId p = trace.mark_order[t];
        if (!trace.space.contains(p)) throw std::invalid_argument("trace: mark outside space");
        if (!seen[static_cast<std::size_t>(p)]) {
            seen[static_cast<std::size_t>(p)] = true;
            ++distinct;
        } else if (t + 1 == trace.mark_order.size()) {
            throw std::invalid_argument("trace: final sample must complete the marking");
        }
        if (distinct == n_points && t + 1 != trace.mark_order.size()) {
            throw std::invalid_argument("trace: samples continue after marking completed");
        }
    }
    if (distinct != n_points) throw std::invalid_argument("trace: not all points marked");

    if (trace.calls.size() != trace.mark_order.size() - 1) {
        throw std::invalid_argument("trace: need one call per non-final sample");
    }
    for (std::size_t t = 0; t < trace.calls.size(); ++t) {
        const std::vector<PointId>& pointset = trace.calls[t].pointset;
        if (static_cast<std::int64_t>(pointset.size()) != n_points - 1) {
            throw std::invalid_argument("trace: call point set has the wrong size");
        }
        PointId skip = trace.mark_order[t];
        PointId expect = 0;
        for (PointId q : pointset) {
            if (expect == skip) ++expect;
            if (q != expect) {
                throw std::invalid_argument("trace: call point set must omit exactly the sample");
            }
            ++expect;
        }
        detail::validate_node(trace.calls[t], trace.k - 1, trace.beta);
    }

    // the flat stream is derived data; a mismatch means the trace was
    // assembled or edited inconsistently
    if (trace.requests != flatten_requests(trace)) {
        throw std::invalid_argument("trace: requests do not match the recursion tree");
    }
}

struct AdversaryMove {
    int server = 0;
    PointId from = -1;
    PointId to = -1;
    std::int64_t cost = 0;

    friend bool operator==(const AdversaryMove&, const AdversaryMove&) = default;
};

struct AdversaryOutcome {
    std::vector<AdversaryMove> moves;
    CostLedger ledger;
};

// Upper bound the serving strategy must meet on every trace, not just in
// expectation: one heaviest-server move plus c_{k-1} per call.
inline std::int64_t adversary_cost_bound(const Trace& trace) {
    WeightVector weights(trace.k, trace.beta);
    std::int64_t per_call = c_seq(trace.beta, trace.k - 1);
    std::int64_t calls = static_cast<std::int64_t>(trace.calls.size());
    return detail::checked_add(weights.weight(trace.k - 1),
                               detail::checked_mul(calls, per_call, "adversary bound"),
                               "adversary bound");
}

namespace detail {

struct AdversaryState {
    const WeightVector& weights;
    Configuration config;
    AdversaryOutcome out;

    void move_to(int server, PointId target) {
        PointId from = config.position(server);
        if (from == target) return;
        config = config.with_position(server, target);
        out.ledger.record_move(server, weights);
        out.moves.push_back({server, from, target, weights.weight(server)});
    }

    // Level-l invariant: some server with index >= l sits in the node's
    // point set. Level 0 just checks the request is covered; above that,
    // park server l-1 on the witness q so every chosen family keeps a
    // heavy-enough server during the children.
    void serve_node(const StrategyNode& node) {
        if (node.level == 0) {
            if (!config.covers(node.leaf_request)) {
                throw internal_consistency_error(
                    "adversary_serve: request at an uncovered point; the serving invariant broke");
            }
            return;
        }
        PointId p = -1;
        for (int i = weights.k() - 1; i >= node.level; --i) {
            PointId pos = config.position(i);
            for (PointId candidate : node.pointset) {
                if (candidate == pos) {
                    p = pos;
                    break;
                }
            }
            if (p >= 0) break;
        }
        if (p < 0) {
            throw internal_consistency_error(
                "adversary_serve: no server above the " + std::to_string(node.level) +
                " lightest occupies the call's point set");
        }
        SetSystem sys = build_set_system(node.pointset, node.level);
        PointId q = property3_witness(sys, p);
        move_to(node.level - 1, q);
        for (const StrategyNode& child : node.children) serve_node(child);
    }
};

}  // namespace detail

// Constructive offline serving with full lookahead: first park the heaviest
// server on the last point the marking loop will sample; it then lies in
// every call's point set, which establishes the serving invariant at the top
// of each call. Covered moves are skipped, so realized cost can only fall
// below the adversary_cost_bound.
inline AdversaryOutcome adversary_serve(const Trace& trace, const Configuration& initial) {
    if (initial.k() != trace.k) {
        throw std::domain_error("adversary_serve: initial configuration has the wrong k");
    }
    if (initial.space() != trace.space) {
        throw std::domain_error("adversary_serve: initial configuration is for another space");
    }
    if (trace.mark_order.empty()) {
        throw std::invalid_argument("adversary_serve: trace has no samples");
    }
    WeightVector weights(trace.k, trace.beta);
    detail::AdversaryState state{weights, initial, {{}, CostLedger(trace.k)}};
    state.move_to(trace.k - 1, trace.mark_order.back());
    for (const StrategyNode& call : trace.calls) state.serve_node(call);
    return std::move(state.out);
}

}  // namespace wks
