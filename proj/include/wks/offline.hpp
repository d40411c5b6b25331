#pragma once

// Exact offline optimum on a uniform metric. The main solver runs a layered
// DP over all n^k server configurations restricted to lazy moves (send one
// server to the current request, only on a fault); on a uniform metric this
// loses nothing, which the bounded brute-force solver double-checks by also
// exploring non-lazy repositioning moves.

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wks/core.hpp"

namespace wks {

struct OfflineLimits {
    std::int64_t max_states = 1'000'000;
};

namespace detail {

// Configurations encode as mixed-radix numbers: digit i is server i's point.
inline std::int64_t encode_positions(const std::vector<PointId>& pos, std::int64_t n) {
    std::int64_t code = 0;
    for (std::size_t i = pos.size(); i-- > 0;) {
        code = code * n + pos[i];
    }
    return code;
}

}  // namespace detail

// Minimal cost of serving the requests with lazy schedules. O(T * n^k * k)
// time and O(n^k) space; guarded by limits.max_states.
inline std::int64_t opt_cost_dp(const UniformSpace& space, const WeightVector& weights,
                                const std::vector<PointId>& requests, const Configuration& initial,
                                const OfflineLimits& limits = {}) {
    if (!(initial.space() == space)) {
        throw std::domain_error("opt_cost_dp: configuration belongs to another space");
    }
    if (weights.k() != initial.k()) {
        throw std::domain_error("opt_cost_dp: weights and configuration disagree on k");
    }
    for (PointId r : requests) {
        if (!space.contains(r)) throw std::domain_error("opt_cost_dp: request outside space");
    }

    const std::int64_t n = space.size();
    const int k = weights.k();
    std::int64_t states = 1;
    for (int i = 0; i < k; ++i) {
        states = detail::checked_mul(states, n, "opt_cost_dp state space");
        if (states > limits.max_states) {
            throw std::range_error("opt_cost_dp: state space n^k exceeds " +
                                   std::to_string(limits.max_states) + " states");
        }
    }

    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> cur(static_cast<std::size_t>(states), kInf);
    std::vector<std::int64_t> next(static_cast<std::size_t>(states), kInf);
    std::vector<std::int64_t> stride(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) stride[static_cast<std::size_t>(i)] = i == 0 ? 1 : stride[i - 1] * n;

    cur[static_cast<std::size_t>(detail::encode_positions(initial.positions(), n))] = 0;

    for (PointId r : requests) {
        std::fill(next.begin(), next.end(), kInf);
        for (std::int64_t s = 0; s < states; ++s) {
            std::int64_t cost = cur[static_cast<std::size_t>(s)];
            if (cost >= kInf) continue;
            bool covered = false;
            std::int64_t rest = s;
            for (int i = 0; i < k; ++i) {
                if (rest % n == r) {
                    covered = true;
                    break;
                }
                rest /= n;
            }
            if (covered) {
                if (cost < next[static_cast<std::size_t>(s)]) next[static_cast<std::size_t>(s)] = cost;
                continue;
            }
            for (int i = 0; i < k; ++i) {
                std::int64_t digit = (s / stride[static_cast<std::size_t>(i)]) % n;
                std::int64_t moved = s + (r - digit) * stride[static_cast<std::size_t>(i)];
                std::int64_t cand = cost + weights.weight(i);
                if (cand < next[static_cast<std::size_t>(moved)]) {
                    next[static_cast<std::size_t>(moved)] = cand;
                }
            }
        }
        cur.swap(next);
    }

    std::int64_t best = kInf;
    for (std::int64_t c : cur) {
        if (c < best) best = c;
    }
    return best;
}

struct BruteLimits {
    std::size_t max_requests = 10;
    int max_k = 3;
    std::int32_t max_points = 5;
    int extra_moves = 1;
};

namespace detail {

struct BruteSolver {
    const UniformSpace& space;
    const WeightVector& weights;
    const std::vector<PointId>& requests;
    int extra_moves;
    std::map<std::pair<std::size_t, std::int64_t>, std::int64_t> memo;

    std::int64_t best(std::size_t step, std::vector<PointId>& pos) {
        if (step == requests.size()) return 0;
        std::int64_t code = encode_positions(pos, space.size());
        if (auto it = memo.find({step, code}); it != memo.end()) return it->second;
        std::int64_t result = std::numeric_limits<std::int64_t>::max() / 4;
        explore(step, pos, 1 + extra_moves, 0, result);
        memo.emplace(std::make_pair(step, code), result);
        return result;
    }

    // Any sequence of at most moves_left single-server moves to arbitrary
    // points, provided the request ends up covered.
    void explore(std::size_t step, std::vector<PointId>& pos, int moves_left,
                 std::int64_t spent, std::int64_t& result) {
        bool covered = false;
        for (PointId p : pos) {
            if (p == requests[step]) {
                covered = true;
                break;
            }
        }
        if (covered) {
            std::int64_t tail = best(step + 1, pos);
            if (spent + tail < result) result = spent + tail;
        }
        if (moves_left == 0) return;
        for (int i = 0; i < weights.k(); ++i) {
            PointId from = pos[static_cast<std::size_t>(i)];
            for (PointId to = 0; to < space.size(); ++to) {
                if (to == from) continue;
                pos[static_cast<std::size_t>(i)] = to;
                explore(step, pos, moves_left - 1, spent + weights.weight(i), result);
                pos[static_cast<std::size_t>(i)] = from;
            }
        }
    }
};

}  // namespace detail

// Independent oracle: explores every schedule with at most 1 + extra_moves
// single-server moves per request, including repositioning moves to points
// nobody requested. Exponential; the limits keep instances tiny.
inline std::int64_t opt_cost_bruteforce(const UniformSpace& space, const WeightVector& weights,
                                        const std::vector<PointId>& requests,
                                        const Configuration& initial,
                                        const BruteLimits& limits = {}) {
    if (!(initial.space() == space)) {
        throw std::domain_error("opt_cost_bruteforce: configuration belongs to another space");
    }
    if (weights.k() != initial.k()) {
        throw std::domain_error("opt_cost_bruteforce: weights and configuration disagree on k");
    }
    if (requests.size() > limits.max_requests || weights.k() > limits.max_k ||
        space.size() > limits.max_points) {
        throw std::range_error("opt_cost_bruteforce: instance above the search bounds");
    }
    for (PointId r : requests) {
        if (!space.contains(r)) throw std::domain_error("opt_cost_bruteforce: request outside space");
    }

    detail::BruteSolver solver{space, weights, requests, limits.extra_moves, {}};
    std::vector<PointId> pos = initial.positions();
    return solver.best(0, pos);
}

}  // namespace wks
