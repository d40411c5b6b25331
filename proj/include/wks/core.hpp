#pragma once

// Domain model for weighted k-server on a uniform metric: points, spaces,
// geometric weight vectors, server configurations and move-cost accounting.
// Everything here is a small value type; operations return new values.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wks {

// Index of a point inside one UniformSpace.
using PointId = std::int32_t;

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::range_error(std::string(what) + ": 64-bit overflow");
    }
    return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw std::range_error(std::string(what) + ": 64-bit overflow");
    }
    return r;
}

inline std::int32_t checked_int32(std::int64_t v, const char* what) {
    if (v < INT32_MIN || v > INT32_MAX) {
        throw std::range_error(std::string(what) + ": value " + std::to_string(v) +
                               " does not fit 32 bits");
    }
    return static_cast<std::int32_t>(v);
}

}  // namespace detail

// A finite set of points {0, ..., size-1} with all pairwise distances 1.
class UniformSpace {
public:
    explicit UniformSpace(std::int32_t size) : size_(size) {
        if (size < 1) throw std::domain_error("UniformSpace: size must be >= 1");
    }

    std::int32_t size() const { return size_; }
    bool contains(PointId p) const { return p >= 0 && p < size_; }

    static std::int32_t distance(PointId a, PointId b) { return a == b ? 0 : 1; }

    friend bool operator==(const UniformSpace&, const UniformSpace&) = default;

private:
    std::int32_t size_;
};

// Server weights 1, beta, beta^2, ..., beta^(k-1), lightest first.
class WeightVector {
public:
    WeightVector(int k, std::int64_t beta) : k_(k), beta_(beta) {
        if (k < 1) throw std::domain_error("WeightVector: k must be >= 1");
        if (beta < 2) throw std::domain_error("WeightVector: beta must be an integer >= 2");
        weights_.reserve(static_cast<std::size_t>(k));
        std::int64_t w = 1;
        for (int i = 0; i < k; ++i) {
            weights_.push_back(w);
            if (i + 1 < k) w = detail::checked_mul(w, beta, "server weight beta^i");
        }
    }

    int k() const { return k_; }
    std::int64_t beta() const { return beta_; }

    std::int64_t weight(int i) const {
        if (i < 0 || i >= k_) {
            throw std::domain_error("server index " + std::to_string(i) + " out of range for k=" +
                                    std::to_string(k_));
        }
        return weights_[static_cast<std::size_t>(i)];
    }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    int k_;
    std::int64_t beta_;
    std::vector<std::int64_t> weights_;
};

inline std::int64_t server_weight(const WeightVector& weights, int i) {
    return weights.weight(i);
}

// Positions of the k servers, lightest server first. Co-location is allowed.
class Configuration {
public:
    Configuration(UniformSpace space, std::vector<PointId> positions)
        : space_(space), positions_(std::move(positions)) {
        if (positions_.empty()) throw std::domain_error("Configuration: no servers");
        for (PointId p : positions_) {
            if (!space_.contains(p)) {
                throw std::domain_error("Configuration: point " + std::to_string(p) +
                                        " outside space of size " + std::to_string(space_.size()));
            }
        }
    }

    static Configuration all_at(UniformSpace space, int k, PointId p = 0) {
        return Configuration(space, std::vector<PointId>(static_cast<std::size_t>(k), p));
    }

    const UniformSpace& space() const { return space_; }
    int k() const { return static_cast<int>(positions_.size()); }
    const std::vector<PointId>& positions() const { return positions_; }

    PointId position(int i) const {
        if (i < 0 || i >= k()) throw std::domain_error("Configuration: server index out of range");
        return positions_[static_cast<std::size_t>(i)];
    }

    bool covers(PointId r) const {
        for (PointId p : positions_) {
            if (p == r) return true;
        }
        return false;
    }

    Configuration with_position(int i, PointId r) const {
        if (i < 0 || i >= k()) throw std::domain_error("Configuration: server index out of range");
        if (!space_.contains(r)) throw std::domain_error("Configuration: target point outside space");
        std::vector<PointId> next = positions_;
        next[static_cast<std::size_t>(i)] = r;
        return Configuration(space_, std::move(next));
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    UniformSpace space_;
    std::vector<PointId> positions_;
};

// Moves server i to r. A request already covered by that server costs 0;
// otherwise the move costs the server's weight. No other server moves.
inline std::pair<Configuration, std::int64_t> serve_with(const Configuration& config, int i,
                                                         PointId r, const WeightVector& weights) {
    if (weights.k() != config.k()) {
        throw std::domain_error("serve_with: weight vector and configuration disagree on k");
    }
    if (i < 0 || i >= config.k()) throw std::domain_error("serve_with: server index out of range");
    if (!config.space().contains(r)) throw std::domain_error("serve_with: point outside space");
    if (config.position(i) == r) return {config, 0};
    return {config.with_position(i, r), weights.weight(i)};
}

// Per-server move counts plus the weighted total they imply.
struct CostLedger {
    std::vector<std::int64_t> moves;
    std::int64_t total = 0;

    explicit CostLedger(int k) : moves(static_cast<std::size_t>(k), 0) {}

    void record_move(int server, const WeightVector& weights) {
        if (server < 0 || server >= static_cast<int>(moves.size())) {
            throw std::domain_error("CostLedger: server index out of range");
        }
        moves[static_cast<std::size_t>(server)] += 1;
        total = detail::checked_add(total, weights.weight(server), "ledger total");
    }

    friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

}  // namespace wks
