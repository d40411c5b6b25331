#pragma once

// Online serving interface plus the three baseline algorithms the harness
// plays against the adversarial distribution. Algorithms see one request at
// a time and nothing else; the trace structure stays hidden from them.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wks/core.hpp"
#include "wks/rng.hpp"

namespace wks {

struct StepResult {
    std::optional<int> moved;
    std::int64_t cost = 0;
};

// A request already covered never moves anything; otherwise the subclass
// picks the server and pays its weight. State is the configuration only.
class OnlineAlgorithm {
public:
    OnlineAlgorithm(const UniformSpace& space, const WeightVector& weights,
                    const Configuration& initial)
        : weights_(weights), config_(initial) {
        if (weights.k() != initial.k()) {
            throw std::domain_error("algorithm: weights and configuration disagree on k");
        }
        if (!(initial.space() == space)) {
            throw std::domain_error("algorithm: configuration belongs to another space");
        }
    }
    virtual ~OnlineAlgorithm() = default;

    virtual std::string name() const = 0;
    virtual bool is_deterministic() const = 0;

    StepResult serve_step(PointId r) {
        if (!config_.space().contains(r)) {
            throw std::domain_error("serve_step: requested point outside space");
        }
        if (config_.covers(r)) return {std::nullopt, 0};
        int i = pick_server(r);
        auto [next, cost] = serve_with(config_, i, r, weights_);
        config_ = std::move(next);
        return {i, cost};
    }

    const Configuration& configuration() const { return config_; }
    const WeightVector& weights() const { return weights_; }

protected:
    virtual int pick_server(PointId r) = 0;

private:
    WeightVector weights_;
    Configuration config_;
};

// Always moves the lightest server.
class CheapestMove final : public OnlineAlgorithm {
public:
    using OnlineAlgorithm::OnlineAlgorithm;
    std::string name() const override { return "cheapest"; }
    bool is_deterministic() const override { return true; }

protected:
    int pick_server(PointId) override { return 0; }
};

// Memoryless randomized baseline: on a fault, moves server i with
// probability proportional to beta^(-lambda*i).
class WeightedRank final : public OnlineAlgorithm {
public:
    WeightedRank(const UniformSpace& space, const WeightVector& weights,
                 const Configuration& initial, double lambda, std::uint64_t seed)
        : OnlineAlgorithm(space, weights, initial),
          lambda_(lambda),
          rng_(PathRng::from_seed(seed)) {
        if (!std::isfinite(lambda)) {
            throw std::domain_error("weightedrank: lambda must be finite");
        }
        double log_beta = std::log(static_cast<double>(weights.beta()));
        cumulative_.reserve(static_cast<std::size_t>(weights.k()));
        double total = 0.0;
        for (int i = 0; i < weights.k(); ++i) {
            total += std::exp(-lambda_ * static_cast<double>(i) * log_beta);
            cumulative_.push_back(total);
        }
    }

    std::string name() const override {
        char buf[64];
        std::snprintf(buf, sizeof buf, "weightedrank:%g", lambda_);
        return buf;
    }
    bool is_deterministic() const override { return false; }

protected:
    int pick_server(PointId) override {
        double u = rng_.uniform01() * cumulative_.back();
        for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i) {
            if (u < cumulative_[i]) return static_cast<int>(i);
        }
        return static_cast<int>(cumulative_.size()) - 1;
    }

private:
    double lambda_;
    PathRng rng_;
    std::vector<double> cumulative_;
};

// Moves the lightest server, except on every period-th fault, when it moves
// the heaviest instead.
class StickyHeavy final : public OnlineAlgorithm {
public:
    StickyHeavy(const UniformSpace& space, const WeightVector& weights,
                const Configuration& initial, std::int64_t period)
        : OnlineAlgorithm(space, weights, initial), period_(period) {
        if (period < 1) throw std::domain_error("stickyheavy: period must be >= 1");
    }

    std::string name() const override { return "stickyheavy:" + std::to_string(period_); }
    bool is_deterministic() const override { return true; }

protected:
    int pick_server(PointId) override {
        ++faults_;
        return faults_ % period_ == 0 ? weights().k() - 1 : 0;
    }

private:
    std::int64_t period_;
    std::int64_t faults_ = 0;
};

// Builds an algorithm from its CLI spelling: "cheapest",
// "weightedrank[:lambda]" (default 1) or "stickyheavy[:period]" (default 4).
// Randomized algorithms require a seed; deterministic ones ignore it.
inline std::unique_ptr<OnlineAlgorithm> make_algorithm(const std::string& spec,
                                                       const UniformSpace& space,
                                                       const WeightVector& weights,
                                                       const Configuration& initial,
                                                       std::optional<std::uint64_t> seed = {}) {
    std::string name = spec;
    std::string params;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        params = spec.substr(colon + 1);
    }

    if (name == "cheapest") {
        if (!params.empty()) throw std::invalid_argument("cheapest takes no parameters");
        return std::make_unique<CheapestMove>(space, weights, initial);
    }
    if (name == "weightedrank") {
        double lambda = 1.0;
        if (!params.empty()) {
            std::size_t used = 0;
            try {
                lambda = std::stod(params, &used);
            } catch (const std::exception&) {
                used = std::string::npos;
            }
            if (used != params.size()) {
                throw std::invalid_argument("weightedrank: bad lambda '" + params + "'");
            }
        }
        if (!seed) throw std::domain_error("weightedrank is randomized and needs a seed");
        return std::make_unique<WeightedRank>(space, weights, initial, lambda, *seed);
    }
    if (name == "stickyheavy") {
        std::int64_t period = 4;
        if (!params.empty()) {
            std::size_t used = 0;
            try {
                period = std::stoll(params, &used);
            } catch (const std::exception&) {
                used = std::string::npos;
            }
            if (used != params.size()) {
                throw std::invalid_argument("stickyheavy: bad period '" + params + "'");
            }
        }
        return std::make_unique<StickyHeavy>(space, weights, initial, period);
    }
    throw std::invalid_argument("unknown algorithm '" + name +
                                "'; expected cheapest, weightedrank[:lambda] or stickyheavy[:period]");
}

inline bool algorithm_is_deterministic(const std::string& spec) {
    std::string name = spec.substr(0, spec.find(':'));
    if (name == "cheapest" || name == "stickyheavy") return true;
    if (name == "weightedrank") return false;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

inline CostLedger run_online(OnlineAlgorithm& alg, const std::vector<PointId>& requests) {
    CostLedger ledger(alg.weights().k());
    for (PointId r : requests) {
        StepResult step = alg.serve_step(r);
        if (step.moved) ledger.record_move(*step.moved, alg.weights());
    }
    return ledger;
}

}  // namespace wks
