#pragma once

#include <functional>
#include <vector>

#include "robustplan/errors.hpp"

namespace robustplan {

/// Environment state: ordered real components, fixed dimension per instance.
using State = std::vector<double>;

/// Action index in [0, K).
using ActionId = int;

/// Deterministic transition s' = T(s, a).
using TransitionFn = std::function<State(const State&, ActionId)>;

/// Reward r(s, a), always within [0, 1].
using RewardFn = std::function<double(const State&, ActionId)>;

/// State-feedback policy a = pi(s).
using PolicyFn = std::function<ActionId(const State&)>;

/// Finite ambiguity set: M deterministic transition models.
struct DiscreteAmbiguitySet {
    std::vector<TransitionFn> models;

    int size() const noexcept { return static_cast<int>(models.size()); }
};

/// Continuous ambiguity set: a compact parameter box and the model family it
/// indexes. lower/upper are component-wise bounds of theta.
struct ContinuousAmbiguitySet {
    std::vector<double> lower;
    std::vector<double> upper;
    std::function<TransitionFn(const std::vector<double>&)> model_family;

    int dim() const noexcept { return static_cast<int>(lower.size()); }
};

/**
 * @brief A plan: open-loop action sequence or state-feedback map, with
 * horizon and discount.
 */
struct PlanSpec {
    std::vector<ActionId> sequence;  ///< non-empty for open-loop plans
    PolicyFn feedback;               ///< used when sequence is empty
    int horizon = 0;
    double gamma = 0.0;

    static PlanSpec open_loop(std::vector<ActionId> actions, double gamma);
    static PlanSpec policy(PolicyFn pi, int horizon, double gamma);

    /// Action to apply at step t from state s.
    ActionId action_at(int t, const State& s) const;
};

struct RolloutResult {
    std::vector<State> trajectory;  ///< trajectory[0] = s0, size horizon + 1
    std::vector<double> rewards;    ///< reward collected at each step
    double value = 0.0;             ///< discounted return of rewards
};

struct RobustValueResult {
    double value = 0.0;
    std::vector<ActionId> best_sequence;
};

/// Sum_t gamma^t r_t over a finite reward list. gamma must lie in [0, 1).
double discounted_return(const std::vector<double>& rewards, double gamma);

/**
 * @brief Simulate a plan under one deterministic model.
 *
 * trajectory[t+1] = model(trajectory[t], plan action at t); the reward at
 * step t is evaluated on the pre-transition state. Throws
 * SimulationDivergedError (carrying the step index) if any state component
 * becomes non-finite, and ParameterError for horizon < 1.
 */
RolloutResult rollout(const TransitionFn& model, const PlanSpec& plan,
                      const State& s0, const RewardFn& reward);

/**
 * @brief Exhaustive robust value over open-loop sequences.
 *
 * Maximizes, over all K^horizon action sequences, the minimum over models of
 * the horizon-truncated discounted return. Ties are broken by the
 * lexicographically smallest sequence. Guard: K^horizon <= 10^6, else
 * BudgetError.
 */
RobustValueResult robust_value_bruteforce(const DiscreteAmbiguitySet& amb,
                                          const State& s0,
                                          const RewardFn& reward, double gamma,
                                          int horizon, int K);

}  // namespace robustplan
