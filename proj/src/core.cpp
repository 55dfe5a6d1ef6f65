#include "robustplan/core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace robustplan {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw ParameterError("gamma must lie in [0, 1), got " +
                             std::to_string(gamma));
    }
}

double checked_reward(const RewardFn& reward, const State& s, ActionId a) {
    const double r = reward(s, a);
    if (!(r >= 0.0 && r <= 1.0)) {
        throw ParameterError("reward outside [0, 1]: " + std::to_string(r));
    }
    return r;
}

bool all_finite(const State& s) {
    for (double x : s) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

PlanSpec PlanSpec::open_loop(std::vector<ActionId> actions, double gamma) {
    check_gamma(gamma);
    PlanSpec plan;
    plan.horizon = static_cast<int>(actions.size());
    plan.sequence = std::move(actions);
    plan.gamma = gamma;
    return plan;
}

PlanSpec PlanSpec::policy(PolicyFn pi, int horizon, double gamma) {
    check_gamma(gamma);
    if (!pi) throw ParameterError("PlanSpec::policy: empty feedback map");
    PlanSpec plan;
    plan.feedback = std::move(pi);
    plan.horizon = horizon;
    plan.gamma = gamma;
    return plan;
}

ActionId PlanSpec::action_at(int t, const State& s) const {
    if (!sequence.empty()) {
        if (t < 0 || t >= static_cast<int>(sequence.size())) {
            throw ParameterError("plan step " + std::to_string(t) +
                                 " outside open-loop sequence of length " +
                                 std::to_string(sequence.size()));
        }
        return sequence[static_cast<std::size_t>(t)];
    }
    if (!feedback) throw ParameterError("plan has neither sequence nor feedback");
    return feedback(s);
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
    check_gamma(gamma);
    double acc = 0.0;
    double g = 1.0;
    for (double r : rewards) {
        acc += g * r;
        g *= gamma;
    }
    return acc;
}

RolloutResult rollout(const TransitionFn& model, const PlanSpec& plan,
                      const State& s0, const RewardFn& reward) {
    check_gamma(plan.gamma);
    if (plan.horizon < 1) {
        throw ParameterError("rollout requires horizon >= 1, got " +
                             std::to_string(plan.horizon));
    }
    if (!plan.sequence.empty() &&
        static_cast<int>(plan.sequence.size()) != plan.horizon) {
        throw ParameterError("open-loop sequence length does not match horizon");
    }

    RolloutResult out;
    out.trajectory.reserve(static_cast<std::size_t>(plan.horizon) + 1);
    out.rewards.reserve(static_cast<std::size_t>(plan.horizon));
    out.trajectory.push_back(s0);

    State s = s0;
    for (int t = 0; t < plan.horizon; ++t) {
        const ActionId a = plan.action_at(t, s);
        out.rewards.push_back(checked_reward(reward, s, a));
        s = model(s, a);
        if (!all_finite(s)) {
            throw SimulationDivergedError(
                static_cast<std::size_t>(t),
                "non-finite state at step " + std::to_string(t));
        }
        out.trajectory.push_back(s);
    }
    out.value = discounted_return(out.rewards, plan.gamma);
    return out;
}

namespace {

/// Depth-first enumeration sharing prefix simulations across sequences.
/// Visits sequences in lexicographic order, so keeping strict improvements
/// yields the lexicographically smallest maximizer.
struct BruteForceSearch {
    const DiscreteAmbiguitySet& amb;
    const RewardFn& reward;
    double gamma;
    int horizon;
    int K;

    std::vector<ActionId> current;
    RobustValueResult best;
    bool have_best = false;

    void run(const State& s0) {
        const int M = amb.size();
        std::vector<State> states(static_cast<std::size_t>(M), s0);
        std::vector<double> partials(static_cast<std::size_t>(M), 0.0);
        descend(states, partials, 1.0, 0);
    }

    void descend(const std::vector<State>& states,
                 const std::vector<double>& partials, double g, int depth) {
        if (depth == horizon) {
            double worst = partials[0];
            for (double p : partials) worst = std::min(worst, p);
            if (!have_best || worst > best.value) {
                best.value = worst;
                best.best_sequence = current;
                have_best = true;
            }
            return;
        }
        const int M = amb.size();
        for (ActionId a = 0; a < K; ++a) {
            std::vector<State> next(states.size());
            std::vector<double> acc(partials);
            for (int m = 0; m < M; ++m) {
                const auto mi = static_cast<std::size_t>(m);
                acc[mi] += g * checked_reward(reward, states[mi], a);
                next[mi] = amb.models[mi](states[mi], a);
            }
            current.push_back(a);
            descend(next, acc, g * gamma, depth + 1);
            current.pop_back();
        }
    }
};

}  // namespace

RobustValueResult robust_value_bruteforce(const DiscreteAmbiguitySet& amb,
                                          const State& s0,
                                          const RewardFn& reward, double gamma,
                                          int horizon, int K) {
    check_gamma(gamma);
    if (amb.size() < 1) throw ParameterError("ambiguity set must hold >= 1 model");
    if (K < 1) throw ParameterError("K must be >= 1");
    if (horizon < 1) throw ParameterError("horizon must be >= 1");

    double combos = 1.0;
    for (int t = 0; t < horizon; ++t) {
        combos *= static_cast<double>(K);
        if (combos > 1e6) {
            throw BudgetError("robust_value_bruteforce: K^horizon exceeds 10^6");
        }
    }

    BruteForceSearch search{amb, reward, gamma, horizon, K, {}, {}, false};
    search.run(s0);
    return search.best;
}

}  // namespace robustplan
