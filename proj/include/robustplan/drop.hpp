#pragma once

#include <functional>
#include <string>
#include <vector>

#include "robustplan/core.hpp"

namespace robustplan {

/**
 * @brief One node of the joint look-ahead tree.
 *
 * A node is the action sequence from the root plus, for each of the M models,
 * the state reached by simulating that sequence and the partial discounted
 * return collected along the way. u_r / b_r are the robust lower / upper
 * values maintained by backup().
 */
struct JointTreeNode {
    std::vector<ActionId> sequence;
    int depth = 0;
    int parent = -1;
    std::vector<State> joint_states;     ///< one state per model
    std::vector<double> partial_returns; ///< sum_{t<d} gamma^t r_t per model
    std::vector<int> children;           ///< K child indices, empty for a leaf
    double u_r = 0.0;
    double b_r = 0.0;

    bool is_leaf() const noexcept { return children.empty(); }
};

/// Arena-backed tree; children always carry larger indices than their parent.
struct JointTree {
    std::vector<JointTreeNode> nodes;  ///< nodes[0] is the root
    int num_actions = 0;               ///< K
    int num_models = 0;                ///< M
    double gamma = 0.0;

    const JointTreeNode& root() const { return nodes.front(); }
};

struct DropConfig {
    double gamma = 0.8;
    int budget = 1000;      ///< number of node expansions
    int num_actions = 0;    ///< K, actions are 0..K-1

    /// Optional inspection hook, invoked after every backup pass: once before
    /// each expansion (iteration = 0..budget-1) and once after the final
    /// backup (iteration = budget). Must not mutate the tree.
    std::function<void(const JointTree&, int iteration)> observer;
};

/// One row of the per-iteration expansion trace.
struct DropTraceRow {
    int iteration = 0;  ///< 1-based expansion counter
    std::vector<ActionId> sequence;
    double u_r = 0.0;
    double b_r = 0.0;
};

struct DropDiagnostics {
    int depth = 0;      ///< d_n: maximum depth among expanded nodes
    double root_u = 0.0;
    double root_b = 0.0;
    long expansions = 0;
    long transition_calls = 0;
    std::vector<DropTraceRow> trace;
};

struct DropResult {
    ActionId action = 0;
    DropDiagnostics diagnostics;
    JointTree tree;  ///< final tree after the last backup pass
};

/**
 * @brief Expand a leaf: create its K children with simulated joint states.
 *
 * Makes exactly K*M transition calls. Each child k holds
 * joint_states[m] = T_m(node.joint_states[m], a_k) and
 * partial_returns[m] = node.partial_returns[m] + gamma^d * r(node_state_m, a_k),
 * with rewards evaluated on the pre-transition state. Throws std::logic_error
 * when the node is not a leaf.
 *
 * @return indices of the K created children, in action order.
 */
std::vector<int> expand(JointTree& tree, int node_index,
                        const DiscreteAmbiguitySet& amb, const RewardFn& reward);

/// Leaf values: u_r = min_m partial_returns[m], b_r = u_r + gamma^d/(1-gamma).
std::pair<double, double> leaf_values(const JointTreeNode& node, double gamma);

/// Recompute u_r/b_r everywhere: leaf values at leaves, max over children at
/// internal nodes, in one post-order pass.
void backup(JointTree& tree);

/**
 * @brief Robust optimistic planning over a finite model set.
 *
 * Performs exactly cfg.budget expansions, each time expanding the leaf with
 * maximal b_r (ties: lexicographically smallest action sequence), then
 * returns the root action with maximal u_r (ties: smallest action index).
 */
DropResult plan(const State& s0, const DiscreteAmbiguitySet& amb,
                const RewardFn& reward, const DropConfig& cfg);

/**
 * @brief Deliberately naive min-max baseline.
 *
 * Backs up per-model optimistic values independently (max over children per
 * model) and combines them with a min at every node. Overestimates robust
 * values whenever models disagree on the maximizing subtree; kept as the
 * wrong-ordering baseline for the counterexample test.
 */
DropResult plan_naive_minmax(const State& s0, const DiscreteAmbiguitySet& amb,
                             const RewardFn& reward, const DropConfig& cfg);

/// Render a diagnostics trace as CSV (header: iteration,sequence,u_r,b_r;
/// sequences dash-separated). Deterministic formatting.
std::string trace_to_csv(const DropDiagnostics& diag);

}  // namespace robustplan
