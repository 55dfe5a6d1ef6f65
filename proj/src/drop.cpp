#include "robustplan/drop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace robustplan {

namespace {

double checked_reward(const RewardFn& reward, const State& s, ActionId a) {
    const double r = reward(s, a);
    if (!(r >= 0.0 && r <= 1.0)) {
        throw ParameterError("reward outside [0, 1]: " + std::to_string(r));
    }
    return r;
}

double tail(double gamma, int depth) {
    return std::pow(gamma, depth) / (1.0 - gamma);
}

/// Lexicographic comparison of action sequences.
bool sequence_less(const std::vector<ActionId>& a,
                   const std::vector<ActionId>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::vector<int> expand(JointTree& tree, int node_index,
                        const DiscreteAmbiguitySet& amb,
                        const RewardFn& reward) {
    auto& nodes = tree.nodes;
    if (!nodes[static_cast<std::size_t>(node_index)].is_leaf()) {
        throw std::logic_error("expand: node is not a leaf");
    }
    const int K = tree.num_actions;
    const int M = tree.num_models;
    const double g_d =
        std::pow(tree.gamma, nodes[static_cast<std::size_t>(node_index)].depth);

    std::vector<int> created;
    created.reserve(static_cast<std::size_t>(K));
    for (ActionId a = 0; a < K; ++a) {
        JointTreeNode child;
        {
            // nodes may reallocate inside the loop; re-take the reference.
            const auto& parent = nodes[static_cast<std::size_t>(node_index)];
            child.sequence = parent.sequence;
            child.sequence.push_back(a);
            child.depth = parent.depth + 1;
            child.parent = node_index;
            child.joint_states.reserve(static_cast<std::size_t>(M));
            child.partial_returns.reserve(static_cast<std::size_t>(M));
            for (int m = 0; m < M; ++m) {
                const auto mi = static_cast<std::size_t>(m);
                const double r =
                    checked_reward(reward, parent.joint_states[mi], a);
                child.partial_returns.push_back(parent.partial_returns[mi] +
                                                g_d * r);
                child.joint_states.push_back(
                    amb.models[mi](parent.joint_states[mi], a));
            }
        }
        const int child_index = static_cast<int>(nodes.size());
        nodes.push_back(std::move(child));
        nodes[static_cast<std::size_t>(node_index)].children.push_back(
            child_index);
        created.push_back(child_index);
    }
    return created;
}

std::pair<double, double> leaf_values(const JointTreeNode& node, double gamma) {
    double u = node.partial_returns.front();
    for (double p : node.partial_returns) u = std::min(u, p);
    return {u, u + tail(gamma, node.depth)};
}

void backup(JointTree& tree) {
    auto& nodes = tree.nodes;
    // Children always have larger arena indices than their parent, so a
    // reverse index sweep is a valid post-order traversal.
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        if (it->is_leaf()) {
            const auto [u, b] = leaf_values(*it, tree.gamma);
            it->u_r = u;
            it->b_r = b;
        } else {
            double u = -1.0, b = -1.0;
            for (int c : it->children) {
                const auto& child = nodes[static_cast<std::size_t>(c)];
                u = std::max(u, child.u_r);
                b = std::max(b, child.b_r);
            }
            it->u_r = u;
            it->b_r = b;
        }
    }
}

namespace {

/// Per-model optimistic values used by the naive baseline.
struct NaiveValues {
    std::vector<double> u;  ///< nodes * M, row-major
    std::vector<double> b;
};

void backup_naive(JointTree& tree, NaiveValues& vals) {
    auto& nodes = tree.nodes;
    const int M = tree.num_models;
    const auto stride = static_cast<std::size_t>(M);
    vals.u.resize(nodes.size() * stride);
    vals.b.resize(nodes.size() * stride);
    for (std::size_t rev = nodes.size(); rev-- > 0;) {
        auto& node = nodes[rev];
        const std::size_t base = rev * stride;
        if (node.is_leaf()) {
            const double t = tail(tree.gamma, node.depth);
            for (int m = 0; m < M; ++m) {
                const double um = node.partial_returns[static_cast<std::size_t>(m)];
                vals.u[base + static_cast<std::size_t>(m)] = um;
                vals.b[base + static_cast<std::size_t>(m)] = um + t;
            }
        } else {
            for (int m = 0; m < M; ++m) {
                double um = -1.0, bm = -1.0;
                for (int c : node.children) {
                    const std::size_t cb =
                        static_cast<std::size_t>(c) * stride +
                        static_cast<std::size_t>(m);
                    um = std::max(um, vals.u[cb]);
                    bm = std::max(bm, vals.b[cb]);
                }
                vals.u[base + static_cast<std::size_t>(m)] = um;
                vals.b[base + static_cast<std::size_t>(m)] = bm;
            }
        }
        // Min-combine per-model values into the node's robust fields.
        double u = vals.u[base], b = vals.b[base];
        for (int m = 1; m < M; ++m) {
            u = std::min(u, vals.u[base + static_cast<std::size_t>(m)]);
            b = std::min(b, vals.b[base + static_cast<std::size_t>(m)]);
        }
        node.u_r = u;
        node.b_r = b;
    }
}

DropResult run_planner(const State& s0, const DiscreteAmbiguitySet& amb,
                       const RewardFn& reward, const DropConfig& cfg,
                       bool naive) {
    if (cfg.budget < 1) throw ParameterError("DROP budget must be >= 1");
    if (cfg.num_actions < 1) throw ParameterError("DROP needs num_actions >= 1");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
        throw ParameterError("gamma must lie in [0, 1)");
    }
    if (amb.size() < 1) throw ParameterError("ambiguity set must hold >= 1 model");

    JointTree tree;
    tree.num_actions = cfg.num_actions;
    tree.num_models = amb.size();
    tree.gamma = cfg.gamma;
    tree.nodes.reserve(static_cast<std::size_t>(cfg.budget) *
                           static_cast<std::size_t>(cfg.num_actions) +
                       1);
    JointTreeNode root;
    root.joint_states.assign(static_cast<std::size_t>(amb.size()), s0);
    root.partial_returns.assign(static_cast<std::size_t>(amb.size()), 0.0);
    tree.nodes.push_back(std::move(root));

    NaiveValues naive_vals;
    const auto run_backup = [&] {
        if (naive) {
            backup_naive(tree, naive_vals);
        } else {
            backup(tree);
        }
    };

    DropResult out;
    auto& diag = out.diagnostics;
    diag.trace.reserve(static_cast<std::size_t>(cfg.budget));

    for (int iter = 0; iter < cfg.budget; ++iter) {
        run_backup();
        if (cfg.observer) cfg.observer(tree, iter);

        // Select the b_r-maximizing leaf, lexicographic tie-break.
        int best = -1;
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            if (!node.is_leaf()) continue;
            if (best < 0) {
                best = static_cast<int>(i);
                continue;
            }
            const auto& incumbent = tree.nodes[static_cast<std::size_t>(best)];
            if (node.b_r > incumbent.b_r ||
                (node.b_r == incumbent.b_r &&
                 sequence_less(node.sequence, incumbent.sequence))) {
                best = static_cast<int>(i);
            }
        }

        const auto& chosen = tree.nodes[static_cast<std::size_t>(best)];
        diag.trace.push_back(
            {iter + 1, chosen.sequence, chosen.u_r, chosen.b_r});
        diag.depth = std::max(diag.depth, chosen.depth);

        expand(tree, best, amb, reward);
        diag.expansions += 1;
        diag.transition_calls +=
            static_cast<long>(cfg.num_actions) * amb.size();
    }

    run_backup();
    if (cfg.observer) cfg.observer(tree, cfg.budget);

    // Root action with maximal u_r; strict improvement keeps the smallest
    // action index on ties.
    const auto& root_node = tree.root();
    ActionId action = 0;
    double best_u = -1.0;
    for (std::size_t k = 0; k < root_node.children.size(); ++k) {
        const auto& child =
            tree.nodes[static_cast<std::size_t>(root_node.children[k])];
        if (child.u_r > best_u) {
            best_u = child.u_r;
            action = static_cast<ActionId>(k);
        }
    }

    diag.root_u = root_node.u_r;
    diag.root_b = root_node.b_r;
    out.action = action;
    out.tree = std::move(tree);
    return out;
}

}  // namespace

DropResult plan(const State& s0, const DiscreteAmbiguitySet& amb,
                const RewardFn& reward, const DropConfig& cfg) {
    return run_planner(s0, amb, reward, cfg, /*naive=*/false);
}

DropResult plan_naive_minmax(const State& s0, const DiscreteAmbiguitySet& amb,
                             const RewardFn& reward, const DropConfig& cfg) {
    return run_planner(s0, amb, reward, cfg, /*naive=*/true);
}

std::string trace_to_csv(const DropDiagnostics& diag) {
    std::string out = "iteration,sequence,u_r,b_r\n";
    char buf[64];
    for (const auto& row : diag.trace) {
        out += std::to_string(row.iteration);
        out += ',';
        for (std::size_t i = 0; i < row.sequence.size(); ++i) {
            if (i > 0) out += '-';
            out += std::to_string(row.sequence[i]);
        }
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", row.u_r, row.b_r);
        out += buf;
    }
    return out;
}

}  // namespace robustplan
