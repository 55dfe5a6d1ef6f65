#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robustplan/highway.hpp"
#include "robustplan/interval.hpp"

namespace robustplan {

/// Interval hull of one vehicle's kinematic state.
using VehicleIntervalState = VehicleBox;

/// Interval-valued behavioral parameters of one vehicle. theta_b pairs with
/// phi_b in the order [heading term, lateral term]:
/// theta_b = [K_p_psi, K_p_psi*K_p_y].
struct ParamIntervals {
    IntervalVector theta_a;  ///< 3 components
    IntervalVector theta_b;  ///< 2 components
};

/// Reachable-set hulls at every decision epoch t in [0, H];
/// hulls[t][i] is vehicle i's box, hulls[0] is zero-width at the observation.
struct HullTrace {
    std::vector<std::vector<VehicleIntervalState>> boxes;

    int horizon() const noexcept { return static_cast<int>(boxes.size()) - 1; }
};

/// Interval feature pair of one vehicle.
struct FeatureIntervals {
    IntervalVector phi_a;  ///< [v0 - v; n(v_f - v); n(x_f - x - (d0 + T v))]
    IntervalVector phi_b;  ///< [psi_L - psi; (1/max(v,1)) (y_L - y)]
};

/// Interval controls of one vehicle.
struct ControlIntervals {
    Interval accel;
    Interval heading_rate;  ///< taken directly as theta_b' * phi_b
};

/// Parameter intervals for the k-th uncertain vehicle of the ambiguity set.
ParamIntervals param_intervals(const HighwayContinuousAmbiguity& amb, int k);

/// Zero-width parameter intervals of a known vehicle.
ParamIntervals point_param_intervals(const BehaviorParams& params);

/**
 * @brief Interval features of vehicle i given the current joint boxes.
 *
 * front is the frozen front-vehicle index (-1 for none; braking features are
 * then the zero interval). Throws DomainError when the speed interval is not
 * strictly positive. The lateral division uses the same max(v, 1) floor as
 * the point-side lateral controller.
 */
FeatureIntervals feature_intervals(const std::vector<VehicleIntervalState>& joint,
                                   int i, int front, const Lane& lane,
                                   const TrafficRules& rules);

/// Interval dot products [theta_a]'[phi_a] and [theta_b]'[phi_b].
ControlIntervals control_intervals(const FeatureIntervals& phi,
                                   const ParamIntervals& params);

/**
 * @brief One explicit-Euler interval step.
 *
 * v' = v + dt[a]; psi' = psi + dt[rate]; x' = x + dt([v] icos([psi]));
 * y' = y + dt([v] isin([psi])). Throws DomainError when v'.lo drops to 0 or
 * below (stopped/reversing vehicle).
 */
VehicleIntervalState propagate_step(const VehicleIntervalState& state,
                                    const Interval& accel,
                                    const Interval& heading_rate, double dt);

/**
 * @brief Region-based reachable-set prediction over H decision epochs.
 *
 * Starts from zero-width boxes at the snapshot, propagates every non-ego
 * vehicle with interval features/controls/kinematics (lane assignments and
 * front vehicles frozen from the snapshot, MOBIL off) and the ego as a point
 * under its open-loop plan. The output over-approximates every trajectory of
 * the snapshot's continuous model family. H is capped at 10 epochs.
 * Domain errors are annotated with vehicle id and time.
 */
HullTrace predict_hulls(const World& snapshot, const PlanSpec& plan,
                        const HighwayContinuousAmbiguity& amb, int H,
                        double dt);

/**
 * @brief Sampling under-estimate of the same hulls.
 *
 * Element-wise min/max over n_samples model-family rollouts; the first draws
 * take the box corners over non-degenerate components (lexicographic), the
 * remainder are uniform in the box. Always a subset of the true hull.
 */
HullTrace sample_hull_estimate(const World& snapshot, const PlanSpec& plan,
                               const HighwayContinuousAmbiguity& amb, int H,
                               double dt, int n_samples, std::uint64_t seed);

/// CSV serialization: t,vehicle,x_lo,x_hi,y_lo,y_hi,v_lo,v_hi,psi_lo,psi_hi.
std::string hull_trace_to_csv(const HullTrace& trace);

}  // namespace robustplan
