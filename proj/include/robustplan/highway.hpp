#pragma once

#include <array>
#include <optional>
#include <vector>

#include "robustplan/core.hpp"
#include "robustplan/interval.hpp"

namespace robustplan {

/// Kinematic bicycle state of one traffic participant.
struct VehicleState {
    double x = 0.0;    ///< longitudinal position, m
    double y = 0.0;    ///< lateral position, m
    double v = 0.0;    ///< forward speed, m/s (never negative)
    double psi = 0.0;  ///< heading, rad
};

/// Per-vehicle behavioral parameters: longitudinal feature gains theta_a,
/// lateral cascade gains (forming theta_b = [K_p_psi, K_p_psi*K_p_y]),
/// MOBIL constants, the committed route, and geometry.
struct BehaviorParams {
    std::array<double, 3> theta_a{0.5, 1.0, 0.5};
    double k_p_psi = 2.0;
    double k_p_y = 0.2;
    double politeness = 0.5;   ///< MOBIL p
    double b_safe = 4.0;       ///< MOBIL safe braking limit, m/s^2
    double a_min = 0.2;        ///< MOBIL incentive threshold, m/s^2
    int route_lane = 0;        ///< lane adopted at/after the branch point
    double half_length = 2.5;  ///< bicycle-model l, m
};

struct Lane {
    double y = 0.0;    ///< lane center y_L, m
    double psi = 0.0;  ///< lane heading psi_L, rad
};

struct TrafficRules {
    double v0 = 25.0;  ///< speed limit, m/s
    double d0 = 10.0;  ///< jam distance, m
    double T = 1.5;    ///< time gap, s
};

/// Straight multi-lane road with one optional branch point. Lanes are indexed
/// bottom-up (lane i+1 lies to the left of lane i); adjacency is |i-j| = 1.
struct RoadNetwork {
    std::vector<Lane> lanes;
    double lane_width = 4.0;
    bool has_branch = false;
    double branch_x = 0.0;  ///< route choices activate at x >= branch_x
    TrafficRules rules;

    int num_lanes() const noexcept { return static_cast<int>(lanes.size()); }
};

/// Ego tactical decisions; K = 5.
enum class EgoAction : int {
    NoOp = 0,
    RightLane = 1,
    LeftLane = 2,
    Faster = 3,
    Slower = 4,
};
inline constexpr int kNumEgoActions = 5;

struct Vehicle {
    VehicleState state;
    double target_speed = 25.0;  ///< tracked by the ego's speed controller
    int target_lane = 0;         ///< lane currently tracked laterally
    BehaviorParams params;
    bool mobil_enabled = false;       ///< elective lane changes (non-ego only)
    std::vector<int> route_options;   ///< branch continuations; >=2 => uncertain
    bool uncertain_params = false;    ///< theta_a inside the continuous box
    double theta_scale_lo = 0.7;      ///< box = theta_a * [lo, hi] per component
    double theta_scale_hi = 1.3;
};

/// Full environment snapshot: configuration plus current dynamic state.
/// vehicles[0] is the ego.
struct World {
    RoadNetwork road;
    std::vector<Vehicle> vehicles;
    double dt_inner = 0.1;  ///< inner integration step, s
    int n_inner = 10;       ///< inner steps per decision epoch
    double v_min = 10.0;    ///< reward floor speed, m/s
    double v_max = 30.0;    ///< reward ceiling speed, m/s
    double car_length = 5.0;
    double car_width = 2.0;
    double ego_accel_gain = 1.5;  ///< ego speed controller a = gain*(vt - v)
    int ego_route_lane = 0;       ///< planned route; reward halved off it

    const Vehicle& ego() const { return vehicles.front(); }
    Vehicle& ego() { return vehicles.front(); }
    int num_vehicles() const noexcept { return static_cast<int>(vehicles.size()); }
};

/// Interval hull of one vehicle's state (degenerate for known vehicles).
struct VehicleBox {
    Interval x, y, v, psi;

    static VehicleBox point(const VehicleState& s) {
        return {Interval::point(s.x), Interval::point(s.y),
                Interval::point(s.v), Interval::point(s.psi)};
    }
};

enum class MobilChoice { Stay, ChangeLeft, ChangeRight };

struct EnvStepResult {
    World world;
    double reward = 0.0;
    bool done = false;
};

// ---------------------------------------------------------------------------
// Geometry / bookkeeping helpers
// ---------------------------------------------------------------------------

/// Index of the lane whose center is nearest to y (ties: lower index).
int nearest_lane(const RoadNetwork& road, double y);

/// Axis-aligned footprint overlap between two vehicle centers.
bool vehicles_overlap(const World& world, const VehicleState& a,
                      const VehicleState& b);

/// True when the ego footprint overlaps any other vehicle.
bool ego_collision(const World& world);

/// Front vehicle of i: nearest vehicle strictly ahead in x among those whose
/// nearest lane equals i's target lane. Returns -1 when the lane is clear.
int front_vehicle(const World& world, int i);

/// Flat state vector layout: per vehicle [x, y, v, psi, target_speed,
/// target_lane], ego first. Dimension 6 * num_vehicles.
State encode_state(const World& world);

/// Overwrite the dynamic fields of `world` from a flat state vector.
void apply_state(World& world, const State& s);

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

/// One explicit-Euler kinematic bicycle step; position/heading derivatives use
/// the pre-update state and v is clamped at 0.
VehicleState bicycle_step(const VehicleState& s, double a, double beta,
                          double dt, double half_length);

/// Longitudinal feature law a = theta_a' * phi_a with
/// phi_a = [v0 - v; n(v_f - v); n(x_f - x - (d0 + v*T))], n(x) = min(x, 0).
/// Passing front = nullptr zeroes the braking features.
double longitudinal_accel_features(const VehicleState& self,
                                   const VehicleState* front,
                                   const BehaviorParams& params,
                                   const TrafficRules& rules);

/// Same, resolving the front vehicle from the world (current lane ordering).
double longitudinal_accel(const World& world, int i);

/// Nonlinear lateral cascade: beta = atan((l/v_eff) * K_p_psi * (psi_L +
/// asin(clamp(K_p_y (y_L - y) / v_eff)) - psi)), v_eff = max(v, 1).
double lateral_steering(const VehicleState& s, const Lane& lane,
                        const BehaviorParams& params);

/// MOBIL elective lane change for vehicle i (left candidate evaluated first).
MobilChoice mobil_decision(const World& world, int i);

/// Advance one decision epoch: apply the ego action, run MOBIL, enforce
/// routes at the branch, then n_inner bicycle steps under all controllers.
/// The world freezes when the ego collides (absorbing overlap state); the
/// epoch reward is 0 with done=true on collision, else the ego speed term
/// clamp((v - v_min)/(v_max - v_min), 0, 1), halved off the planned route.
EnvStepResult env_step(const World& world, EgoAction action, double dt_inner,
                       int n_inner);
EnvStepResult env_step(const World& world, EgoAction action);

/// The same reward as env_step, evaluated as a pure state predicate (used as
/// the planning reward r(s, a); the action does not influence it).
double env_reward(const World& world);

// ---------------------------------------------------------------------------
// Planning-side factories
// ---------------------------------------------------------------------------

/// Reward function over flat states for planners: decodes into a copy of the
/// snapshot and evaluates env_reward.
RewardFn make_reward(const World& snapshot);

/// Deterministic epoch transition with the given per-vehicle route
/// assignment (exact environment dynamics: MOBIL, nonlinear lateral control,
/// collision freezing). assignment[i] is vehicle i's route lane; entry 0
/// (ego) is ignored.
TransitionFn make_transition_discrete(const World& snapshot,
                                      const std::vector<int>& assignment);

/**
 * @brief Epoch transition of the continuous model family T_theta.
 *
 * Matches the interval predictor exactly: routes and front-vehicle
 * assignments frozen from the snapshot, MOBIL off, non-ego lateral control in
 * linearized form (psi_dot = theta_b' * phi_b), no collision freezing. The
 * ego runs its exact controllers. theta stacks [theta_a(3), K_p_psi, K_p_y]
 * per uncertain vehicle, in vehicle-index order.
 */
TransitionFn make_transition_family(const World& snapshot,
                                    const std::vector<double>& theta);

/// Route assignments enumerated lexicographically over uncertain vehicles
/// (vehicles past the branch point count as committed). assignments[k][i] is
/// vehicle i's route lane in model k.
std::vector<std::vector<int>> enumerate_route_assignments(const World& world);

/// Finite ambiguity set: one exact model per route assignment. Throws
/// BudgetError when more than 32 models would be required.
DiscreteAmbiguitySet make_ambiguity_discrete(const World& world);

/// Continuous ambiguity set plus the vehicle-to-slice mapping.
struct HighwayContinuousAmbiguity {
    ContinuousAmbiguitySet set;
    std::vector<int> uncertain_vehicles;  ///< vehicle index per 5-wide theta slice
};

/// Parameter box over uncertain vehicles' theta_a (scaled per component) with
/// zero-width lateral gains; model_family = make_transition_family.
HighwayContinuousAmbiguity make_ambiguity_continuous(const World& world);

/// Center of the continuous box (the nominal parameter vector).
std::vector<double> nominal_theta(const HighwayContinuousAmbiguity& amb);

// ---------------------------------------------------------------------------
// Box reward bound (consumed by IRC)
// ---------------------------------------------------------------------------

/**
 * @brief Exact minimum of the env reward over per-vehicle hull boxes.
 *
 * boxes[0] is the ego and must be degenerate (the ego is a point under
 * open-loop plans). Returns 0 when the ego footprint can overlap any
 * vehicle's box inflated by the footprint extents; otherwise the ego speed
 * term, halved when the ego sits off the planned route. The action does not
 * influence the env reward; it is accepted to mirror r(s, a).
 */
double reward_lower_bound(const World& ctx, const std::vector<VehicleBox>& boxes,
                          EgoAction action);

}  // namespace robustplan
