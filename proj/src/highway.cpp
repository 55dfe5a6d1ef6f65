#include "robustplan/highway.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace robustplan {

namespace {

constexpr double kVMinCtrl = 1.0;  ///< lateral-control speed floor, m/s
constexpr int kMaxDiscreteModels = 32;
constexpr int kStateStride = 6;

double clamp(double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
}

void validate_world(const World& world) {
    if (world.vehicles.empty()) throw ParameterError("world needs >= 1 vehicle");
    if (world.road.lanes.empty()) throw ParameterError("road needs >= 1 lane");
    if (world.n_inner < 1 || world.dt_inner <= 0.0) {
        throw ParameterError("invalid inner discretization");
    }
    for (const auto& veh : world.vehicles) {
        if (veh.target_lane < 0 || veh.target_lane >= world.road.num_lanes()) {
            throw ParameterError("vehicle target lane outside road");
        }
        if (!(veh.state.v >= 0.0) || !std::isfinite(veh.state.x) ||
            !std::isfinite(veh.state.y) || !std::isfinite(veh.state.psi)) {
            throw ParameterError("invalid vehicle state");
        }
    }
}

bool past_branch(const RoadNetwork& road, double x) {
    return road.has_branch && x >= road.branch_x;
}

/// Linearized heading-rate command theta_b' * phi_b (heading term first).
double linear_heading_rate(const VehicleState& s, const Lane& lane,
                           const BehaviorParams& p) {
    // Evaluation order mirrors the interval predictor exactly so that a
    // zero-width box reproduces this point model bit-for-bit.
    const double v_eff = std::max(s.v, kVMinCtrl);
    const double heading_term = lane.psi - s.psi;
    const double lateral_term = (1.0 / v_eff) * (lane.y - s.y);
    return p.k_p_psi * heading_term + (p.k_p_psi * p.k_p_y) * lateral_term;
}

}  // namespace

int nearest_lane(const RoadNetwork& road, double y) {
    int best = 0;
    double best_d = std::abs(y - road.lanes.front().y);
    for (int i = 1; i < road.num_lanes(); ++i) {
        const double d = std::abs(y - road.lanes[static_cast<std::size_t>(i)].y);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

bool vehicles_overlap(const World& world, const VehicleState& a,
                      const VehicleState& b) {
    return std::abs(a.x - b.x) < world.car_length &&
           std::abs(a.y - b.y) < world.car_width;
}

bool ego_collision(const World& world) {
    const VehicleState& ego = world.ego().state;
    for (int i = 1; i < world.num_vehicles(); ++i) {
        if (vehicles_overlap(world, ego,
                             world.vehicles[static_cast<std::size_t>(i)].state)) {
            return true;
        }
    }
    return false;
}

int front_vehicle(const World& world, int i) {
    const auto& self = world.vehicles[static_cast<std::size_t>(i)];
    int best = -1;
    double best_dx = std::numeric_limits<double>::infinity();
    for (int j = 0; j < world.num_vehicles(); ++j) {
        if (j == i) continue;
        const auto& other = world.vehicles[static_cast<std::size_t>(j)];
        if (nearest_lane(world.road, other.state.y) != self.target_lane) continue;
        const double dx = other.state.x - self.state.x;
        if (dx > 0.0 && dx < best_dx) {
            best_dx = dx;
            best = j;
        }
    }
    return best;
}

State encode_state(const World& world) {
    State s;
    s.reserve(static_cast<std::size_t>(world.num_vehicles()) * kStateStride);
    for (const auto& veh : world.vehicles) {
        s.push_back(veh.state.x);
        s.push_back(veh.state.y);
        s.push_back(veh.state.v);
        s.push_back(veh.state.psi);
        s.push_back(veh.target_speed);
        s.push_back(static_cast<double>(veh.target_lane));
    }
    return s;
}

void apply_state(World& world, const State& s) {
    if (s.size() !=
        static_cast<std::size_t>(world.num_vehicles()) * kStateStride) {
        throw ParameterError("state dimension does not match world");
    }
    for (int i = 0; i < world.num_vehicles(); ++i) {
        auto& veh = world.vehicles[static_cast<std::size_t>(i)];
        const std::size_t base = static_cast<std::size_t>(i) * kStateStride;
        veh.state.x = s[base + 0];
        veh.state.y = s[base + 1];
        veh.state.v = s[base + 2];
        veh.state.psi = s[base + 3];
        veh.target_speed = s[base + 4];
        veh.target_lane = static_cast<int>(std::lround(s[base + 5]));
    }
}

VehicleState bicycle_step(const VehicleState& s, double a, double beta,
                          double dt, double half_length) {
    if (dt <= 0.0) throw ParameterError("bicycle_step requires dt > 0");
    VehicleState out;
    out.x = s.x + dt * s.v * std::cos(s.psi);
    out.y = s.y + dt * s.v * std::sin(s.psi);
    out.v = std::max(0.0, s.v + dt * a);
    out.psi = s.psi + dt * (s.v / half_length) * std::tan(beta);
    return out;
}

double longitudinal_accel_features(const VehicleState& self,
                                   const VehicleState* front,
                                   const BehaviorParams& params,
                                   const TrafficRules& rules) {
    const double phi0 = rules.v0 - self.v;
    double phi1 = 0.0;
    double phi2 = 0.0;
    if (front != nullptr) {
        phi1 = std::min(front->v - self.v, 0.0);
        phi2 = std::min(front->x - self.x - (rules.d0 + self.v * rules.T), 0.0);
    }
    return params.theta_a[0] * phi0 + params.theta_a[1] * phi1 +
           params.theta_a[2] * phi2;
}

double longitudinal_accel(const World& world, int i) {
    const auto& self = world.vehicles[static_cast<std::size_t>(i)];
    const int f = front_vehicle(world, i);
    const VehicleState* front =
        f >= 0 ? &world.vehicles[static_cast<std::size_t>(f)].state : nullptr;
    return longitudinal_accel_features(self.state, front, self.params,
                                       world.road.rules);
}

double lateral_steering(const VehicleState& s, const Lane& lane,
                        const BehaviorParams& params) {
    const double v_eff = std::max(s.v, kVMinCtrl);
    const double lateral_arg = clamp(params.k_p_y * (lane.y - s.y) / v_eff,
                                     -1.0, 1.0);
    const double psi_ref = lane.psi + std::asin(lateral_arg);
    const double cmd = params.k_p_psi * (psi_ref - s.psi);
    return std::atan(params.half_length / v_eff * cmd);
}

namespace {

/// Longitudinal acceleration of `subject` with an explicit hypothetical
/// front vehicle (used by MOBIL to probe configurations).
double accel_with_front(const World& world, int subject, int front) {
    const auto& self = world.vehicles[static_cast<std::size_t>(subject)];
    const VehicleState* f =
        front >= 0 ? &world.vehicles[static_cast<std::size_t>(front)].state
                   : nullptr;
    return longitudinal_accel_features(self.state, f, self.params,
                                       world.road.rules);
}

/// Nearest vehicle of `world` strictly ahead of / behind x in the given lane
/// (occupancy by nearest lane center), excluding `skip`.
int neighbour_in_lane(const World& world, int lane, double x, bool ahead,
                      int skip) {
    int best = -1;
    double best_dx = std::numeric_limits<double>::infinity();
    for (int j = 0; j < world.num_vehicles(); ++j) {
        if (j == skip) continue;
        const auto& other = world.vehicles[static_cast<std::size_t>(j)];
        if (nearest_lane(world.road, other.state.y) != lane) continue;
        const double dx = ahead ? other.state.x - x : x - other.state.x;
        if (dx > 0.0 && dx < best_dx) {
            best_dx = dx;
            best = j;
        }
    }
    return best;
}

bool mobil_accepts(const World& world, int i, int candidate_lane) {
    const auto& self = world.vehicles[static_cast<std::size_t>(i)];
    const double x = self.state.x;
    const int cur_lane = self.target_lane;

    const int cur_front = neighbour_in_lane(world, cur_lane, x, true, i);
    const int new_front = neighbour_in_lane(world, candidate_lane, x, true, i);
    const int cur_rear = neighbour_in_lane(world, cur_lane, x, false, i);
    const int new_rear = neighbour_in_lane(world, candidate_lane, x, false, i);

    // Safety: the new follower must not be forced below -b_safe.
    if (new_rear >= 0) {
        const double a_new_rear_after = accel_with_front(world, new_rear, i);
        if (a_new_rear_after <
            -world.vehicles[static_cast<std::size_t>(new_rear)].params.b_safe) {
            return false;
        }
    }

    const double a_self_before = accel_with_front(world, i, cur_front);
    const double a_self_after = accel_with_front(world, i, new_front);
    double gain = a_self_after - a_self_before;

    double rear_terms = 0.0;
    if (cur_rear >= 0) {
        const double before = accel_with_front(world, cur_rear, i);
        const double after = accel_with_front(world, cur_rear, cur_front);
        rear_terms += after - before;
    }
    if (new_rear >= 0) {
        const double before = accel_with_front(world, new_rear, new_front);
        const double after = accel_with_front(world, new_rear, i);
        rear_terms += after - before;
    }

    return gain + self.params.politeness * rear_terms >= self.params.a_min;
}

}  // namespace

MobilChoice mobil_decision(const World& world, int i) {
    const auto& self = world.vehicles[static_cast<std::size_t>(i)];
    const int left = self.target_lane + 1;
    const int right = self.target_lane - 1;
    if (left < world.road.num_lanes() && mobil_accepts(world, i, left)) {
        return MobilChoice::ChangeLeft;
    }
    if (right >= 0 && mobil_accepts(world, i, right)) {
        return MobilChoice::ChangeRight;
    }
    return MobilChoice::Stay;
}

double env_reward(const World& world) {
    if (ego_collision(world)) return 0.0;
    const auto& ego = world.ego();
    double r = clamp((ego.state.v - world.v_min) / (world.v_max - world.v_min),
                     0.0, 1.0);
    if (nearest_lane(world.road, ego.state.y) != world.ego_route_lane) {
        r *= 0.5;
    }
    return r;
}

namespace {

struct StepOptions {
    bool mobil = true;            ///< elective lane changes at epoch start
    bool enforce_routes = true;   ///< pin target lane at/after the branch
    bool freeze_on_collision = true;
    bool linear_lateral = false;  ///< non-ego heading rate = theta_b' phi_b
    /// When set, vehicle i's front is frozen_fronts[i] (-1 = none) instead of
    /// the current lane ordering.
    const std::vector<int>* frozen_fronts = nullptr;
};

void apply_ego_action(World& world, EgoAction action) {
    auto& ego = world.ego();
    switch (action) {
        case EgoAction::NoOp:
            break;
        case EgoAction::RightLane:
            ego.target_lane = std::max(0, ego.target_lane - 1);
            break;
        case EgoAction::LeftLane:
            ego.target_lane =
                std::min(world.road.num_lanes() - 1, ego.target_lane + 1);
            break;
        case EgoAction::Faster:
            ego.target_speed =
                clamp(ego.target_speed + 5.0, world.v_min, world.v_max);
            break;
        case EgoAction::Slower:
            ego.target_speed =
                clamp(ego.target_speed - 5.0, world.v_min, world.v_max);
            break;
    }
}

void step_epoch(World& world, EgoAction action, double dt, int n_inner,
                const StepOptions& opt) {
    if (opt.freeze_on_collision && ego_collision(world)) {
        return;  // absorbing overlap state
    }

    apply_ego_action(world, action);

    if (opt.mobil) {
        for (int i = 1; i < world.num_vehicles(); ++i) {
            auto& veh = world.vehicles[static_cast<std::size_t>(i)];
            if (!veh.mobil_enabled || past_branch(world.road, veh.state.x)) {
                continue;
            }
            switch (mobil_decision(world, i)) {
                case MobilChoice::ChangeLeft:
                    veh.target_lane += 1;
                    break;
                case MobilChoice::ChangeRight:
                    veh.target_lane -= 1;
                    break;
                case MobilChoice::Stay:
                    break;
            }
        }
    }

    for (int step = 0; step < n_inner; ++step) {
        if (opt.enforce_routes) {
            for (int i = 1; i < world.num_vehicles(); ++i) {
                auto& veh = world.vehicles[static_cast<std::size_t>(i)];
                if (past_branch(world.road, veh.state.x)) {
                    veh.target_lane = veh.params.route_lane;
                }
            }
        }

        // Synchronous update: all controls from the pre-step world.
        std::vector<VehicleState> next(
            static_cast<std::size_t>(world.num_vehicles()));
        for (int i = 0; i < world.num_vehicles(); ++i) {
            const auto& veh = world.vehicles[static_cast<std::size_t>(i)];
            const Lane& lane =
                world.road.lanes[static_cast<std::size_t>(veh.target_lane)];
            double accel = 0.0;
            if (i == 0) {
                accel = world.ego_accel_gain * (veh.target_speed - veh.state.v);
            } else if (opt.frozen_fronts != nullptr) {
                const int f = (*opt.frozen_fronts)[static_cast<std::size_t>(i)];
                const VehicleState* front =
                    f >= 0 ? &world.vehicles[static_cast<std::size_t>(f)].state
                           : nullptr;
                accel = longitudinal_accel_features(veh.state, front, veh.params,
                                                    world.road.rules);
            } else {
                accel = longitudinal_accel(world, i);
            }

            if (i != 0 && opt.linear_lateral) {
                // Linearized model family: integrate the heading-rate command
                // directly, matching the interval predictor.
                const double rate = linear_heading_rate(veh.state, lane,
                                                        veh.params);
                VehicleState s = veh.state;
                VehicleState out;
                out.x = s.x + dt * (s.v * std::cos(s.psi));
                out.y = s.y + dt * (s.v * std::sin(s.psi));
                out.v = std::max(0.0, s.v + dt * accel);
                out.psi = s.psi + dt * rate;
                next[static_cast<std::size_t>(i)] = out;
            } else {
                const double beta = lateral_steering(veh.state, lane, veh.params);
                next[static_cast<std::size_t>(i)] =
                    bicycle_step(veh.state, accel, beta, dt,
                                 veh.params.half_length);
            }
        }
        for (int i = 0; i < world.num_vehicles(); ++i) {
            world.vehicles[static_cast<std::size_t>(i)].state =
                next[static_cast<std::size_t>(i)];
        }

        if (opt.freeze_on_collision && ego_collision(world)) {
            return;  // freeze mid-epoch; remaining inner steps are no-ops
        }
    }
}

}  // namespace

EnvStepResult env_step(const World& world, EgoAction action, double dt_inner,
                       int n_inner) {
    validate_world(world);
    EnvStepResult out;
    out.world = world;
    step_epoch(out.world, action, dt_inner, n_inner, StepOptions{});
    out.done = ego_collision(out.world);
    out.reward = env_reward(out.world);
    return out;
}

EnvStepResult env_step(const World& world, EgoAction action) {
    return env_step(world, action, world.dt_inner, world.n_inner);
}

RewardFn make_reward(const World& snapshot) {
    return [snapshot](const State& s, ActionId) {
        World w = snapshot;
        apply_state(w, s);
        return env_reward(w);
    };
}

TransitionFn make_transition_discrete(const World& snapshot,
                                      const std::vector<int>& assignment) {
    if (assignment.size() != static_cast<std::size_t>(snapshot.num_vehicles())) {
        throw ParameterError("route assignment size mismatch");
    }
    World base = snapshot;
    for (int i = 1; i < base.num_vehicles(); ++i) {
        base.vehicles[static_cast<std::size_t>(i)].params.route_lane =
            assignment[static_cast<std::size_t>(i)];
    }
    return [base](const State& s, ActionId a) {
        World w = base;
        apply_state(w, s);
        step_epoch(w, static_cast<EgoAction>(a), w.dt_inner, w.n_inner,
                   StepOptions{});
        return encode_state(w);
    };
}

namespace {

std::vector<int> freeze_fronts(const World& snapshot) {
    std::vector<int> fronts(static_cast<std::size_t>(snapshot.num_vehicles()),
                            -1);
    for (int i = 1; i < snapshot.num_vehicles(); ++i) {
        fronts[static_cast<std::size_t>(i)] = front_vehicle(snapshot, i);
    }
    return fronts;
}

/// Write a theta slice into a vehicle's params.
void apply_theta_slice(BehaviorParams& params, const double* slice) {
    params.theta_a = {slice[0], slice[1], slice[2]};
    params.k_p_psi = slice[3];
    params.k_p_y = slice[4];
}

std::vector<int> uncertain_vehicle_indices(const World& world) {
    std::vector<int> out;
    for (int i = 1; i < world.num_vehicles(); ++i) {
        if (world.vehicles[static_cast<std::size_t>(i)].uncertain_params) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

TransitionFn make_transition_family(const World& snapshot,
                                    const std::vector<double>& theta) {
    const auto uncertain = uncertain_vehicle_indices(snapshot);
    if (theta.size() != uncertain.size() * 5) {
        throw ParameterError("theta dimension does not match uncertain vehicles");
    }
    World base = snapshot;
    for (std::size_t k = 0; k < uncertain.size(); ++k) {
        apply_theta_slice(
            base.vehicles[static_cast<std::size_t>(uncertain[k])].params,
            theta.data() + 5 * k);
    }
    const auto fronts = freeze_fronts(snapshot);
    return [base, fronts](const State& s, ActionId a) {
        World w = base;
        apply_state(w, s);
        StepOptions opt;
        opt.mobil = false;
        opt.enforce_routes = false;
        opt.freeze_on_collision = false;
        opt.linear_lateral = true;
        opt.frozen_fronts = &fronts;
        step_epoch(w, static_cast<EgoAction>(a), w.dt_inner, w.n_inner, opt);
        return encode_state(w);
    };
}

std::vector<std::vector<int>> enumerate_route_assignments(const World& world) {
    const int n = world.num_vehicles();
    std::vector<std::vector<int>> per_vehicle(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& veh = world.vehicles[static_cast<std::size_t>(i)];
        if (i == 0 || veh.route_options.size() < 2 ||
            past_branch(world.road, veh.state.x)) {
            // Committed: a revealed vehicle tracks the lane it already chose.
            const int lane = past_branch(world.road, veh.state.x)
                                 ? veh.target_lane
                                 : veh.params.route_lane;
            per_vehicle[static_cast<std::size_t>(i)] = {lane};
        } else {
            per_vehicle[static_cast<std::size_t>(i)] = veh.route_options;
        }
    }

    std::vector<std::vector<int>> assignments;
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    // Lexicographic product over vehicles' options.
    std::function<void(int)> build = [&](int i) {
        if (i == n) {
            assignments.push_back(current);
            return;
        }
        for (int lane : per_vehicle[static_cast<std::size_t>(i)]) {
            current[static_cast<std::size_t>(i)] = lane;
            build(i + 1);
        }
    };
    build(0);
    if (assignments.size() > static_cast<std::size_t>(kMaxDiscreteModels)) {
        throw BudgetError("route ambiguity explosion: " +
                          std::to_string(assignments.size()) +
                          " models exceed the cap of 32");
    }
    return assignments;
}

DiscreteAmbiguitySet make_ambiguity_discrete(const World& world) {
    validate_world(world);
    DiscreteAmbiguitySet amb;
    for (const auto& assignment : enumerate_route_assignments(world)) {
        amb.models.push_back(make_transition_discrete(world, assignment));
    }
    return amb;
}

HighwayContinuousAmbiguity make_ambiguity_continuous(const World& world) {
    validate_world(world);
    HighwayContinuousAmbiguity out;
    out.uncertain_vehicles = uncertain_vehicle_indices(world);
    for (int i : out.uncertain_vehicles) {
        const auto& veh = world.vehicles[static_cast<std::size_t>(i)];
        for (double g : veh.params.theta_a) {
            const double lo = g * veh.theta_scale_lo;
            const double hi = g * veh.theta_scale_hi;
            out.set.lower.push_back(std::min(lo, hi));
            out.set.upper.push_back(std::max(lo, hi));
        }
        // Lateral gains are known: zero-width box components.
        out.set.lower.push_back(veh.params.k_p_psi);
        out.set.upper.push_back(veh.params.k_p_psi);
        out.set.lower.push_back(veh.params.k_p_y);
        out.set.upper.push_back(veh.params.k_p_y);
    }
    World snapshot = world;
    out.set.model_family = [snapshot](const std::vector<double>& theta) {
        return make_transition_family(snapshot, theta);
    };
    return out;
}

std::vector<double> nominal_theta(const HighwayContinuousAmbiguity& amb) {
    std::vector<double> theta(amb.set.lower.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = 0.5 * (amb.set.lower[i] + amb.set.upper[i]);
    }
    return theta;
}

double reward_lower_bound(const World& ctx, const std::vector<VehicleBox>& boxes,
                          EgoAction /*action*/) {
    if (boxes.size() != static_cast<std::size_t>(ctx.num_vehicles())) {
        throw ParameterError("hull box count does not match world");
    }
    const VehicleBox& ego = boxes.front();
    if (ego.x.width() != 0.0 || ego.y.width() != 0.0 || ego.v.width() != 0.0) {
        throw ParameterError("ego box must be degenerate (point)");
    }
    const double ex = ego.x.lo;
    const double ey = ego.y.lo;
    for (std::size_t i = 1; i < boxes.size(); ++i) {
        const bool x_overlap = ex > boxes[i].x.lo - ctx.car_length &&
                               ex < boxes[i].x.hi + ctx.car_length;
        const bool y_overlap = ey > boxes[i].y.lo - ctx.car_width &&
                               ey < boxes[i].y.hi + ctx.car_width;
        if (x_overlap && y_overlap) return 0.0;
    }
    double r = clamp((ego.v.lo - ctx.v_min) / (ctx.v_max - ctx.v_min), 0.0, 1.0);
    if (nearest_lane(ctx.road, ey) != ctx.ego_route_lane) r *= 0.5;
    return r;
}

}  // namespace robustplan
