#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rsmrac/barrier.hpp"
#include "rsmrac/filters.hpp"
#include "rsmrac/mrac.hpp"

namespace rsm {

enum class FilterKind { None, PlantQP, ReferenceQP, RobustSOCP };
const char* to_string(FilterKind f);
FilterKind parse_filter(const std::string& name);   // throws ModelError on unknown

enum class BarrierKind { Sphere, Braking };

struct ScenarioConfig {
    std::uint64_t seed = 1;

    // simulated plant (truth)
    double mismatch_scale = 1.3;
    std::optional<Mat> mismatch_matrix;   // overrides the scale when set
    MismatchMode mismatch_mode = MismatchMode::VelocityRows;
    Vec lambda_sim = (Vec(3) << 0.6, 0.8, 1.1).finished();
    double drag = 0.5;   // nominal linear drag, known to the controller

    // reference model A_m = [[0, I], [-kp I, -kd I]]
    double kp = 1.0;
    double kd = 2.0;

    // adaptation
    double gamma_x = 1.0;
    double gamma_r = 1.0;
    double q_scale = 1.0;   // Q = q_scale I
    bool init_ideal = false;   // theta_hat(0) = theta*
    Vec lambda_guess = (Vec(3) << 0.612, 0.816, 1.122).finished();   // prior used for theta_hat(0)
    std::optional<double> projection_bound;   // clip theta_hat entries to [-b, b]
    bool freeze_adaptation_under_plant_qp = true;
    double matching_tol = 1e-8;   // relative to ||A_m||_F

    // obstacle
    Vec center = (Vec(3) << 5.0, 5.0, 2.5).finished();
    double radius = 2.0;
    BarrierKind barrier = BarrierKind::Braking;
    double kappa = 6.0;

    // uncertainty budget (nullopt = auto)
    std::optional<double> theta_x_bar = 0.25;
    std::optional<double> theta_r_bar = 0.08;
    std::optional<double> lambda_bar = 1.1;
    std::optional<double> L1;
    std::optional<double> L2;
    std::optional<double> vmax = 4.5;
    int lipschitz_samples = 20000;
    double lipschitz_safety = 1.1;
    double region_inflation = 0.5;
    double headroom = 1.2;

    // filter
    FilterKind filter = FilterKind::RobustSOCP;
    double gamma = 10.0;
    double rho = 0.1;
    double authority_d = 0.05;
    SocpOptions socp;

    // nominal reference policy
    Vec goal = (Vec(3) << 10.0, 10.0, 5.0).finished();
    double k_goal = 0.5;
    double r_max = 2.0;

    // initial conditions (world frame)
    Vec start_position = Vec::Zero(3);
    Vec start_velocity = Vec::Zero(3);
    Vec ref_position_offset = Vec::Zero(3);   // x_m(0) = x_p(0) + offset
    Vec ref_velocity_offset = Vec::Zero(3);

    double dt = 0.002;
    double horizon = 30.0;

    // expected safety per filter name, used by the compare report
    std::map<std::string, bool> expect_safe = {
        {"plant_qp", false}, {"reference_qp", false}, {"robust_socp", true}};

    int steps() const;
};

// Budget flag bits recorded per trace row
enum BudgetFlag : unsigned {
    kThetaXBound = 1u << 0,     // ||theta_x*-theta_x|| > theta_x_bar
    kThetaRBound = 1u << 1,
    kLambdaBound = 1u << 2,     // ||Lambda|| > lambda_bar
    kLipschitzRate = 1u << 3,   // |de_h/dt| > L2 ||de_x/dt||
    kLipschitzLevel = 1u << 4,  // |e_h| > L1 ||e_x||
    kOutsideRegion = 1u << 5,   // plant or reference state left the L1 region
};
constexpr unsigned kAssumption4Mask = kThetaXBound | kThetaRBound | kLambdaBound;

struct TraceRow {
    double t = 0.0;
    Vec x_p, x_m, r_star, r, u;   // world frame positions
    double e_x_norm = 0.0;
    double h_plant = 0.0;   // obstacle sphere at x_p
    double h_ref = 0.0;     // obstacle sphere at x_m
    double e_h = 0.0;       // filter barrier error h(x_p) - h(x_m)
    double delta = 0.0;
    double beta = 0.0;
    double eta = 0.0;
    double V = 0.0;
    std::string filter_status;
    Authority authority = Authority::Ok;
    unsigned budget_flags = 0;
    // diagnostics kept in memory only
    double e_u_norm = 0.0;
    double theta_x_err = 0.0;
    double theta_r_err = 0.0;
    double hf_plant = 0.0;   // filter barrier at x_p
    double hf_ref = 0.0;
    bool fault = false;
    bool eta_slack = false;
};

struct ResolvedBudget {
    UncertaintyBudget budget;
    double vmax = 0.0;
    std::string provenance;   // "explicit" or "auto(<rounds>)"
};

struct SimTrace {
    FilterKind filter = FilterKind::None;
    int n = 6, m = 3, p = 3;
    std::vector<TraceRow> rows;
    ResolvedBudget budget;
    Vec goal;                 // world-frame goal
    bool aborted = false;     // non-finite state, integration stopped
    std::string abort_reason;
};

struct Summary {
    double min_h_plant = 0.0;
    double min_h_ref = 0.0;
    double terminal_goal_distance = 0.0;
    double terminal_tracking_error = 0.0;
    double terminal_output_error = 0.0;
    double control_effort = 0.0;
    double smoothness = 0.0;
    int fault_count = 0;
    int budget_violation_count = 0;   // steps with a theta/lambda bound flag
    int assumption3_flag_count = 0;
    int authority_violation_count = 0;
    int eta_slack_count = 0;
    double delta_mean_first_quarter = 0.0;
    double delta_mean_last_quarter = 0.0;
    double max_r_norm = 0.0;
    double sup_theta_x_err = 0.0;
    double sup_theta_r_err = 0.0;
    int steps = 0;
    bool aborted = false;
};

// Classical RK4 on a vector state; throws ModelError on non-finite slopes.
using OdeRhs = std::function<Vec(double, const Vec&)>;
Vec rk4_step(const OdeRhs& f, const Vec& x, double t, double dt);

// r* = clamp(k_goal (p_goal - p_m), r_max) per axis
Vec nominal_reference(const Vec& goal, double k_goal, double r_max, const Vec& p_m);

// Everything the loop needs, built once from a config.
struct Scenario {
    ScenarioConfig cfg;
    PlantModel plant;       // truth
    ReferenceModel ref;
    Mat A_nom;              // controller's nominal drift
    MatchingGains matching; // truth-side ideal gains
    AdaptiveGains gains;
    AdaptiveState init;
    Vec goal;               // frame origin, world coordinates
    std::shared_ptr<BarrierFunction> filter_barrier;   // goal frame
    std::shared_ptr<SphereBarrier> safety;             // goal frame
    Vec x_p0, x_m0;         // goal frame
    Box region;             // goal frame, without velocity extent
};

Scenario build_scenario(const ScenarioConfig& cfg);   // validates, throws ModelError
Box lipschitz_region(const Scenario& sc, double vmax);
ResolvedBudget resolve_budget(const Scenario& sc);     // may run pilot simulations
SimTrace simulate(const Scenario& sc, const ResolvedBudget& rb);
SimTrace run_scenario(const ScenarioConfig& cfg);

Summary metrics(const SimTrace& trace);

}  // namespace rsm
