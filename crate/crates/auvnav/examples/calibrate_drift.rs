//! Sweeps the drift gain over the builtin scenarios and reports the
//! largest value every scenario still executes cleanly, which is where the
//! default in `VehicleModel` comes from (with margin).

use auvnav::correction::{plan_with_restarts, PlanProblem, RestartConfig};
use auvnav::geometry::RobotBody;
use auvnav::optimizer::CostConfig;
use auvnav::scene::{builtin_scenario, BUILTIN_SCENES};
use auvnav::simulator::{run_episode, Outcome, VehicleModel};
use auvnav::tracker::TrackerConfig;

fn main() {
    let body = RobotBody::default();
    let cost = CostConfig::default();
    let restart = RestartConfig::default();

    let mut worst_safe = f64::INFINITY;
    for name in BUILTIN_SCENES {
        let scenario = builtin_scenario(name).expect("builtin");
        let problem = PlanProblem {
            start: scenario.start,
            goal: scenario.goal,
            scene: &scenario.scene,
            body: &body,
            roll_locked: scenario.roll_locked,
        };
        let report = plan_with_restarts(&problem, &restart, &cost).expect("planning");
        assert!(report.success, "{name}: planning failed");

        let mut max_ok = 0.0;
        for i in 0..=20 {
            let gain = 0.05 * i as f64;
            let model = VehicleModel {
                drift_gain: gain,
                ..VehicleModel::default()
            };
            let trace = run_episode(
                &scenario.scene,
                &body,
                &report.trajectory,
                &TrackerConfig::default(),
                &model,
                600.0,
                cost.d_min,
                None,
            );
            let clean = trace.outcome == Outcome::Success
                && trace.retries_used == 0
                && trace.metrics.min_clearance > 0.0;
            if clean {
                max_ok = gain;
            } else {
                println!("{name}: fails at gain {gain:.2} (outcome {:?})", trace.outcome);
                break;
            }
        }
        println!("{name}: max clean drift gain {max_ok:.2}");
        worst_safe = worst_safe.min(max_ok);
    }
    println!("suite-wide max clean drift gain: {worst_safe:.2}");
}
