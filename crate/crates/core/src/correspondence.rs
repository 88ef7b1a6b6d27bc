//! Amplitude ↔ velocity dictionary and a three-way agreement check.
//!
//! Matching the closed-form velocity and amplitude trajectories gives the
//! scale between the two pictures: `u_n = v·sqrt(N)·a_n` and
//! `v_n = v·sqrt(N)·b_n`. Under the same map the probability of the marked
//! states becomes ball 2's share of the kinetic energy, and the mean
//! amplitude becomes the centre-of-mass velocity.

use std::thread;

use crate::analytic::{self, TwoLevelState};
use crate::collision::CollisionSystem;
use crate::quantum::StateVector;
use crate::{Error, Result, SearchParams};

/// Largest `N` for which [`verify_analogy`] also runs the full state vector.
pub const DEFAULT_STATEVECTOR_CAP: u64 = 1 << 20;

pub fn amplitudes_to_velocities(
    state: TwoLevelState,
    params: SearchParams,
    v_init: f64,
) -> (f64, f64) {
    let scale = v_init * (params.n_total() as f64).sqrt();
    (scale * state.a, scale * state.b)
}

pub fn velocities_to_amplitudes(
    u: f64,
    v_ball2: f64,
    params: SearchParams,
    v_init: f64,
) -> Result<TwoLevelState> {
    if !(v_init > 0.0 && v_init.is_finite()) {
        return Err(Error::NonPositiveSpeed(v_init));
    }
    let scale = v_init * (params.n_total() as f64).sqrt();
    Ok(TwoLevelState {
        a: u / scale,
        b: v_ball2 / scale,
    })
}

/// Worst disagreement seen between the engines over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalogyReport {
    /// `|u_n - v sqrt(N) a_n|` and `|v_n - v sqrt(N) b_n|`, over every
    /// amplitude engine that ran.
    pub max_velocity_residual: f64,
    /// `|n2 b_n^2 - KE2_n / KE_total|`.
    pub max_probability_energy_residual: f64,
    /// `|v_c - v sqrt(N) A|` at each two-ball collision, `A` the mean
    /// amplitude right after the oracle.
    pub max_center_residual: f64,
    /// Closed form against the recursion, in amplitude units.
    pub max_closed_form_residual: f64,
    pub steps_checked: u64,
    pub statevector_skipped: bool,
}

impl AnalogyReport {
    pub fn max_residual(&self) -> f64 {
        self.max_velocity_residual
            .max(self.max_probability_energy_residual)
            .max(self.max_center_residual)
            .max(self.max_closed_form_residual)
    }
}

/// Per-step amplitudes from one engine: `(a, b, mean after oracle)`, with
/// the mean of step `n` referring to the iteration that produced step `n`.
type AmplitudeLeg = Vec<(TwoLevelState, f64)>;

fn two_level_leg(params: SearchParams, steps: u64) -> AmplitudeLeg {
    let n = params.n_total() as f64;
    let t = analytic::build_matrix(params);
    let mut state = TwoLevelState::uniform(params);
    let mut out = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let mean = (params.n1() as f64 * state.a - params.n2() as f64 * state.b) / n;
        state = t.apply(state);
        out.push((state, mean));
    }
    out
}

fn statevector_leg(params: SearchParams, steps: u64) -> Result<AmplitudeLeg> {
    let mut sv = StateVector::init_uniform_tail(params)?;
    let first_marked = params.n1() as usize;
    let mut out = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        sv.apply_oracle();
        let mean = sv.mean();
        sv.apply_diffusion();
        let amps = sv.amplitudes();
        out.push((
            TwoLevelState {
                a: amps[0],
                b: amps[first_marked],
            },
            mean,
        ));
    }
    Ok(out)
}

pub fn verify_analogy(params: SearchParams, v_init: f64, steps: u64) -> Result<AnalogyReport> {
    verify_analogy_with_cap(params, v_init, steps, DEFAULT_STATEVECTOR_CAP)
}

/// Runs the recursion, the collision simulation and (for `N <= cap`) the
/// state vector for `steps` iterations and compares them under the
/// `v·sqrt(N)` scaling.
pub fn verify_analogy_with_cap(
    params: SearchParams,
    v_init: f64,
    steps: u64,
    statevector_cap: u64,
) -> Result<AnalogyReport> {
    if steps == 0 {
        return Err(Error::Config(
            "verify_analogy needs at least one step".into(),
        ));
    }
    if !(v_init > 0.0 && v_init.is_finite()) {
        return Err(Error::NonPositiveSpeed(v_init));
    }
    let run_statevector = params.n_total() <= statevector_cap;

    let (two_level, collision, statevector) = thread::scope(|scope| {
        let sv = run_statevector.then(|| scope.spawn(move || statevector_leg(params, steps)));
        let coll = scope.spawn(move || collision_leg(params, v_init, steps));
        let tl = two_level_leg(params, steps);
        let coll = coll.join().expect("collision leg panicked");
        let sv = sv.map(|h| h.join().expect("state-vector leg panicked"));
        (tl, coll, sv)
    });
    let collision = collision?;
    let statevector = statevector.transpose()?;

    let scale = v_init * (params.n_total() as f64).sqrt();
    let n2 = params.n2() as f64;
    let mut report = AnalogyReport {
        steps_checked: steps,
        statevector_skipped: !run_statevector,
        ..Default::default()
    };

    let legs = std::iter::once(&two_level).chain(statevector.as_ref());
    for leg in legs {
        for ((state, mean), coll) in leg.iter().zip(&collision) {
            let vel = (coll.u - scale * state.a)
                .abs()
                .max((coll.v - scale * state.b).abs());
            report.max_velocity_residual = report.max_velocity_residual.max(vel);

            let prob = n2 * state.b * state.b;
            report.max_probability_energy_residual = report
                .max_probability_energy_residual
                .max((prob - coll.energy_fraction).abs());

            report.max_center_residual = report
                .max_center_residual
                .max((coll.center_velocity - scale * mean).abs());
        }
    }

    for (n, (state, _)) in (1..).zip(&two_level) {
        let cf = analytic::closed_form(params, n);
        let r = (cf.a - state.a).abs().max((cf.b - state.b).abs());
        report.max_closed_form_residual = report.max_closed_form_residual.max(r);
    }

    Ok(report)
}

struct CollisionPoint {
    u: f64,
    v: f64,
    energy_fraction: f64,
    /// Centre-of-mass velocity during the collision, i.e. after the bounce.
    center_velocity: f64,
}

fn collision_leg(params: SearchParams, v_init: f64, steps: u64) -> Result<Vec<CollisionPoint>> {
    let mut sys = CollisionSystem::from_params(params, v_init, 1.0)?;
    let mut out = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        let mut bounced = sys;
        bounced.ball2 = crate::collision::obstacle_bounce(sys.ball2);
        let center_velocity = bounced.center_of_mass_velocity();
        let (next, rec) = sys.iterate();
        out.push(CollisionPoint {
            u: rec.u,
            v: rec.v,
            energy_fraction: next.energy_fraction_ball2(),
            center_velocity,
        });
        sys = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n1: u64, n2: u64) -> SearchParams {
        SearchParams::new(n1, n2).unwrap()
    }

    #[test]
    fn uniform_maps_to_initial_speed() {
        for (n1, n2) in [(3, 1), (7, 1), (100, 28)] {
            let p = params(n1, n2);
            let (u, v) = amplitudes_to_velocities(TwoLevelState::uniform(p), p, 1.5);
            assert!((u - 1.5).abs() < 1e-15 && (v - 1.5).abs() < 1e-15);
            let back = velocities_to_amplitudes(1.5, 1.5, p, 1.5).unwrap();
            let uni = TwoLevelState::uniform(p);
            assert!((back.a - uni.a).abs() < 1e-16 && (back.b - uni.b).abs() < 1e-16);
        }
    }

    #[test]
    fn worked_cases() {
        let p = params(7, 1);
        let r8 = 8f64.sqrt();
        let (u, v) = amplitudes_to_velocities(
            TwoLevelState {
                a: 0.5 / r8,
                b: 2.5 / r8,
            },
            p,
            2.0,
        );
        assert!((u - 1.0).abs() < 1e-15 && (v - 5.0).abs() < 1e-15);

        let p = params(3, 1);
        assert_eq!(
            amplitudes_to_velocities(TwoLevelState { a: 0.0, b: 1.0 }, p, 1.0),
            (0.0, 2.0)
        );
        assert_eq!(
            velocities_to_amplitudes(0.0, 2.0, p, 1.0).unwrap(),
            TwoLevelState { a: 0.0, b: 1.0 }
        );
    }

    #[test]
    fn inverse_rejects_bad_speed() {
        assert!(velocities_to_amplitudes(1.0, 1.0, params(3, 1), 0.0).is_err());
        assert!(verify_analogy(params(3, 1), -1.0, 3).is_err());
        assert!(verify_analogy(params(3, 1), 1.0, 0).is_err());
    }

    #[test]
    fn small_search_agrees() {
        let r = verify_analogy(params(3, 1), 1.0, 3).unwrap();
        assert!(!r.statevector_skipped);
        assert_eq!(r.steps_checked, 3);
        assert!(r.max_velocity_residual <= 1e-12, "{r:?}");
        assert!(r.max_probability_energy_residual <= 1e-12, "{r:?}");
        assert!(r.max_center_residual <= 1e-12, "{r:?}");
    }

    #[test]
    fn balanced_instance_still_maps_exactly() {
        let r = verify_analogy(params(2, 2), 1.0, 8).unwrap();
        assert!(r.max_residual() <= 1e-12, "{r:?}");
    }

    #[test]
    fn cap_skips_statevector() {
        let r = verify_analogy_with_cap(params(15, 1), 1.0, 4, 8).unwrap();
        assert!(r.statevector_skipped);
        assert!(r.max_residual() <= 1e-12);
    }
}
