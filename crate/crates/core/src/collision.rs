//! Two balls on a frictionless line with an obstacle on the right.
//!
//! Ball 1 has mass `n1·m0`, ball 2 has mass `n2·m0`; both start moving right
//! at speed `v`. One iteration is ball 2 bouncing off the obstacle (its
//! velocity flips sign) followed by an elastic collision between the two
//! balls. Positions are not tracked: only the velocity sequence matters, and
//! whenever the geometry would not allow the next collision the balls can be
//! swapped or a left wall added without changing it.
//!
//! Stored velocities `(u_n, v_n)` are those right after the `n`-th two-ball
//! collision, rightward positive. With integer-multiple masses the update is
//! the same matrix `T` as the two-level quantum model.

use std::fmt;

use crate::{Error, Regime, Result, SearchParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    mass: f64,
    pub velocity: f64,
}

impl Ball {
    pub fn new(mass: f64, velocity: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::NonPositiveMass(mass));
        }
        Ok(Self { mass, velocity })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.velocity * self.velocity
    }

    pub fn momentum(&self) -> f64 {
        self.mass * self.velocity
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionSystem {
    pub ball1: Ball,
    pub ball2: Ball,
    v_init: f64,
    m_unit: f64,
    iteration: u64,
}

impl CollisionSystem {
    /// Masses `n1·m_unit` and `n2·m_unit`, both balls moving right at `v_init`.
    pub fn from_params(params: SearchParams, v_init: f64, m_unit: f64) -> Result<Self> {
        Self::with_masses(
            params.n1() as f64 * m_unit,
            params.n2() as f64 * m_unit,
            v_init,
            m_unit,
        )
    }

    /// Arbitrary positive masses, e.g. a rational ratio `p/q`.
    pub fn with_masses(m1: f64, m2: f64, v_init: f64, m_unit: f64) -> Result<Self> {
        if !(v_init > 0.0 && v_init.is_finite()) {
            return Err(Error::NonPositiveSpeed(v_init));
        }
        if !(m_unit > 0.0 && m_unit.is_finite()) {
            return Err(Error::NonPositiveMass(m_unit));
        }
        Ok(Self {
            ball1: Ball::new(m1, v_init)?,
            ball2: Ball::new(m2, v_init)?,
            v_init,
            m_unit,
            iteration: 0,
        })
    }

    pub fn v_init(&self) -> f64 {
        self.v_init
    }

    pub fn m_unit(&self) -> f64 {
        self.m_unit
    }

    /// Completed iterations.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn velocities(&self) -> (f64, f64) {
        (self.ball1.velocity, self.ball2.velocity)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.ball1.kinetic_energy() + self.ball2.kinetic_energy()
    }

    pub fn momentum(&self) -> f64 {
        self.ball1.momentum() + self.ball2.momentum()
    }

    pub fn center_of_mass_velocity(&self) -> f64 {
        center_of_mass_velocity(
            self.ball1.mass,
            self.ball2.mass,
            self.ball1.velocity,
            self.ball2.velocity,
        )
    }

    /// Share of the total kinetic energy carried by ball 2.
    pub fn energy_fraction_ball2(&self) -> f64 {
        self.ball2.kinetic_energy() / self.kinetic_energy()
    }

    pub fn record(&self) -> IterationRecord {
        let (u, v) = self.velocities();
        IterationRecord {
            n: self.iteration,
            u,
            v,
            case_label: classify_case(u, v),
        }
    }

    /// Obstacle bounce for ball 2, then the two-ball collision.
    pub fn iterate(&self) -> (CollisionSystem, IterationRecord) {
        let ball2 = obstacle_bounce(self.ball2);
        let (u, w) = elastic_collide(
            self.ball1.mass,
            ball2.mass,
            self.ball1.velocity,
            ball2.velocity,
        );
        let next = CollisionSystem {
            ball1: Ball {
                velocity: u,
                ..self.ball1
            },
            ball2: Ball {
                velocity: w,
                ..ball2
            },
            iteration: self.iteration + 1,
            ..*self
        };
        let record = next.record();
        if record.case_label == CaseLabel::Crossed {
            log::warn!(
                "iteration {}: u={} >= 0 but v={} < 0 after collision",
                record.n,
                u,
                w
            );
        }
        (next, record)
    }

    /// Records for `n = 0..=count`, starting with the current state.
    pub fn trajectory(&self, count: u64) -> Vec<IterationRecord> {
        let mut out = Vec::with_capacity(count as usize + 1);
        out.push(self.record());
        let mut sys = *self;
        for _ in 0..count {
            let (next, rec) = sys.iterate();
            out.push(rec);
            sys = next;
        }
        out
    }
}

pub fn center_of_mass_velocity(m1: f64, m2: f64, u: f64, w: f64) -> f64 {
    (m1 * u + m2 * w) / (m1 + m2)
}

/// One-dimensional elastic collision, written as reflection through the
/// centre-of-mass velocity: each ball leaves with `2 v_c - (incoming)`.
pub fn elastic_collide(m1: f64, m2: f64, u: f64, w: f64) -> (f64, f64) {
    let vc = center_of_mass_velocity(m1, m2, u, w);
    (2.0 * vc - u, 2.0 * vc - w)
}

pub fn obstacle_bounce(ball: Ball) -> Ball {
    Ball {
        velocity: -ball.velocity,
        ..ball
    }
}

/// Direction of motion after a two-ball collision. Zero counts as rightward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    BothRightward,
    /// Ball 1 leftward, ball 2 rightward.
    Opposite,
    BothLeftward,
    /// Ball 1 rightward, ball 2 leftward. Not among the three cases of the
    /// physical picture; appears when the recursion is run past a half turn.
    Crossed,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::BothRightward => "both-rightward",
            CaseLabel::Opposite => "opposite",
            CaseLabel::BothLeftward => "both-leftward",
            CaseLabel::Crossed => "crossed",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "both-rightward" => CaseLabel::BothRightward,
            "opposite" => CaseLabel::Opposite,
            "both-leftward" => CaseLabel::BothLeftward,
            "crossed" => CaseLabel::Crossed,
            other => return Err(Error::Config(format!("unknown case label `{other}`"))),
        })
    }
}

pub fn classify_case(u: f64, v: f64) -> CaseLabel {
    match (u >= 0.0, v >= 0.0) {
        (true, true) => CaseLabel::BothRightward,
        (false, true) => CaseLabel::Opposite,
        (false, false) => CaseLabel::BothLeftward,
        (true, false) => CaseLabel::Crossed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub n: u64,
    pub u: f64,
    pub v: f64,
    pub case_label: CaseLabel,
}

/// `u_n = v sqrt(N/n1) cos((2n+1)θ)`, `v_n = v sqrt(N/n2) sin((2n+1)θ)`.
pub fn closed_form_velocities(params: SearchParams, v_init: f64, n: u64) -> (f64, f64) {
    let n_total = params.n_total() as f64;
    let angle = (2 * n + 1) as f64 * params.theta();
    (
        v_init * (n_total / params.n1() as f64).sqrt() * angle.cos(),
        v_init * (n_total / params.n2() as f64).sqrt() * angle.sin(),
    )
}

/// Velocities after the first iteration from `(v, v)`:
/// `((1 - 4 n2/N) v, (3 - 4 n2/N) v)`.
pub fn first_iteration_general(params: SearchParams, v_init: f64) -> (f64, f64) {
    let q = 4.0 * params.n2() as f64 / params.n_total() as f64;
    ((1.0 - q) * v_init, (3.0 - q) * v_init)
}

pub fn detect_regime(params: SearchParams) -> Regime {
    params.regime()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n1: u64, n2: u64) -> SearchParams {
        SearchParams::new(n1, n2).unwrap()
    }

    #[test]
    fn center_of_mass() {
        assert_eq!(center_of_mass_velocity(3.0, 1.0, 1.0, -1.0), 0.5);
        assert_eq!(center_of_mass_velocity(3.0, 5.0, 1.7, 1.7), 1.7);
        assert_eq!(center_of_mass_velocity(2.0, 2.0, 0.9, -0.9), 0.0);

        let sys = CollisionSystem::from_params(params(3, 1), 1.0, 1.0).unwrap();
        assert_eq!(sys.center_of_mass_velocity(), 1.0);
    }

    #[test]
    fn collide_examples() {
        assert_eq!(elastic_collide(7.0, 1.0, 1.0, -1.0), (0.5, 2.5));
        assert_eq!(elastic_collide(3.0, 1.0, 1.0, -1.0), (0.0, 2.0));
        for k in [0.5, 1.0, 3.0, 17.0] {
            assert_eq!(elastic_collide(k, k, 0.25, -1.5), (-1.5, 0.25));
        }
    }

    #[test]
    fn bounce() {
        let b = |v| obstacle_bounce(Ball::new(1.0, v).unwrap()).velocity;
        assert_eq!(b(1.0), -1.0);
        assert_eq!(b(0.0), 0.0);
        assert_eq!(b(-2.5), 2.5);
    }

    #[test]
    fn bad_inputs() {
        assert!(Ball::new(0.0, 1.0).is_err());
        assert!(Ball::new(-1.0, 1.0).is_err());
        assert!(CollisionSystem::with_masses(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(CollisionSystem::with_masses(1.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn worked_eight_ball_case() {
        let sys = CollisionSystem::from_params(params(7, 1), 1.0, 1.0).unwrap();
        let (s1, r1) = sys.iterate();
        assert_eq!((r1.n, r1.u, r1.v), (1, 0.5, 2.5));
        assert_eq!(r1.case_label, CaseLabel::BothRightward);
        let (_, r2) = s1.iterate();
        assert_eq!((r2.n, r2.u, r2.v), (2, -0.25, 2.75));
        assert_eq!(r2.case_label, CaseLabel::Opposite);
    }

    #[test]
    fn equal_masses_quarter_turn() {
        let mut sys = CollisionSystem::with_masses(2.0, 2.0, 1.0, 1.0).unwrap();
        sys.ball1.velocity = 0.3;
        sys.ball2.velocity = -0.8;
        let (u, v) = sys.iterate().0.velocities();
        assert!((u - 0.8).abs() < 1e-15 && (v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn cases() {
        assert_eq!(classify_case(0.5, 2.5), CaseLabel::BothRightward);
        assert_eq!(classify_case(-0.25, 2.75), CaseLabel::Opposite);
        assert_eq!(classify_case(-1.0, -0.5), CaseLabel::BothLeftward);
        assert_eq!(classify_case(0.0, 2.0), CaseLabel::BothRightward);
        assert_eq!(classify_case(0.5, -1.0), CaseLabel::Crossed);
        for c in [
            CaseLabel::BothRightward,
            CaseLabel::Opposite,
            CaseLabel::BothLeftward,
            CaseLabel::Crossed,
        ] {
            assert_eq!(c.as_str().parse::<CaseLabel>().unwrap(), c);
        }
    }

    #[test]
    fn closed_form_matches_worked_cases() {
        let (u, v) = closed_form_velocities(params(3, 1), 1.0, 1);
        assert!(u.abs() < 1e-15 && (v - 2.0).abs() < 1e-15);

        let (u, v) = closed_form_velocities(params(12, 5), 2.5, 0);
        assert!((u - 2.5).abs() < 1e-15 && (v - 2.5).abs() < 1e-15);

        let sys = CollisionSystem::from_params(params(7, 1), 1.0, 1.0).unwrap();
        let oracle = sys.iterate().0.iterate().0.velocities();
        let (u, v) = closed_form_velocities(params(7, 1), 1.0, 2);
        assert!((u - oracle.0).abs() < 1e-15 && (v - oracle.1).abs() < 1e-15);
        assert!((u + 0.25).abs() < 1e-15 && (v - 2.75).abs() < 1e-15);
    }

    #[test]
    fn first_iteration_examples() {
        assert_eq!(first_iteration_general(params(7, 1), 1.0), (0.5, 2.5));
        assert_eq!(first_iteration_general(params(12, 4), 3.0), (0.0, 6.0));
        assert_eq!(first_iteration_general(params(2, 2), 1.5), (-1.5, 1.5));
        let sys = CollisionSystem::from_params(params(2, 2), 1.5, 1.0).unwrap();
        assert_eq!(sys.iterate().0.velocities(), (-1.5, 1.5));
    }

    #[test]
    fn regimes() {
        assert_eq!(
            detect_regime(SearchParams::from_log2(10, 1).unwrap()),
            Regime::Efficient
        );
        assert_eq!(detect_regime(params(3, 1)), Regime::Boundary);
        assert_eq!(detect_regime(params(9, 9)), Regime::Invalid);
    }

    #[test]
    fn trajectory_starts_at_rest_frame() {
        let sys = CollisionSystem::from_params(params(15, 1), 1.0, 1.0).unwrap();
        let t = sys.trajectory(3);
        assert_eq!(t.len(), 4);
        assert_eq!((t[0].n, t[0].u, t[0].v), (0, 1.0, 1.0));
        assert_eq!(t[3].n, 3);
    }
}
