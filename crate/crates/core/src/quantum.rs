//! Full state-vector simulation of Grover iterations with real amplitudes.
//!
//! The diffusion operator `D = 2P - I` is never materialised: every
//! amplitude `c_i` maps to `2A - c_i`, where `A` is the mean amplitude. The
//! mean is accumulated with compensated summation so that sum and norm stay
//! within `1e-12` of their inputs up to `N = 2^20`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::TwoLevelState;
use crate::sum::compensated_sum;
use crate::{Error, Result, SearchParams};

pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    params: SearchParams,
    amplitudes: Vec<f64>,
    /// Sorted, distinct.
    marked: Vec<usize>,
    is_marked: Vec<bool>,
}

impl StateVector {
    /// Equal superposition `1/sqrt(N)` over all basis states.
    pub fn init_uniform(params: SearchParams, marked: &[usize]) -> Result<Self> {
        let n_total = params.n_total();
        let len = usize::try_from(n_total).map_err(|_| Error::TooLarge(n_total))?;
        if marked.len() as u64 != params.n2() {
            return Err(Error::MarkedCountMismatch {
                expected: params.n2(),
                got: marked.len(),
            });
        }

        let mut is_marked = vec![false; len];
        for &index in marked {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, n_total });
            }
            if std::mem::replace(&mut is_marked[index], true) {
                return Err(Error::DuplicateIndex(index));
            }
        }
        let mut marked = marked.to_vec();
        marked.sort_unstable();

        let amp = 1.0 / (n_total as f64).sqrt();
        Ok(Self {
            params,
            amplitudes: vec![amp; len],
            marked,
            is_marked,
        })
    }

    /// Arbitrary amplitudes; the squared norm must be one to within `1e-12`.
    pub fn from_amplitudes(
        params: SearchParams,
        amplitudes: Vec<f64>,
        marked: &[usize],
    ) -> Result<Self> {
        let mut state = Self::init_uniform(params, marked)?;
        if amplitudes.len() != state.amplitudes.len() {
            return Err(Error::InvalidSizing(format!(
                "{} amplitudes for N={}",
                amplitudes.len(),
                params.n_total()
            )));
        }
        state.amplitudes = amplitudes;
        let norm = state.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Uniform state with the last `n2` indices marked.
    pub fn init_uniform_tail(params: SearchParams) -> Result<Self> {
        let n_total =
            usize::try_from(params.n_total()).map_err(|_| Error::TooLarge(params.n_total()))?;
        let marked: Vec<usize> = (params.n1() as usize..n_total).collect();
        Self::init_uniform(params, &marked)
    }

    pub fn params(&self) -> SearchParams {
        self.params
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn is_marked(&self, index: usize) -> bool {
        self.is_marked[index]
    }

    /// Negates the amplitude of every marked state.
    pub fn apply_oracle(&mut self) {
        for &i in &self.marked {
            self.amplitudes[i] = -self.amplitudes[i];
        }
    }

    /// Inversion about the average.
    pub fn apply_diffusion(&mut self) {
        let twice_mean = 2.0 * self.mean();
        for c in &mut self.amplitudes {
            *c = twice_mean - *c;
        }
    }

    /// `count` applications of `U = D C`.
    pub fn grover_iterate(&mut self, count: u64) {
        for _ in 0..count {
            self.apply_oracle();
            self.apply_diffusion();
        }
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.amplitudes.iter().copied()) / self.amplitudes.len() as f64
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.amplitudes.iter().copied())
    }

    pub fn norm_squared(&self) -> f64 {
        compensated_sum(self.amplitudes.iter().map(|c| c * c))
    }

    pub fn marked_probability(&self) -> f64 {
        compensated_sum(self.marked.iter().map(|&i| self.amplitudes[i].powi(2)))
    }

    /// Collapses to the shared `(a, b)` pair when every unmarked amplitude
    /// agrees with the first unmarked one and every marked amplitude with the
    /// first marked one, to within `tol`.
    pub fn two_level(&self, tol: f64) -> Option<TwoLevelState> {
        let first_marked = self.marked[0];
        let first_unmarked = self.is_marked.iter().position(|m| !m)?;
        let a = self.amplitudes[first_unmarked];
        let b = self.amplitudes[first_marked];
        let uniform = self
            .amplitudes
            .iter()
            .zip(&self.is_marked)
            .all(|(&c, &m)| (c - if m { b } else { a }).abs() <= tol);
        uniform.then_some(TwoLevelState { a, b })
    }

    /// Draws `draws` basis indices with probability `amplitude_i^2`.
    ///
    /// Inverse-CDF sampling: the cumulative squared amplitudes are tabulated
    /// once, and each draw takes `x = total * U[0, 1)` from a `ChaCha8Rng`
    /// seeded with `seed_from_u64(seed)`, returning the first index whose
    /// cumulative weight exceeds `x`. Output is identical across platforms
    /// for a given seed.
    pub fn measure_sample(&self, seed: u64, draws: usize) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0;
        for c in &self.amplitudes {
            acc += c * c;
            cdf.push(acc);
        }
        let last_nonzero = self.amplitudes.iter().rposition(|&c| c != 0.0).unwrap_or(0);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..draws)
            .map(|_| {
                let x = rng.gen::<f64>() * acc;
                cdf.partition_point(|&w| w <= x).min(last_nonzero)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n1: u64, n2: u64) -> SearchParams {
        SearchParams::new(n1, n2).unwrap()
    }

    #[test]
    fn uniform_n4() {
        let s = StateVector::init_uniform(params(3, 1), &[3]).unwrap();
        assert_eq!(s.amplitudes(), &[0.5; 4]);
        assert_eq!(s.marked(), &[3]);
    }

    #[test]
    fn uniform_n8_two_marked() {
        let s = StateVector::init_uniform(params(6, 2), &[5, 0]).unwrap();
        for &c in s.amplitudes() {
            assert!((c - 0.353_553_39).abs() < 1e-8);
        }
        assert_eq!(s.marked(), &[0, 5]);
        assert!((s.marked_probability() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn init_errors() {
        let p = params(3, 1);
        assert!(matches!(
            StateVector::init_uniform(p, &[]),
            Err(Error::MarkedCountMismatch {
                expected: 1,
                got: 0
            })
        ));
        assert!(matches!(
            StateVector::init_uniform(p, &[4]),
            Err(Error::IndexOutOfRange { index: 4, .. })
        ));
        let p = params(2, 2);
        assert!(matches!(
            StateVector::init_uniform(p, &[1, 1]),
            Err(Error::DuplicateIndex(1))
        ));
        // N = 1 can't be built: SearchParams forbids it.
        assert!(SearchParams::new(0, 1).is_err());
    }

    #[test]
    fn from_amplitudes_checks_norm() {
        let p = params(1, 1);
        let h = 0.5f64.sqrt();
        let s = StateVector::from_amplitudes(p, vec![h, -h], &[1]).unwrap();
        assert_eq!(s.amplitudes(), &[h, -h]);
        assert!(matches!(
            StateVector::from_amplitudes(p, vec![1.0, 1.0], &[1]),
            Err(Error::NotNormalized(_))
        ));
        assert!(StateVector::from_amplitudes(p, vec![1.0], &[1]).is_err());
    }

    #[test]
    fn oracle_flips_marked_only() {
        let mut s = StateVector::init_uniform(params(3, 1), &[3]).unwrap();
        s.apply_oracle();
        assert_eq!(s.amplitudes(), &[0.5, 0.5, 0.5, -0.5]);

        let mut s = StateVector::init_uniform(params(6, 2), &[0, 5]).unwrap();
        let amp = 8f64.sqrt().recip();
        s.apply_oracle();
        for (i, &c) in s.amplitudes().iter().enumerate() {
            let expected = if i == 0 || i == 5 { -amp } else { amp };
            assert_eq!(c, expected);
        }
        s.apply_oracle();
        assert_eq!(s.amplitudes(), &[amp; 8]);
    }

    #[test]
    fn diffusion_examples() {
        let mut s = StateVector::init_uniform(params(3, 1), &[3]).unwrap();
        s.apply_diffusion();
        assert_eq!(s.amplitudes(), &[0.5; 4]);

        s.apply_oracle();
        s.apply_diffusion();
        assert_eq!(s.amplitudes(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn grover_worked_cases() {
        let mut s = StateVector::init_uniform(params(3, 1), &[3]).unwrap();
        s.grover_iterate(0);
        assert_eq!(s.amplitudes(), &[0.5; 4]);
        s.grover_iterate(1);
        assert_eq!(s.amplitudes(), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.marked_probability(), 1.0);

        let mut s = StateVector::init_uniform(params(7, 1), &[7]).unwrap();
        s.grover_iterate(2);
        let expected = 11.0 / 4.0 / 8f64.sqrt();
        assert!((s.amplitudes()[7] - expected).abs() < 1e-15);
        assert!((expected - 0.972_272).abs() < 1e-6);
    }

    #[test]
    fn two_level_reduction() {
        let mut s = StateVector::init_uniform(params(13, 3), &[1, 8, 11]).unwrap();
        s.grover_iterate(2);
        let tl = s.two_level(1e-15).unwrap();
        assert_eq!(tl.a, s.amplitudes()[0]);
        assert_eq!(tl.b, s.amplitudes()[8]);

        s.amplitudes[2] += 1e-3;
        assert!(s.two_level(1e-12).is_none());
    }

    #[test]
    fn deterministic_state_always_samples_same_index() {
        let mut s = StateVector::init_uniform(params(3, 1), &[3]).unwrap();
        s.grover_iterate(1);
        assert!(s.measure_sample(7, 1000).iter().all(|&i| i == 3));
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = StateVector::init_uniform(params(12, 4), &[0, 1, 2, 3]).unwrap();
        assert_eq!(s.measure_sample(42, 500), s.measure_sample(42, 500));
        assert_ne!(s.measure_sample(42, 500), s.measure_sample(43, 500));
    }

    #[test]
    fn uniform_frequencies_within_four_sigma() {
        let s = StateVector::init_uniform(params(3, 1), &[0]).unwrap();
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for i in s.measure_sample(2024, draws) {
            counts[i] += 1;
        }
        let sigma = (0.25 * 0.75 / draws as f64).sqrt();
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.25).abs() <= 4.0 * sigma, "freq {freq}");
        }
    }

    #[test]
    fn post_optimal_marked_frequency() {
        let mut s = StateVector::init_uniform(params(15, 1), &[7]).unwrap();
        s.grover_iterate(3);
        let p = s.marked_probability();
        let draws = 100_000;
        let hits = s
            .measure_sample(99, draws)
            .iter()
            .filter(|&&i| i == 7)
            .count();
        let freq = hits as f64 / draws as f64;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((freq - p).abs() <= 4.0 * sigma, "freq {freq} vs p {p}");
    }
}
