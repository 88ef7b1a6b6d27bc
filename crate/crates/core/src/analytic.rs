//! Exact two-amplitude model.
//!
//! Starting from the uniform superposition, all unmarked amplitudes stay
//! equal (`a`) and all marked amplitudes stay equal (`b`). One Grover
//! iteration is then the 2×2 map
//!
//! ```text
//!     | (n1 - n2)/N   -2 n2/N     |
//! T = |                           |
//!     |   2 n1/N     (n1 - n2)/N  |
//! ```
//!
//! with eigenvalues `exp(±2iθ)`, `θ = arcsin(sqrt(n2/N))`, so every power and
//! trajectory has a closed form.

use num_complex::Complex64;

use crate::dd::{ComplexDD, DoubleDouble};
use crate::{Error, Regime, Result, SearchParams};

pub type Matrix2 = [[f64; 2]; 2];
pub type ComplexMatrix2 = [[Complex64; 2]; 2];

/// Imaginary parts larger than this in a reconstructed `T^n` indicate a sign
/// error in `S` or `S^-1`.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-13;

/// Shared amplitudes: `a` on each unmarked state, `b` on each marked state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub a: f64,
    pub b: f64,
}

impl TwoLevelState {
    pub fn uniform(params: SearchParams) -> Self {
        let amp = 1.0 / (params.n_total() as f64).sqrt();
        Self { a: amp, b: amp }
    }

    /// `n1 a^2 + n2 b^2`; one for a normalised state.
    pub fn norm_squared(&self, params: SearchParams) -> f64 {
        params.n1() as f64 * self.a * self.a + params.n2() as f64 * self.b * self.b
    }

    pub fn marked_probability(&self, params: SearchParams) -> f64 {
        params.n2() as f64 * self.b * self.b
    }
}

/// Which rotation angle the closed forms use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaMode {
    /// `arcsin(sqrt(n2/N))`; closed forms are exact.
    #[default]
    Exact,
    /// Small-angle `sqrt(n2/N)`, i.e. `1/sqrt(N)` for a single marked state.
    /// Only asymptotically right; kept for comparison output.
    PaperApprox,
}

impl ThetaMode {
    pub fn theta(&self, params: SearchParams) -> f64 {
        match self {
            ThetaMode::Exact => params.theta(),
            ThetaMode::PaperApprox => (params.n2() as f64 / params.n_total() as f64).sqrt(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ThetaMode::Exact => "exact",
            ThetaMode::PaperApprox => "paper",
        }
    }
}

impl std::str::FromStr for ThetaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ThetaMode::Exact),
            "paper" | "paper-approx" => Ok(ThetaMode::PaperApprox),
            other => Err(Error::Config(format!(
                "theta mode must be `exact` or `paper`, got `{other}`"
            ))),
        }
    }
}

/// The one-iteration map `T` on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationMatrix(Matrix2);

impl IterationMatrix {
    pub fn new(params: SearchParams) -> Self {
        let n = params.n_total() as f64;
        let n1 = params.n1() as f64;
        let n2 = params.n2() as f64;
        let diag = (n1 - n2) / n;
        Self([[diag, -2.0 * n2 / n], [2.0 * n1 / n, diag]])
    }

    pub fn entries(&self) -> Matrix2 {
        self.0
    }

    pub fn determinant(&self) -> f64 {
        let [[p, q], [r, s]] = self.0;
        p * s - q * r
    }

    pub fn apply(&self, state: TwoLevelState) -> TwoLevelState {
        let (a, b) = mat_vec(&self.0, state.a, state.b);
        TwoLevelState { a, b }
    }
}

pub fn build_matrix(params: SearchParams) -> IterationMatrix {
    IterationMatrix::new(params)
}

/// One Grover iteration in the two-level model.
pub fn step(state: TwoLevelState, params: SearchParams) -> TwoLevelState {
    IterationMatrix::new(params).apply(state)
}

/// Eigen-decomposition `T = S diag(λ+, λ-) S^-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub s_matrix: ComplexMatrix2,
    pub s_inverse: ComplexMatrix2,
    pub theta: f64,
}

impl Spectral {
    /// `S^-1 M S` for an arbitrary real 2×2 `M`.
    pub fn conjugate(&self, m: &Matrix2) -> ComplexMatrix2 {
        let m = m.map(|row| row.map(Complex64::from));
        cmat_mul(&cmat_mul(&self.s_inverse, &m), &self.s_matrix)
    }
}

pub fn spectral_decompose(params: SearchParams) -> Spectral {
    let n = params.n_total() as f64;
    let n1 = params.n1() as f64;
    let n2 = params.n2() as f64;
    let re = (n1 - n2) / n;
    let im = 2.0 * (n1 * n2).sqrt() / n;
    let up = (n1 / n2).sqrt();
    let down = (n2 / n1).sqrt();
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let half = Complex64::new(0.5, 0.0);

    Spectral {
        lambda_plus: Complex64::new(re, im),
        lambda_minus: Complex64::new(re, -im),
        s_matrix: [[one, one], [-i * up, i * up]],
        s_inverse: [[half, half * i * down], [half, -half * i * down]],
        theta: params.theta(),
    }
}

/// `T^n` through the spectral form `S diag(λ+^n, λ-^n) S^-1`.
///
/// `λ+^n` is raised by repeated squaring in double-double arithmetic from
/// `λ+ = (n1 - n2 + 2i sqrt(n1 n2)) / N`, so its phase stays accurate to far
/// below an `f64` ulp even for large `n`; `λ-^n` is its conjugate. The
/// imaginary part of the reconstruction must vanish; it is checked against
/// [`IMAGINARY_RESIDUE_LIMIT`] (scaled by the largest entry) before being
/// dropped.
pub fn matrix_power(params: SearchParams, n: u64) -> Result<Matrix2> {
    let spectral = spectral_decompose(params);
    let n_total = params.n_total() as f64;
    let lambda = ComplexDD {
        re: DoubleDouble::from_f64(params.n1() as f64 - params.n2() as f64).div_f64(n_total),
        im: (DoubleDouble::from_f64(2.0)
            * DoubleDouble::sqrt_of(params.n1() as f64 * params.n2() as f64))
        .div_f64(n_total),
    };
    let power = lambda.powu(n);
    let (re, im) = (power.re.to_f64(), power.im.to_f64());
    let zero = Complex64::new(0.0, 0.0);
    let diag = [
        [Complex64::new(re, im), zero],
        [zero, Complex64::new(re, -im)],
    ];
    let full = cmat_mul(&cmat_mul(&spectral.s_matrix, &diag), &spectral.s_inverse);

    let scale = full
        .iter()
        .flatten()
        .map(|z| z.re.abs())
        .fold(1.0_f64, f64::max);
    let residue = full
        .iter()
        .flatten()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    let limit = IMAGINARY_RESIDUE_LIMIT * scale;
    if residue > limit {
        return Err(Error::ImaginaryResidue {
            power: n,
            residue,
            limit,
        });
    }
    Ok(full.map(|row| row.map(|z| z.re)))
}

/// `(a_n, b_n) = (cos((2n+1)θ)/sqrt(n1), sin((2n+1)θ)/sqrt(n2))`.
pub fn closed_form(params: SearchParams, n: u64) -> TwoLevelState {
    closed_form_with(params, n, ThetaMode::Exact)
}

pub fn closed_form_with(params: SearchParams, n: u64, mode: ThetaMode) -> TwoLevelState {
    let angle = (2 * n + 1) as f64 * mode.theta(params);
    TwoLevelState {
        a: angle.cos() / (params.n1() as f64).sqrt(),
        b: angle.sin() / (params.n2() as f64).sqrt(),
    }
}

/// `n2 b_n^2 = sin^2((2n+1)θ)`.
pub fn success_probability(params: SearchParams, n: u64) -> f64 {
    closed_form(params, n).marked_probability(params)
}

/// Optimal iteration count with regime flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimalIterations {
    pub count: u64,
    pub regime: Regime,
}

impl OptimalIterations {
    /// `n2 > N/4`: ball 1 reverses on the first iteration.
    pub fn beyond_quarter(&self) -> bool {
        matches!(self.regime, Regime::Inefficient | Regime::Invalid)
    }

    /// `n2 >= N/2`; amplification does not work at all.
    pub fn search_invalid(&self) -> bool {
        self.regime == Regime::Invalid
    }
}

/// `round(π/(4θ) - 1/2)`, ties to even, clamped at zero.
pub fn optimal_iterations(params: SearchParams) -> OptimalIterations {
    optimal_iterations_with(params, ThetaMode::Exact)
}

pub fn optimal_iterations_with(params: SearchParams, mode: ThetaMode) -> OptimalIterations {
    let raw = std::f64::consts::PI / (4.0 * mode.theta(params)) - 0.5;
    let count = raw.round_ties_even().max(0.0) as u64;
    OptimalIterations {
        count,
        regime: params.regime(),
    }
}

pub(crate) fn mat_vec(m: &Matrix2, x: f64, y: f64) -> (f64, f64) {
    (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y)
}

pub fn mat_mul(l: &Matrix2, r: &Matrix2) -> Matrix2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = l[i][0] * r[0][j] + l[i][1] * r[1][j];
        }
    }
    out
}

fn cmat_mul(l: &ComplexMatrix2, r: &ComplexMatrix2) -> ComplexMatrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = l[i][0] * r[0][j] + l[i][1] * r[1][j];
        }
    }
    out
}
