//! Exact one-step moment functionals and the asymptotic coefficients fitted
//! from them.
//!
//! Each family (`mu_i`, `sigma2_i`, `mu_ij`, `q_ij`) is evaluated exactly on a
//! geometric position grid and regressed on `[1, 1/x]`. Kernels that are affine
//! in `1/x` are recovered to rounding error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov_core::{stationary_distribution, StationaryDistribution, StochasticMatrix};
use crate::model::{Atom, Kernel, State};
use crate::scalar::Field;

/// Scaled fit residual above which the `o(1/x)` hypothesis looks violated.
pub const FIT_WARN_THRESHOLD: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-8;

/// Moments of the increment out of one line at one position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineMoments {
    pub mu: f64,
    pub sigma2: f64,
    /// `E[(X_{n+1} - X_n) 1{eta_{n+1} = j}]`
    pub mu_cross: Vec<f64>,
    pub q_at: Vec<f64>,
}

/// All lines at one position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMoments {
    pub at_x: f64,
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub mu_cross: Vec<Vec<f64>>,
    pub q_at: Vec<Vec<f64>>,
}

pub fn moment_functionals<K: Kernel + ?Sized>(
    model: &K,
    x: f64,
    label: usize,
) -> Result<LineMoments> {
    let mut atoms = Vec::new();
    line_moments(model, State::new(x, label), &mut atoms)
}

fn line_moments<K: Kernel + ?Sized>(
    model: &K,
    state: State,
    atoms: &mut Vec<Atom>,
) -> Result<LineMoments> {
    let n = model.labels().len();
    model.atoms_into(state, atoms)?;
    let mut m = LineMoments {
        mu: 0.0,
        sigma2: 0.0,
        mu_cross: vec![0.0; n],
        q_at: vec![0.0; n],
    };
    for a in atoms.iter() {
        m.mu += a.prob * a.jump;
        m.sigma2 += a.prob * a.jump * a.jump;
        m.mu_cross[a.next] += a.prob * a.jump;
        m.q_at[a.next] += a.prob;
    }
    Ok(m)
}

pub fn point_moments<K: Kernel + ?Sized>(model: &K, x: f64) -> Result<PointMoments> {
    let n = model.labels().len();
    let mut atoms = Vec::new();
    let mut out = PointMoments {
        at_x: x,
        mu: Vec::with_capacity(n),
        sigma2: Vec::with_capacity(n),
        mu_cross: Vec::with_capacity(n),
        q_at: Vec::with_capacity(n),
    };
    for i in 0..n {
        let m = line_moments(model, State::new(x, i), &mut atoms)?;
        out.mu.push(m.mu);
        out.sigma2.push(m.sigma2);
        out.mu_cross.push(m.mu_cross);
        out.q_at.push(m.q_at);
    }
    Ok(out)
}

/// Generalized-Lamperti data: `mu_i(x) = d_i + e_i / x`, `sigma2_i -> t2_i`,
/// `mu_ij -> d_ij`, `q_ij(x) = q_ij + gamma_ij / x`, plus `pi` of `(q_ij)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Field + Serialize",
    deserialize = "T: Field + Deserialize<'de>"
))]
pub struct AsymptoticCoefficients<T> {
    pub labels: Vec<i64>,
    pub d: Vec<T>,
    pub e: Vec<T>,
    pub t2: Vec<T>,
    pub d_cross: Vec<Vec<T>>,
    pub gamma: Vec<Vec<T>>,
    pub q_limit: StochasticMatrix<T>,
    pub pi: StationaryDistribution<T>,
    /// Max `|fit error| * x` per family; empty for asserted coefficients.
    #[serde(default)]
    pub fit_residuals: BTreeMap<String, f64>,
    /// Set when a residual exceeds [`FIT_WARN_THRESHOLD`].
    #[serde(default)]
    pub fit_warning: bool,
}

impl<T: Field> AsymptoticCoefficients<T> {
    /// Checks dimensions, `sum_j gamma_ij = 0`, `sum_j d_ij = d_i` (both to
    /// `1e-8`), `t2 >= 0` with one entry positive, and computes `pi`.
    pub fn new(
        labels: Vec<i64>,
        d: Vec<T>,
        e: Vec<T>,
        t2: Vec<T>,
        d_cross: Vec<Vec<T>>,
        gamma: Vec<Vec<T>>,
        q_limit: StochasticMatrix<T>,
    ) -> Result<Self> {
        let n = q_limit.dim();
        let square = |m: &Vec<Vec<T>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if labels.len() != n
            || d.len() != n
            || e.len() != n
            || t2.len() != n
            || !square(&d_cross)
            || !square(&gamma)
        {
            return Err(Error::Dimension(format!(
                "coefficients do not all match |S| = {n}"
            )));
        }
        let tol = T::lit(IDENTITY_TOL);
        for i in 0..n {
            let g = gamma[i].iter().cloned().fold(T::zero(), |a, b| a + b);
            if g.abs() > tol {
                return Err(Error::Invalid(format!(
                    "sum_j gamma_ij = {:e} != 0 for label {}",
                    g.approx_f64(),
                    labels[i]
                )));
            }
            let dc = d_cross[i].iter().cloned().fold(T::zero(), |a, b| a + b);
            if (dc.clone() - d[i].clone()).abs() > tol {
                return Err(Error::Invalid(format!(
                    "sum_j d_ij = {} != d_i = {} for label {}",
                    dc.approx_f64(),
                    d[i].approx_f64(),
                    labels[i]
                )));
            }
        }
        if t2.iter().any(|t| *t < T::zero()) || !t2.iter().any(|t| *t > T::zero()) {
            return Err(Error::Invalid(
                "t2 must be non-negative with at least one entry positive".into(),
            ));
        }
        let pi = stationary_distribution(&q_limit)?;
        Ok(Self {
            labels,
            d,
            e,
            t2,
            d_cross,
            gamma,
            q_limit,
            pi,
            fit_residuals: BTreeMap::new(),
            fit_warning: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.q_limit.dim()
    }

    /// `sum_i pi_i d_i`
    pub fn weighted_drift(&self) -> T {
        self.pi.weighted_sum(&self.d)
    }
}

/// Coefficients entered directly in a model document (`"type": "coefficients"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsSpec {
    pub labels: Vec<i64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub t2: Vec<f64>,
    pub d_cross: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    #[serde(default)]
    pub description: Option<String>,
}

impl CoefficientsSpec {
    pub fn build(&self) -> Result<AsymptoticCoefficients<f64>> {
        AsymptoticCoefficients::new(
            self.labels.clone(),
            self.d.clone(),
            self.e.clone(),
            self.t2.clone(),
            self.d_cross.clone(),
            self.gamma.clone(),
            StochasticMatrix::new(self.q.clone())?,
        )
    }
}

/// `10^2, 10^2.5, ..., 10^5`.
pub fn default_grid() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(2.0 + 0.5 * k as f64)).collect()
}

/// Least squares of `y` on `[1, 1/x]`: `(intercept, slope, max |error| * x)`.
fn fit_inverse_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let zs: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
    let z_mean = zs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut szz, mut szy) = (0.0, 0.0);
    for (z, y) in zs.iter().zip(ys) {
        szz += (z - z_mean) * (z - z_mean);
        szy += (z - z_mean) * (y - y_mean);
    }
    let slope = szy / szz;
    let intercept = y_mean - slope * z_mean;
    let residual = xs
        .iter()
        .zip(&zs)
        .zip(ys)
        .map(|((x, z), y)| (y - intercept - slope * z).abs() * x)
        .fold(0.0, f64::max);
    (intercept, slope, residual)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(Error::Invalid(format!(
            "fit grid needs >= 4 points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Invalid("fit grid positions must be positive".into()));
    }
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Invalid(format!(
            "fit grid spans {lo}..{hi}, need >= 2 decades"
        )));
    }
    Ok(())
}

struct Fitted {
    intercept: Vec<Vec<f64>>,
    slope: Vec<Vec<f64>>,
    residual: f64,
}

fn fit_family(grid: &[f64], samples: &[Vec<Vec<f64>>]) -> Fitted {
    let rows = samples[0].len();
    let cols = samples[0][0].len();
    let mut out = Fitted {
        intercept: vec![vec![0.0; cols]; rows],
        slope: vec![vec![0.0; cols]; rows],
        residual: 0.0,
    };
    for i in 0..rows {
        for j in 0..cols {
            let ys: Vec<f64> = samples.iter().map(|s| s[i][j]).collect();
            let (a, b, r) = fit_inverse_line(grid, &ys);
            out.intercept[i][j] = a;
            out.slope[i][j] = b;
            out.residual = out.residual.max(r);
        }
    }
    out
}

fn clean_stochastic(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            if v.abs() < 1e-10 {
                *v = 0.0;
            }
        }
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|v| *v /= total);
        }
    }
    rows
}

/// Fitted `lim q_ij(x)` with rounding-level entries zeroed and rows renormalized.
/// Rows that cannot be evaluated come back as zeros.
pub fn limiting_transitions<K: Kernel + ?Sized>(model: &K, grid: &[f64]) -> Vec<Vec<f64>> {
    let n = model.labels().len();
    let samples: Vec<Vec<Vec<f64>>> = grid
        .iter()
        .map(|&x| {
            point_moments(model, x)
                .map(|p| p.q_at)
                .unwrap_or_else(|_| vec![vec![0.0; n]; n])
        })
        .collect();
    clean_stochastic(fit_family(grid, &samples).intercept)
}

/// Regresses every moment family on `[1, 1/x]` over `grid`.
///
/// A family whose scaled residual exceeds [`FIT_WARN_THRESHOLD`] sets
/// `fit_warning`; that is a report, not a failure.
pub fn fit_asymptotics<K: Kernel + ?Sized>(
    model: &K,
    grid: &[f64],
) -> Result<AsymptoticCoefficients<f64>> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&x| point_moments(model, x))
        .collect::<Result<Vec<_>>>()?;
    let column = |f: &dyn Fn(&PointMoments) -> Vec<f64>| -> Vec<Vec<Vec<f64>>> {
        points.iter().map(|p| vec![f(p)]).collect()
    };
    let mu = fit_family(grid, &column(&|p| p.mu.clone()));
    let sigma2 = fit_family(grid, &column(&|p| p.sigma2.clone()));
    let cross = fit_family(
        grid,
        &points
            .iter()
            .map(|p| p.mu_cross.clone())
            .collect::<Vec<_>>(),
    );
    let q = fit_family(
        grid,
        &points.iter().map(|p| p.q_at.clone()).collect::<Vec<_>>(),
    );

    let q_limit = StochasticMatrix::new(clean_stochastic(q.intercept))?;
    let mut coeffs = AsymptoticCoefficients::new(
        model.labels().to_vec(),
        mu.intercept[0].clone(),
        mu.slope[0].clone(),
        sigma2.intercept[0].clone(),
        cross.intercept,
        q.slope,
        q_limit,
    )?;
    coeffs.fit_residuals = BTreeMap::from([
        ("mu".to_string(), mu.residual),
        ("sigma2".to_string(), sigma2.residual),
        ("mu_cross".to_string(), cross.residual),
        ("q".to_string(), q.residual),
    ]);
    coeffs.fit_warning = coeffs
        .fit_residuals
        .values()
        .any(|r| *r > FIT_WARN_THRESHOLD);
    Ok(coeffs)
}

/// Which decision theorem the coefficients fall under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    /// `sum pi_i d_i != 0`
    ConstantDrift,
    /// every `d_i = 0`
    Lamperti,
    /// some `d_i != 0`, `sum pi_i d_i = 0`
    GeneralizedLamperti,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegimeTag::ConstantDrift => "ConstantDrift",
            RegimeTag::Lamperti => "Lamperti",
            RegimeTag::GeneralizedLamperti => "GeneralizedLamperti",
        })
    }
}

pub fn check_regime<T: Field>(coeffs: &AsymptoticCoefficients<T>, tol: T) -> RegimeTag {
    if coeffs.weighted_drift().abs() > tol {
        RegimeTag::ConstantDrift
    } else if coeffs.d.iter().all(|d| d.abs() <= tol) {
        RegimeTag::Lamperti
    } else {
        RegimeTag::GeneralizedLamperti
    }
}
