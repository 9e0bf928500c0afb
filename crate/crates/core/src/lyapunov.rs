//! The Lyapunov function `f_nu(x, i) = x^nu + (nu/2) b_i x^{nu-2}` (frozen
//! below `x0`) and numerical checks of its one-step drift against the leading
//! term `(nu/2) x^{nu-2} (2 c_i + (nu-1) s2_i + sum_j (b_j - b_i) q_ij)`.

use serde::{Deserialize, Serialize};

use crate::classify::LampertiCoefficients;
use crate::error::{Error, Result};
use crate::markov_core::{solve_strict_drift, Direction};
use crate::model::{Kernel, State};
use crate::scalar::Real;

/// Brackets closer to zero than this leave the ratio undefined.
pub const BRACKET_EPS: f64 = 1e-6;
/// Largest accepted `|ratio - 1|` at the top of the grid.
pub const RATIO_TOL: f64 = 0.05;
/// `|ratio - 1|` below this counts as exact; fitted coefficients and rounding
/// leave noise of this size on lines where the leading term is the whole answer.
pub const RATIO_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct LyapunovSpec<T> {
    pub nu: T,
    pub b: Vec<T>,
    pub x0: T,
}

impl<T: Real> LyapunovSpec<T> {
    /// `x0 = 1 + sqrt(|nu| max_i |b_i|)`.
    pub fn new(nu: T, b: Vec<T>) -> Result<Self> {
        if !nu.is_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("Lyapunov parameters must be finite".into()));
        }
        let bmax = b.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let x0 = T::one() + (nu.abs() * bmax).sqrt();
        Ok(Self { nu, b, x0 })
    }

    pub fn value(&self, x: T, label: usize) -> T {
        let y = if x >= self.x0 { x } else { self.x0 };
        let half = T::from(0.5).unwrap();
        y.powf(self.nu) + half * self.nu * self.b[label] * y.powf(self.nu - T::from(2.0).unwrap())
    }

    /// Empirical `k1, k2` with `k1 (1+x)^nu <= f_nu <= k2 (1+x)^nu` on the grid.
    pub fn bound_constants(&self, grid: &[T]) -> (T, T) {
        let mut k1 = T::infinity();
        let mut k2 = T::zero();
        for &x in grid {
            for i in 0..self.b.len() {
                let r = self.value(x, i) / (T::one() + x).powf(self.nu);
                k1 = k1.min(r);
                k2 = k2.max(r);
            }
        }
        (k1, k2)
    }
}

pub fn f_nu<T: Real>(spec: &LyapunovSpec<T>, state: State) -> T {
    spec.value(T::from(state.position).unwrap(), state.label)
}

// (y + h)^k - y^k without cancellation, for y > 0 and y + h > 0.
fn pow_diff<T: Real>(y: T, h: T, k: T) -> T {
    y.powf(k) * (k * (h / y).ln_1p()).exp_m1()
}

/// `b` making `2 c_i + (nu-1) s2_i + sum_j (b_j - b_i) q_ij` strictly negative
/// (or positive) on every line.
pub fn choose_b<T: Real>(
    lc: &LampertiCoefficients<T>,
    nu: T,
    direction: Direction,
) -> Result<Vec<T>> {
    let u = drift_weights(lc, nu);
    solve_strict_drift(&lc.q_limit, &u, direction)
}

/// `u_i = 2 c_i + (nu - 1) s2_i`.
pub fn drift_weights<T: Real>(lc: &LampertiCoefficients<T>, nu: T) -> Vec<T> {
    let two = T::from(2.0).unwrap();
    lc.c.iter()
        .zip(&lc.s2)
        .map(|(&c, &s2)| two * c + (nu - T::one()) * s2)
        .collect()
}

/// `2 c_i + (nu-1) s2_i + sum_j (b_j - b_i) q_ij` per line.
pub fn bracket<T: Real>(lc: &LampertiCoefficients<T>, spec: &LyapunovSpec<T>) -> Vec<T> {
    let u = drift_weights(lc, spec.nu);
    lc.q_limit
        .generator_apply(&spec.b)
        .into_iter()
        .zip(u)
        .map(|(g, ui)| g + ui)
        .collect()
}

/// Exact `E_{x,i}[f_nu(X_1, eta_1) - f_nu(x, i)]` by summing over atoms.
pub fn expected_f_increment<T: Real, K: Kernel + ?Sized>(
    model: &K,
    spec: &LyapunovSpec<T>,
    state: State,
) -> Result<T> {
    if spec.b.len() != model.labels().len() {
        return Err(Error::Dimension(format!(
            "b has {} entries for {} labels",
            spec.b.len(),
            model.labels().len()
        )));
    }
    let dist = model.distribution(state)?;
    let x = T::from(state.position).unwrap();
    let i = state.label;
    let half = T::from(0.5).unwrap();
    let two = T::from(2.0).unwrap();
    let mut total = T::zero();
    for a in &dist.atoms {
        let h = T::from(a.jump).unwrap();
        let p = T::from(a.prob).unwrap();
        let land = x + h;
        let diff = if x >= spec.x0 && land >= spec.x0 {
            let k = spec.nu - two;
            pow_diff(x, h, spec.nu)
                + half
                    * spec.nu
                    * (spec.b[a.next] * pow_diff(x, h, k)
                        + (spec.b[a.next] - spec.b[i]) * x.powf(k))
        } else {
            spec.value(land, a.next) - spec.value(x, i)
        };
        total = total + p * diff;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub x: f64,
    pub label: i64,
    pub exact: f64,
    pub leading: f64,
    pub bracket: f64,
    /// `exact / leading`; `None` when the bracket is within [`BRACKET_EPS`] of 0.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub nu: f64,
    pub b: Vec<f64>,
    pub rows: Vec<RatioRow>,
    /// Per label: `|ratio - 1|` non-increasing along the grid.
    pub decreasing: Vec<Option<bool>>,
    /// Per label: `|ratio - 1|` at the largest grid point.
    pub final_error: Vec<Option<f64>>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "label", "exact", "leading", "bracket", "ratio"])?;
        for r in &self.rows {
            w.write_record([
                r.x.to_string(),
                r.label.to_string(),
                format!("{:.17e}", r.exact),
                format!("{:.17e}", r.leading),
                format!("{:.17e}", r.bracket),
                r.ratio.map(|v| format!("{v:.17e}")).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Ratio of the exact `f_nu` increment to its leading term on every
/// `(x, label)` of `grid` (ascending). Passes when each line's `|ratio - 1|`
/// never increases along the grid and ends at most [`RATIO_TOL`]. Lines with
/// a vanishing bracket are reported and skipped.
pub fn verify_drift_estimate<K: Kernel + ?Sized>(
    model: &K,
    lc: &LampertiCoefficients<f64>,
    spec: &LyapunovSpec<f64>,
    grid: &[f64],
) -> Result<VerificationReport> {
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.is_empty() {
        return Err(Error::Invalid(
            "grid must be non-empty and strictly increasing".into(),
        ));
    }
    let n = model.labels().len();
    let brackets = bracket(lc, spec);
    let mut rows = Vec::with_capacity(grid.len() * n);
    let mut notes = Vec::new();
    let mut decreasing = vec![None; n];
    let mut final_error = vec![None; n];
    let mut passed = true;
    for i in 0..n {
        let label = model.labels()[i];
        let br = brackets[i];
        let defined = br.abs() >= BRACKET_EPS;
        if !defined {
            notes.push(format!(
                "label {label}: bracket {br:e} vanishes, ratio undefined"
            ));
        }
        let mut errors = Vec::with_capacity(grid.len());
        for &x in grid {
            let exact = expected_f_increment(model, spec, State::new(x, i))?;
            let leading = 0.5 * spec.nu * x.powf(spec.nu - 2.0) * br;
            let ratio = defined.then(|| exact / leading);
            if let Some(r) = ratio {
                let err = (r - 1.0).abs();
                errors.push(if err < RATIO_FLOOR { 0.0 } else { err });
            }
            rows.push(RatioRow {
                x,
                label,
                exact,
                leading,
                bracket: br,
                ratio,
            });
        }
        if defined {
            let mono = errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
            let last = *errors.last().expect("grid is non-empty");
            decreasing[i] = Some(mono);
            final_error[i] = Some(last);
            if !mono {
                notes.push(format!(
                    "label {label}: |ratio - 1| is not monotone along the grid"
                ));
            }
            if last > RATIO_TOL {
                notes.push(format!(
                    "label {label}: |ratio - 1| = {last:e} at x = {}",
                    grid[grid.len() - 1]
                ));
            }
            passed &= mono && last <= RATIO_TOL;
        }
    }
    if decreasing.iter().all(|d| d.is_none()) {
        passed = false;
        notes.push("no line has a usable bracket".into());
    }
    Ok(VerificationReport {
        nu: spec.nu,
        b: spec.b.clone(),
        rows,
        decreasing,
        final_error,
        passed,
        notes,
    })
}
