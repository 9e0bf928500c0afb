//! Decision rules: constant drift, Lamperti drift, and generalized Lamperti
//! drift via the shift `X + a_eta` that removes the constant drift parts.
//!
//! With `U = sum_i 2 c_i pi_i` and `V = sum_i s2_i pi_i` (Lamperti), or their
//! generalized counterparts from [`compute_uv`], the verdict is
//!
//! | condition              | verdict                                        |
//! |------------------------|------------------------------------------------|
//! | `U - V > tol`          | transient                                      |
//! | `U + V < -tol`         | positive recurrent                             |
//! | `abs(U) < V - tol`     | null recurrent                                 |
//! | `abs(abs(U) - V) <= tol` | null recurrent if the refined rates hold, else indeterminate |

use serde::{Deserialize, Serialize};

use crate::drift::{check_regime, AsymptoticCoefficients, RegimeTag};
use crate::error::{Error, Result};
use crate::markov_core::{
    solve_poisson, PoissonSolution, StationaryDistribution, StochasticMatrix,
};
use crate::scalar::Field;

/// Band for analytic coefficients.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Band for coefficients fitted from a kernel.
pub const FITTED_TOL: f64 = 1e-4;

/// Per-line Lamperti data: `mu_i(x) = c_i / x + o(1/x)`, `sigma2_i(x) -> s2_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Field + Serialize",
    deserialize = "T: Field + Deserialize<'de>"
))]
pub struct LampertiCoefficients<T> {
    pub labels: Vec<i64>,
    pub c: Vec<T>,
    pub s2: Vec<T>,
    pub q_limit: StochasticMatrix<T>,
    pub pi: StationaryDistribution<T>,
}

impl<T: Field> LampertiCoefficients<T> {
    pub fn new(
        labels: Vec<i64>,
        c: Vec<T>,
        s2: Vec<T>,
        q_limit: StochasticMatrix<T>,
    ) -> Result<Self> {
        let n = q_limit.dim();
        if labels.len() != n || c.len() != n || s2.len() != n {
            return Err(Error::Dimension(format!(
                "Lamperti coefficients do not match |S| = {n}"
            )));
        }
        let pi = crate::markov_core::stationary_distribution(&q_limit)?;
        let out = Self {
            labels,
            c,
            s2,
            q_limit,
            pi,
        };
        let v = out.v();
        if !(v > T::zero()) {
            return Err(Error::Degenerate { v: v.approx_f64() });
        }
        Ok(out)
    }

    /// `sum_i 2 c_i pi_i`
    pub fn u(&self) -> T {
        let two = T::one() + T::one();
        two * self.pi.weighted_sum(&self.c)
    }

    /// `sum_i s2_i pi_i`
    pub fn v(&self) -> T {
        self.pi.weighted_sum(&self.s2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    /// `abs(U) = V` under the refined rate hypotheses.
    BoundaryNullRecurrent,
    /// `abs(U) = V` without them: the theorems are silent.
    Indeterminate,
}

impl Verdict {
    /// 0 positive recurrent, 1 null recurrent (either kind), 2 transient.
    /// `None` for [`Verdict::Indeterminate`].
    pub fn escape_rank(self) -> Option<u8> {
        match self {
            Verdict::PositiveRecurrent => Some(0),
            Verdict::NullRecurrent | Verdict::BoundaryNullRecurrent => Some(1),
            Verdict::Transient => Some(2),
            Verdict::Indeterminate => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Classification<T> {
    pub verdict: Verdict,
    pub u: T,
    pub v: T,
    /// Distance from `(U, V)` to the nearest decision boundary
    /// (`abs(sum pi d)` for constant drift).
    pub margin: T,
    pub regime: RegimeTag,
    pub tol: T,
    pub refined: bool,
    pub notes: String,
}

/// The `(U, V)` decision table shared by the Lamperti and generalized rules.
pub fn decide<T: Field>(u: &T, v: &T, tol: &T, refined: bool) -> Verdict {
    if u.clone() - v.clone() > *tol {
        Verdict::Transient
    } else if u.clone() + v.clone() < -tol.clone() {
        Verdict::PositiveRecurrent
    } else if u.abs() < v.clone() - tol.clone() {
        Verdict::NullRecurrent
    } else if refined {
        Verdict::BoundaryNullRecurrent
    } else {
        Verdict::Indeterminate
    }
}

fn margin<T: Field>(u: &T, v: &T) -> T {
    let a = (u.clone() - v.clone()).abs();
    let b = (u.clone() + v.clone()).abs();
    if a < b {
        a
    } else {
        b
    }
}

fn classification<T: Field>(
    u: T,
    v: T,
    tol: T,
    refined: bool,
    regime: RegimeTag,
) -> Classification<T> {
    let verdict = decide(&u, &v, &tol, refined);
    let mut notes = format!(
        "U = {:.12e}, V = {:.12e}, boundary band +-{:e}",
        u.approx_f64(),
        v.approx_f64(),
        tol.approx_f64()
    );
    match verdict {
        Verdict::Indeterminate => {
            notes.push_str("; |U| = V within the band and refined rates not asserted")
        }
        Verdict::BoundaryNullRecurrent => {
            notes.push_str("; |U| = V within the band, refined rates asserted")
        }
        _ => {}
    }
    Classification {
        verdict,
        margin: margin(&u, &v),
        u,
        v,
        regime,
        tol,
        refined,
        notes,
    }
}

/// Transient if `sum pi_i d_i > 0`, positive recurrent if `< 0`.
pub fn classify_constant<T: Field>(
    coeffs: &AsymptoticCoefficients<T>,
    tol: T,
) -> Result<Classification<T>> {
    let regime = check_regime(coeffs, tol.clone());
    if regime != RegimeTag::ConstantDrift {
        return Err(Error::WrongRegime {
            expected: RegimeTag::ConstantDrift.to_string(),
            actual: regime.to_string(),
        });
    }
    let w = coeffs.weighted_drift();
    let verdict = if w > T::zero() {
        Verdict::Transient
    } else {
        Verdict::PositiveRecurrent
    };
    Ok(Classification {
        verdict,
        u: T::zero(),
        v: T::zero(),
        margin: w.abs(),
        regime,
        tol,
        refined: false,
        notes: format!("sum_i pi_i d_i = {:.12e}", w.approx_f64()),
    })
}

pub fn classify_lamperti<T: Field>(
    lc: &LampertiCoefficients<T>,
    refined: bool,
    tol: T,
) -> Result<Classification<T>> {
    let v = lc.v();
    if !(v > T::zero()) {
        return Err(Error::Degenerate { v: v.approx_f64() });
    }
    Ok(classification(lc.u(), v, tol, refined, RegimeTag::Lamperti))
}

/// `c_i = e_i + sum_j a_j gamma_ij`,
/// `s2_i = t2_i + 2 sum_j a_j d_ij + sum_j (a_j^2 - a_i^2) q_ij`, with `a` the
/// min-normalized Poisson solution for `d`.
pub fn transform_generalized<T: Field>(
    coeffs: &AsymptoticCoefficients<T>,
    tol: T,
) -> Result<(LampertiCoefficients<T>, PoissonSolution<T>)> {
    let a = solve_poisson(&coeffs.q_limit, &coeffs.d, tol)?;
    let n = coeffs.dim();
    let two = T::one() + T::one();
    let mut c = Vec::with_capacity(n);
    let mut s2 = Vec::with_capacity(n);
    for i in 0..n {
        let mut ci = coeffs.e[i].clone();
        let mut si = coeffs.t2[i].clone();
        let ai2 = a.values[i].clone() * a.values[i].clone();
        for j in 0..n {
            let aj = a.values[j].clone();
            ci = ci + aj.clone() * coeffs.gamma[i][j].clone();
            si = si
                + two.clone() * aj.clone() * coeffs.d_cross[i][j].clone()
                + (aj.clone() * aj - ai2.clone()) * coeffs.q_limit.get(i, j).clone();
        }
        c.push(ci);
        s2.push(si);
    }
    let lc = LampertiCoefficients {
        labels: coeffs.labels.clone(),
        c,
        s2,
        q_limit: coeffs.q_limit.clone(),
        pi: coeffs.pi.clone(),
    };
    Ok((lc, a))
}

/// `U = sum_i (2 e_i + 2 sum_j a_j gamma_ij) pi_i`,
/// `V = sum_i (t2_i + 2 sum_j a_j d_ij) pi_i`.
///
/// Any translate of `a` gives the same pair.
pub fn compute_uv<T: Field>(coeffs: &AsymptoticCoefficients<T>, a: &PoissonSolution<T>) -> (T, T) {
    let n = coeffs.dim();
    let two = T::one() + T::one();
    let mut u = T::zero();
    let mut v = T::zero();
    for i in 0..n {
        let mut ui = two.clone() * coeffs.e[i].clone();
        let mut vi = coeffs.t2[i].clone();
        for j in 0..n {
            let aj = a.values[j].clone();
            ui = ui + two.clone() * aj.clone() * coeffs.gamma[i][j].clone();
            vi = vi + two.clone() * aj * coeffs.d_cross[i][j].clone();
        }
        u = u + ui * coeffs.pi.weights[i].clone();
        v = v + vi * coeffs.pi.weights[i].clone();
    }
    (u, v)
}

pub fn classify_generalized<T: Field>(
    coeffs: &AsymptoticCoefficients<T>,
    refined: bool,
    tol: T,
) -> Result<Classification<T>> {
    let a = solve_poisson(&coeffs.q_limit, &coeffs.d, tol.clone())?;
    let (u, v) = compute_uv(coeffs, &a);
    if v <= tol {
        return Err(Error::Degenerate { v: v.approx_f64() });
    }
    let regime = check_regime(coeffs, tol.clone());
    Ok(classification(u, v, tol, refined, regime))
}

/// Routes by [`check_regime`] to the matching rule.
pub fn classify<T: Field>(
    coeffs: &AsymptoticCoefficients<T>,
    refined: bool,
    tol: T,
) -> Result<Classification<T>> {
    match check_regime(coeffs, tol.clone()) {
        RegimeTag::ConstantDrift => classify_constant(coeffs, tol),
        RegimeTag::Lamperti | RegimeTag::GeneralizedLamperti => {
            classify_generalized(coeffs, refined, tol)
        }
    }
}

/// `[lo, hi]` with per-end openness; `hi = None` is `+inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Interval<T> {
    pub lo: T,
    pub lo_closed: bool,
    pub hi: Option<T>,
    pub hi_closed: bool,
}

impl<T: Field> Interval<T> {
    pub fn contains(&self, s: &T) -> bool {
        let above = if self.lo_closed {
            *s >= self.lo
        } else {
            *s > self.lo
        };
        let below = match &self.hi {
            None => true,
            Some(h) if self.hi_closed => s <= h,
            Some(h) => s < h,
        };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        match &self.hi {
            None => false,
            Some(h) => *h < self.lo || (*h == self.lo && !(self.lo_closed && self.hi_closed)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct MomentReport<T> {
    /// `(V - U) / (2V)`
    pub theta_star: T,
    /// `p / 2` from the jump-moment bound; `None` when every moment is bounded.
    pub p_cap: Option<T>,
    /// Exponents `s` with `E[tau^s] < inf`.
    pub finite_range: Interval<T>,
    /// Exponents `s` with `E[tau^s] = inf`; `None` where the theorems are silent.
    pub infinite_range: Option<Interval<T>>,
    pub gap_note: String,
}

/// Passage-time moment exponents from `U + (2 theta - 1) V` changing sign at
/// `theta* = (V - U) / (2V)`.
pub fn moment_threshold<T: Field>(u: T, v: T, p_cap: Option<T>) -> Result<MomentReport<T>> {
    if !(v > T::zero()) {
        return Err(Error::Degenerate { v: v.approx_f64() });
    }
    let two = T::one() + T::one();
    let theta = (v.clone() - u) / (two * v);
    let zero = T::zero();
    let capped = matches!(&p_cap, Some(p) if *p < theta);
    let hi = match &p_cap {
        Some(p) if *p < theta => p.clone(),
        _ => theta.clone(),
    };
    let finite_range = Interval {
        lo: zero.clone(),
        lo_closed: true,
        hi: Some(if hi < zero { zero.clone() } else { hi }),
        hi_closed: capped,
    };
    let (infinite_range, gap_note) = if theta <= zero {
        (
            Some(Interval {
                lo: zero,
                lo_closed: false,
                hi: None,
                hi_closed: false,
            }),
            "theta* <= 0: every positive moment of the passage time is infinite".to_string(),
        )
    } else if capped {
        (
            None,
            format!(
                "theta* = {:.6} exceeds the jump-moment cap p/2 = {:.6}; no statement beyond the cap",
                theta.approx_f64(),
                p_cap.as_ref().map(|p| p.approx_f64()).unwrap_or(f64::NAN)
            ),
        )
    } else {
        (
            Some(Interval { lo: theta.clone(), lo_closed: true, hi: None, hi_closed: false }),
            format!(
                "E[tau^s] finite for s < {0:.6} and infinite for s >= {0:.6}; the finite side does not cover s = theta*",
                theta.approx_f64()
            ),
        )
    };
    Ok(MomentReport {
        theta_star: theta,
        p_cap,
        finite_range,
        infinite_range,
        gap_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{default_grid, fit_asymptotics};
    use crate::model::make_crw;
    use approx::assert_abs_diff_eq;
    use num_rational::Rational64;

    fn sym(q: f64) -> StochasticMatrix<f64> {
        StochasticMatrix::new(vec![vec![q, 1.0 - q], vec![1.0 - q, q]]).unwrap()
    }

    fn crw_coeffs(q: f64, c: f64) -> AsymptoticCoefficients<f64> {
        fit_asymptotics(&make_crw(q, c, c, 1.0, 0.0).unwrap(), &default_grid()).unwrap()
    }

    fn lamperti(c: Vec<f64>, s2: Vec<f64>) -> LampertiCoefficients<f64> {
        let n = c.len();
        let q = if n == 1 {
            StochasticMatrix::new(vec![vec![1.0]]).unwrap()
        } else {
            sym(0.5)
        };
        LampertiCoefficients::new((0..n as i64).collect(), c, s2, q).unwrap()
    }

    fn constant(d: Vec<f64>, q: StochasticMatrix<f64>) -> AsymptoticCoefficients<f64> {
        let cross = d.iter().map(|&di| vec![di, 0.0]).collect();
        AsymptoticCoefficients::new(
            vec![1, 2],
            d,
            vec![0.0; 2],
            vec![1.0; 2],
            cross,
            vec![vec![0.0; 2]; 2],
            q,
        )
        .unwrap()
    }

    #[test]
    fn constant_drift_rule() {
        let k = constant(vec![0.3, 0.3], sym(0.5));
        assert_eq!(
            classify_constant(&k, DEFAULT_TOL).unwrap().verdict,
            Verdict::Transient
        );

        let q = StochasticMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let k = constant(vec![-1.0, 1.0], q);
        let c = classify_constant(&k, DEFAULT_TOL).unwrap();
        assert_eq!(c.verdict, Verdict::PositiveRecurrent);
        assert_abs_diff_eq!(c.margin, 1.0 / 3.0, epsilon = 1e-12);

        let k = constant(vec![1.0, -1.0], sym(0.5));
        assert!(matches!(
            classify_constant(&k, DEFAULT_TOL),
            Err(Error::WrongRegime { .. })
        ));
    }

    #[test]
    fn lamperti_rule_examples() {
        let c = classify_lamperti(&lamperti(vec![0.0], vec![1.0]), false, DEFAULT_TOL).unwrap();
        assert_eq!((c.verdict, c.u, c.v), (Verdict::NullRecurrent, 0.0, 1.0));

        let c = classify_lamperti(
            &lamperti(vec![1.0, 1.0], vec![1.0, 1.0]),
            false,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Transient);
        assert_abs_diff_eq!(c.u, 2.0);

        let lc = lamperti(vec![-1.0, 0.0], vec![1.0, 1.0]);
        assert_eq!(
            classify_lamperti(&lc, true, DEFAULT_TOL).unwrap().verdict,
            Verdict::BoundaryNullRecurrent
        );
        assert_eq!(
            classify_lamperti(&lc, false, DEFAULT_TOL).unwrap().verdict,
            Verdict::Indeterminate
        );

        assert_eq!(
            classify_lamperti(
                &lamperti(vec![-2.0, -2.0], vec![1.0, 1.0]),
                false,
                DEFAULT_TOL
            )
            .unwrap()
            .verdict,
            Verdict::PositiveRecurrent
        );
    }

    #[test]
    fn degenerate_variance_is_rejected() {
        let q = StochasticMatrix::new(vec![vec![1.0]]).unwrap();
        assert!(matches!(
            LampertiCoefficients::new(vec![0], vec![0.0], vec![0.0], q),
            Err(Error::Degenerate { .. })
        ));
        assert!(moment_threshold(0.0, 0.0, None).is_err());
    }

    #[test]
    fn crw_transform_and_uv() {
        let k = crw_coeffs(0.6, 0.2);
        let (lc, a) = transform_generalized(&k, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(a.values[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(a.values[1], 0.0, epsilon = 1e-10);
        for i in 0..2 {
            assert_abs_diff_eq!(lc.c[i], 0.25, epsilon = 1e-10);
            assert_abs_diff_eq!(lc.s2[i], 1.5, epsilon = 1e-10);
        }
        let (u, v) = compute_uv(&k, &a);
        assert_abs_diff_eq!(u, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(v, 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(lc.u(), u, epsilon = 1e-10);
        assert_abs_diff_eq!(lc.v(), v, epsilon = 1e-10);
        let (u7, v7) = compute_uv(&k, &a.translated(7.0));
        assert_abs_diff_eq!(u7, u, epsilon = 1e-10);
        assert_abs_diff_eq!(v7, v, epsilon = 1e-10);
    }

    #[test]
    fn crw_uv_exact_over_rationals() {
        let r = Rational64::new;
        let q =
            StochasticMatrix::new(vec![vec![r(3, 5), r(2, 5)], vec![r(2, 5), r(3, 5)]]).unwrap();
        let c = r(1, 5);
        // gamma_ij = j c_i / 2, d_ij = j q_ij, d_i = i (2q - 1)
        let k = AsymptoticCoefficients::new(
            vec![1, -1],
            vec![r(1, 5), r(-1, 5)],
            vec![c, c],
            vec![r(1, 1), r(1, 1)],
            vec![vec![r(3, 5), r(-2, 5)], vec![r(2, 5), r(-3, 5)]],
            vec![vec![c / 2, -c / 2], vec![c / 2, -c / 2]],
            q,
        )
        .unwrap();
        let zero = Rational64::from_integer(0);
        let c = classify_generalized(&k, true, zero).unwrap();
        assert_eq!((c.u, c.v), (r(1, 2), r(3, 2)));
        assert_eq!(c.verdict, Verdict::NullRecurrent);
        let (lc, _) = transform_generalized(&k, zero).unwrap();
        assert_eq!(lc.c, vec![r(1, 4), r(1, 4)]);
        assert_eq!(lc.s2, vec![r(3, 2), r(3, 2)]);
        assert_eq!(
            moment_threshold(c.u, c.v, None).unwrap().theta_star,
            r(1, 3)
        );
    }

    #[test]
    fn lamperti_input_transforms_to_itself() {
        let k = crw_coeffs(0.5, 0.3);
        let (lc, a) = transform_generalized(&k, DEFAULT_TOL).unwrap();
        assert!(a.values.iter().all(|v| v.abs() < 1e-12));
        for i in 0..2 {
            assert_abs_diff_eq!(lc.c[i], k.e[i], epsilon = 1e-12);
            assert_abs_diff_eq!(lc.s2[i], k.t2[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn crw_verdicts_follow_the_phase_diagram() {
        let v = |c: f64| {
            classify_generalized(&crw_coeffs(0.6, c), true, FITTED_TOL)
                .unwrap()
                .verdict
        };
        assert_eq!(v(0.2), Verdict::NullRecurrent);
        assert_eq!(v(1.5), Verdict::Transient);
        assert_eq!(v(-1.0), Verdict::PositiveRecurrent);
    }

    #[test]
    fn uncentered_input_is_rejected() {
        let k = constant(vec![0.3, 0.3], sym(0.5));
        assert!(matches!(
            classify_generalized(&k, false, DEFAULT_TOL),
            Err(Error::NonCentered { .. })
        ));
        assert!(matches!(
            transform_generalized(&k, DEFAULT_TOL),
            Err(Error::NonCentered { .. })
        ));
        assert_eq!(
            classify(&k, false, DEFAULT_TOL).unwrap().verdict,
            Verdict::Transient
        );
    }

    #[test]
    fn moment_threshold_examples() {
        let m = moment_threshold(0.0, 1.0, None).unwrap();
        assert_abs_diff_eq!(m.theta_star, 0.5);
        assert!(m.finite_range.contains(&0.49));
        assert!(!m.finite_range.contains(&0.5));
        assert!(m.infinite_range.as_ref().unwrap().contains(&0.5));

        let m = moment_threshold(0.5, 1.5, None).unwrap();
        assert_abs_diff_eq!(m.theta_star, 1.0 / 3.0, epsilon = 1e-15);

        let m = moment_threshold(-1.5, 1.5, None).unwrap();
        assert_abs_diff_eq!(m.theta_star, 1.0);
        assert!(m.finite_range.contains(&0.99));
        assert_eq!(
            decide(&-1.5, &1.5, &DEFAULT_TOL, true),
            Verdict::BoundaryNullRecurrent
        );

        // transient: nothing positive is finite
        let m = moment_threshold(2.0, 1.0, None).unwrap();
        assert!(m.theta_star < 0.0);
        assert!(!m.finite_range.contains(&0.01));
        assert!(m.infinite_range.unwrap().contains(&0.01));

        // jump-moment cap below theta*
        let m = moment_threshold(-3.0, 1.0, Some(1.5)).unwrap();
        assert_abs_diff_eq!(m.theta_star, 2.0);
        assert!(m.finite_range.contains(&1.5));
        assert!(m.infinite_range.is_none());
    }

    #[test]
    fn lamperti_threshold_formula_when_d_is_zero() {
        let lc = lamperti(vec![0.1, -0.3], vec![1.0, 2.0]);
        let m = moment_threshold(lc.u(), lc.v(), None).unwrap();
        let s2pi = 0.5 * 1.0 + 0.5 * 2.0;
        let cpi = 0.5 * 0.2 + 0.5 * -0.6;
        assert_abs_diff_eq!(m.theta_star, (s2pi - cpi) / (2.0 * s2pi), epsilon = 1e-15);
    }

    #[test]
    fn decision_table_edges() {
        let tol = 1e-3;
        assert_eq!(decide(&1.0011, &1.0, &tol, false), Verdict::Transient);
        assert_eq!(decide(&1.0009, &1.0, &tol, false), Verdict::Indeterminate);
        assert_eq!(decide(&0.9989, &1.0, &tol, false), Verdict::NullRecurrent);
        assert_eq!(
            decide(&-1.0011, &1.0, &tol, false),
            Verdict::PositiveRecurrent
        );
        assert_eq!(
            decide(&-0.9995, &1.0, &tol, true),
            Verdict::BoundaryNullRecurrent
        );
    }
}
