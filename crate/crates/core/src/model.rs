//! Half-strip chain models: the correlated random walk family and a generic
//! tabular kernel whose atom probabilities are affine in `1/x`.
//!
//! Every kernel has finite support, so the moment functionals in
//! [`crate::drift`] are exact sums over atoms.

use serde::{Deserialize, Serialize};

use crate::drift::{self, CoefficientsSpec};
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;
const RENORMALIZE_TOL: f64 = 1e-9;
const CRW_BAND: (f64, f64) = (0.01, 0.99);

/// A point `(x, eta)` of the half-strip. `label` indexes the model's label list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub position: f64,
    pub label: usize,
}

impl State {
    pub fn new(position: f64, label: usize) -> Self {
        Self { position, label }
    }
}

/// One support point of the one-step law: `(X_{n+1} - X_n, eta_{n+1})` with its mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub jump: f64,
    pub next: usize,
    pub prob: f64,
}

impl Atom {
    pub fn new(jump: f64, next: usize, prob: f64) -> Self {
        Self { jump, next, prob }
    }
}

/// Finite one-step law at a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementDistribution {
    pub atoms: Vec<Atom>,
}

impl IncrementDistribution {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// Stochastic within `1e-12`, all masses in `[0, 1]`, every landing `>= 0`.
    pub fn check(&self, from: f64) -> std::result::Result<(), String> {
        if self.atoms.is_empty() {
            return Err("empty atom list".into());
        }
        for a in &self.atoms {
            if !(a.prob.is_finite() && a.jump.is_finite()) {
                return Err(format!("non-finite atom {a:?}"));
            }
            if !(0.0..=1.0).contains(&a.prob) {
                return Err(format!("atom probability {} outside [0,1]", a.prob));
            }
            if a.prob > 0.0 && from + a.jump < 0.0 {
                return Err(format!("atom {a:?} lands below 0 from x = {from}"));
            }
        }
        let total = self.total_mass();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(format!("probabilities sum to {total}"));
        }
        Ok(())
    }
}

/// Anything that can produce the finite one-step law at a state.
pub trait Kernel: Sync {
    /// The label values of `S`, in index order.
    fn labels(&self) -> &[i64];

    /// Rejects states outside the state space.
    fn check_state(&self, state: State) -> Result<()> {
        if !(state.position.is_finite() && state.position >= 0.0) {
            return Err(Error::InvalidState(format!(
                "position {} is not in R+",
                state.position
            )));
        }
        if state.label >= self.labels().len() {
            return Err(Error::InvalidState(format!(
                "label index {} out of range",
                state.label
            )));
        }
        Ok(())
    }

    /// Appends the atoms at `state` to `out` (which is cleared first).
    fn atoms_into(&self, state: State, out: &mut Vec<Atom>) -> Result<()>;

    fn distribution(&self, state: State) -> Result<IncrementDistribution> {
        let mut atoms = Vec::new();
        self.atoms_into(state, &mut atoms)?;
        Ok(IncrementDistribution { atoms })
    }

    /// One inverse-CDF step driven by `u` in `[0, 1)`; atoms are scanned in
    /// kernel order.
    fn step(&self, state: State, u: f64, scratch: &mut Vec<Atom>) -> Result<State> {
        self.atoms_into(state, scratch)?;
        let mut chosen = None;
        let mut cum = 0.0;
        for a in scratch.iter() {
            if a.prob <= 0.0 {
                continue;
            }
            cum += a.prob;
            chosen = Some(a);
            if u < cum {
                break;
            }
        }
        let a = chosen.ok_or_else(|| Error::InvalidModel("kernel without positive mass".into()))?;
        Ok(State::new(state.position + a.jump, a.next))
    }
}

/// Correlated random walk on `Z+ x {+1, -1}`: the jump always equals the next
/// label, and continuing in the current direction has probability
/// `q + i c_i / (2x) + amp x^{-1-delta}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrwModel {
    pub q: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub delta: f64,
    pub amp: f64,
    pub floor: f64,
}

const CRW_LABELS: [i64; 2] = [1, -1];

impl CrwModel {
    /// Uses the default floor: the smallest integer `x >= 1` from which every
    /// corrected probability stays inside `[0.01, 0.99]`.
    pub fn new(q: f64, c_plus: f64, c_minus: f64, delta: f64, amp: f64) -> Result<Self> {
        Self::check_params(q, c_plus, c_minus, delta, amp)?;
        let floor = (1..=1_000_000_000u64)
            .map(|x| x as f64)
            .find(|&x| Self::band_holds(q, c_plus, c_minus, delta, amp, x, CRW_BAND))
            .ok_or_else(|| {
                Error::InvalidModel(format!(
                    "q = {q} keeps CRW probabilities outside [{}, {}] at every floor",
                    CRW_BAND.0, CRW_BAND.1
                ))
            })?;
        Ok(Self {
            q,
            c_plus,
            c_minus,
            delta,
            amp,
            floor,
        })
    }

    pub fn with_floor(
        q: f64,
        c_plus: f64,
        c_minus: f64,
        delta: f64,
        amp: f64,
        floor: f64,
    ) -> Result<Self> {
        Self::check_params(q, c_plus, c_minus, delta, amp)?;
        if !(floor.is_finite() && floor >= 1.0) {
            return Err(Error::InvalidModel(format!("floor {floor} must be >= 1")));
        }
        if !Self::band_holds(q, c_plus, c_minus, delta, amp, floor, (0.0, 1.0)) {
            return Err(Error::InvalidModel(format!(
                "CRW probabilities leave [0,1] at floor {floor}"
            )));
        }
        Ok(Self {
            q,
            c_plus,
            c_minus,
            delta,
            amp,
            floor,
        })
    }

    fn check_params(q: f64, c_plus: f64, c_minus: f64, delta: f64, amp: f64) -> Result<()> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidModel(format!("q = {q} not in (0,1)")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "delta = {delta} must be positive"
            )));
        }
        if ![c_plus, c_minus, amp].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidModel("non-finite CRW constant".into()));
        }
        Ok(())
    }

    // The corrections are dominated by |c|/(2x) + |amp| x^{-1-delta}, which
    // decreases in x, so holding the band at `x` holds it beyond.
    fn band_holds(
        q: f64,
        c_plus: f64,
        c_minus: f64,
        delta: f64,
        amp: f64,
        x: f64,
        band: (f64, f64),
    ) -> bool {
        [c_plus, c_minus].iter().all(|c| {
            let spread = c.abs() / (2.0 * x) + amp.abs() * x.powf(-1.0 - delta);
            q - spread >= band.0
                && q + spread <= band.1
                && (1.0 - q) - spread >= band.0
                && (1.0 - q) + spread <= band.1
        })
    }

    /// Probability of keeping the direction of label index `idx` (0 is `+1`).
    #[inline]
    pub fn p_continue(&self, x: f64, idx: usize) -> f64 {
        if x < self.floor {
            return self.q;
        }
        let (sign, c) = if idx == 0 {
            (1.0, self.c_plus)
        } else {
            (-1.0, self.c_minus)
        };
        let mut p = self.q + sign * c / (2.0 * x);
        if self.amp != 0.0 {
            p += self.amp * x.powf(-1.0 - self.delta);
        }
        p
    }

    /// Mass of the `(+1, +1)` atom, the first one in kernel order.
    #[inline]
    fn p_up(&self, x: f64, idx: usize) -> f64 {
        let p = self.p_continue(x, idx);
        if idx == 0 {
            p
        } else {
            1.0 - p
        }
    }
}

/// How a tabular kernel treats atoms that would land below 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryRule {
    /// The jump is negated.
    Reflect,
    /// The position is kept (jump 0), the label still moves.
    Stay,
    /// The position is set to 0.
    Clamp,
}

/// Atom of a tabular row: mass `p + p_inv_x / x`, evaluated at `max(x, floor)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularAtom {
    pub jump: f64,
    /// Next label value; the row's own label when omitted.
    #[serde(default)]
    pub to: Option<i64>,
    pub p: f64,
    #[serde(default)]
    pub p_inv_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularRow {
    pub label: i64,
    pub atoms: Vec<TabularAtom>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularSpec {
    pub labels: Vec<i64>,
    pub rows: Vec<TabularRow>,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryRule,
    #[serde(default = "default_tabular_floor")]
    pub floor: f64,
    #[serde(default)]
    pub description: Option<String>,
}

fn default_boundary() -> BoundaryRule {
    BoundaryRule::Reflect
}

fn default_tabular_floor() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ResolvedAtom {
    jump: f64,
    next: usize,
    p: f64,
    p_inv_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabularModel {
    labels: Vec<i64>,
    rows: Vec<Vec<ResolvedAtom>>,
    boundary: BoundaryRule,
    floor: f64,
    renormalize: bool,
}

impl TabularModel {
    /// Resolves labels without any stochasticity checks. Meant for
    /// [`validate`] diagnostics; [`make_tabular`] is the checked constructor.
    pub fn from_spec_unchecked(spec: &TabularSpec) -> Result<Self> {
        if spec.labels.is_empty() {
            return Err(Error::InvalidModel("label set is empty".into()));
        }
        let index = |label: i64| {
            spec.labels
                .iter()
                .position(|&l| l == label)
                .ok_or_else(|| Error::InvalidModel(format!("unknown label {label}")))
        };
        for (k, l) in spec.labels.iter().enumerate() {
            if spec.labels[..k].contains(l) {
                return Err(Error::InvalidModel(format!("duplicate label {l}")));
            }
        }
        let mut rows: Vec<Option<Vec<ResolvedAtom>>> = vec![None; spec.labels.len()];
        for row in &spec.rows {
            let i = index(row.label)?;
            if rows[i].is_some() {
                return Err(Error::InvalidModel(format!(
                    "label {} has two rows",
                    row.label
                )));
            }
            let atoms = row
                .atoms
                .iter()
                .map(|a| {
                    Ok(ResolvedAtom {
                        jump: a.jump,
                        next: index(a.to.unwrap_or(row.label))?,
                        p: a.p,
                        p_inv_x: a.p_inv_x,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows[i] = Some(atoms);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| Error::InvalidModel(format!("label {} has no row", spec.labels[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        if !(spec.floor.is_finite() && spec.floor > 0.0) {
            return Err(Error::InvalidModel(format!(
                "floor {} must be positive",
                spec.floor
            )));
        }
        Ok(Self {
            labels: spec.labels.clone(),
            rows,
            boundary: spec.boundary,
            floor: spec.floor,
            renormalize: false,
        })
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }
}

impl Kernel for TabularModel {
    fn labels(&self) -> &[i64] {
        &self.labels
    }

    fn atoms_into(&self, state: State, out: &mut Vec<Atom>) -> Result<()> {
        self.check_state(state)?;
        out.clear();
        let x = state.position;
        let eval_at = x.max(self.floor);
        let row = &self.rows[state.label];
        let masses = row.iter().map(|a| a.p + a.p_inv_x / eval_at);
        let scale = if self.renormalize {
            let total: f64 = masses.clone().sum();
            1.0 / total
        } else {
            1.0
        };
        for (a, mass) in row.iter().zip(masses) {
            let mut jump = a.jump;
            if x + jump < 0.0 {
                jump = match self.boundary {
                    BoundaryRule::Reflect => -jump,
                    BoundaryRule::Stay => 0.0,
                    BoundaryRule::Clamp => -x,
                };
                // A reflected jump larger than 2x can still undershoot.
                if x + jump < 0.0 {
                    jump = -x;
                }
            }
            out.push(Atom::new(jump, a.next, mass * scale));
        }
        Ok(())
    }
}

impl Kernel for CrwModel {
    fn labels(&self) -> &[i64] {
        &CRW_LABELS
    }

    fn atoms_into(&self, state: State, out: &mut Vec<Atom>) -> Result<()> {
        self.check_state(state)?;
        out.clear();
        let x = state.position;
        if x < 1.0 {
            out.push(Atom::new(1.0, 0, 1.0));
            return Ok(());
        }
        let up = self.p_up(x, state.label);
        out.push(Atom::new(1.0, 0, up));
        out.push(Atom::new(-1.0, 1, 1.0 - up));
        Ok(())
    }

    #[inline]
    fn step(&self, state: State, u: f64, _scratch: &mut Vec<Atom>) -> Result<State> {
        let x = state.position;
        let up = if x >= self.floor && self.amp == 0.0 {
            // u < q_up + c/(2x) with the division cleared (floor >= 1)
            let (q_up, c) = if state.label == 0 {
                (self.q, self.c_plus)
            } else {
                (1.0 - self.q, self.c_minus)
            };
            2.0 * x * (u - q_up) < c
        } else {
            x < 1.0 || u < self.p_up(x, state.label)
        };
        Ok(if up {
            State::new(x + 1.0, 0)
        } else {
            State::new(x - 1.0, 1)
        })
    }
}

/// An immutable half-strip model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChainKernel {
    Crw(CrwModel),
    Tabular(TabularModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub kernel: ChainKernel,
    pub description: String,
}

impl ChainModel {
    pub fn formula_floor(&self) -> f64 {
        match &self.kernel {
            ChainKernel::Crw(m) => m.floor,
            ChainKernel::Tabular(m) => m.floor,
        }
    }

    pub fn label_index(&self, value: i64) -> Result<usize> {
        self.labels()
            .iter()
            .position(|&l| l == value)
            .ok_or_else(|| {
                Error::InvalidState(format!("label {value} not in S = {:?}", self.labels()))
            })
    }
}

impl Kernel for ChainModel {
    fn labels(&self) -> &[i64] {
        match &self.kernel {
            ChainKernel::Crw(m) => m.labels(),
            ChainKernel::Tabular(m) => m.labels(),
        }
    }

    fn atoms_into(&self, state: State, out: &mut Vec<Atom>) -> Result<()> {
        match &self.kernel {
            ChainKernel::Crw(m) => m.atoms_into(state, out),
            ChainKernel::Tabular(m) => m.atoms_into(state, out),
        }
    }

    #[inline]
    fn step(&self, state: State, u: f64, scratch: &mut Vec<Atom>) -> Result<State> {
        match &self.kernel {
            ChainKernel::Crw(m) => m.step(state, u, scratch),
            ChainKernel::Tabular(m) => m.step(state, u, scratch),
        }
    }
}

/// The chain seen through `(x, i) -> (x + a_i, i)`.
///
/// From `(y, i)` the base kernel runs at `(y - a_i, i)`, and every jump to
/// label `j` picks up `a_j - a_i`.
pub struct Shifted<'a, K: ?Sized> {
    base: &'a K,
    shift: Vec<f64>,
}

impl<'a, K: Kernel + ?Sized> Shifted<'a, K> {
    pub fn new(base: &'a K, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != base.labels().len() {
            return Err(Error::Dimension(format!(
                "shift has {} entries for {} labels",
                shift.len(),
                base.labels().len()
            )));
        }
        if shift.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidModel(
                "shift entries must be finite and >= 0".into(),
            ));
        }
        Ok(Self { base, shift })
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }
}

impl<K: Kernel + ?Sized> Kernel for Shifted<'_, K> {
    fn labels(&self) -> &[i64] {
        self.base.labels()
    }

    fn check_state(&self, state: State) -> Result<()> {
        if state.label >= self.shift.len() {
            return Err(Error::InvalidState(format!(
                "label index {} out of range",
                state.label
            )));
        }
        self.base.check_state(State::new(
            state.position - self.shift[state.label],
            state.label,
        ))
    }

    fn atoms_into(&self, state: State, out: &mut Vec<Atom>) -> Result<()> {
        self.check_state(state)?;
        let own = self.shift[state.label];
        self.base
            .atoms_into(State::new(state.position - own, state.label), out)?;
        for a in out.iter_mut() {
            a.jump += self.shift[a.next] - own;
        }
        Ok(())
    }
}

/// JSON model document: `{"type": "crw" | "tabular" | "coefficients", ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelSpec {
    Crw(CrwSpec),
    Tabular(TabularSpec),
    Coefficients(CoefficientsSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrwSpec {
    pub q: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub floor: Option<f64>,
    #[serde(default)]
    pub description: Option<String>,
}

fn default_delta() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The kernel, unless the document only carries coefficients.
    pub fn build(&self) -> Result<Option<ChainModel>> {
        match self {
            ModelSpec::Crw(s) => {
                let m = match s.floor {
                    Some(f) => CrwModel::with_floor(s.q, s.c_plus, s.c_minus, s.delta, s.amp, f)?,
                    None => make_crw(s.q, s.c_plus, s.c_minus, s.delta, s.amp)?,
                };
                let description = s.description.clone().unwrap_or_else(|| {
                    format!(
                        "correlated random walk q={} c_plus={} c_minus={} delta={} amp={}",
                        s.q, s.c_plus, s.c_minus, s.delta, s.amp
                    )
                });
                Ok(Some(ChainModel {
                    kernel: ChainKernel::Crw(m),
                    description,
                }))
            }
            ModelSpec::Tabular(s) => Ok(Some(make_tabular(s)?)),
            ModelSpec::Coefficients(_) => Ok(None),
        }
    }

    pub fn description(&self) -> String {
        match self {
            ModelSpec::Crw(s) => s
                .description
                .clone()
                .unwrap_or_else(|| "correlated random walk".into()),
            ModelSpec::Tabular(s) => s
                .description
                .clone()
                .unwrap_or_else(|| "tabular kernel".into()),
            ModelSpec::Coefficients(s) => s
                .description
                .clone()
                .unwrap_or_else(|| "asserted coefficients".into()),
        }
    }
}

pub fn make_crw(q: f64, c_plus: f64, c_minus: f64, delta: f64, amp: f64) -> Result<CrwModel> {
    CrwModel::new(q, c_plus, c_minus, delta, amp)
}

/// Checked tabular constructor.
///
/// Masses are affine in `1/x` above the floor, so checking them at the floor
/// and in the `x -> inf` limit covers every position. Row sums off by less
/// than `1e-9` are renormalized at evaluation; larger defects are errors.
pub fn make_tabular(spec: &TabularSpec) -> Result<ChainModel> {
    let mut model = TabularModel::from_spec_unchecked(spec)?;
    let n = model.labels.len();
    let mut reached = vec![false; n];
    for (i, row) in model.rows.iter().enumerate() {
        let label = model.labels[i];
        if row.is_empty() {
            return Err(Error::InvalidModel(format!(
                "label {label} has an empty atom list"
            )));
        }
        for a in row {
            if ![a.jump, a.p, a.p_inv_x].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "label {label}: non-finite atom"
                )));
            }
        }
        for (where_, at_floor) in [("at the floor", true), ("as x -> inf", false)] {
            let mass = |a: &ResolvedAtom| {
                if at_floor {
                    a.p + a.p_inv_x / model.floor
                } else {
                    a.p
                }
            };
            if let Some(a) = row.iter().find(|a| mass(a) < 0.0) {
                return Err(Error::InvalidModel(format!(
                    "label {label}: negative probability {} {where_}",
                    mass(a)
                )));
            }
            let total: f64 = row.iter().map(mass).sum();
            let defect = (total - 1.0).abs();
            if defect >= RENORMALIZE_TOL {
                return Err(Error::InvalidModel(format!(
                    "label {label}: probabilities sum to {total} {where_}"
                )));
            }
            if defect > 0.0 {
                model.renormalize = true;
            }
            for a in row {
                if mass(a) > 0.0 {
                    reached[a.next] = true;
                }
            }
        }
    }
    if let Some(k) = reached.iter().position(|r| !r) {
        return Err(Error::InvalidModel(format!(
            "label {} is never entered by any atom",
            model.labels[k]
        )));
    }
    Ok(ChainModel {
        description: spec
            .description
            .clone()
            .unwrap_or_else(|| "tabular kernel".into()),
        kernel: ChainKernel::Tabular(model),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub stochastic: bool,
    pub stochastic_failures: Vec<String>,
    pub limiting_q: Vec<Vec<f64>>,
    pub irreducible: bool,
    pub p: f64,
    /// `max |jump|^p` over the sample grid, an empirical witness for `C_p`.
    pub c_p: f64,
    pub grid: Vec<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.stochastic && self.irreducible
    }
}

/// Sample grid used by [`validate`]: a few boundary positions and `10^0..10^5`.
pub fn validation_grid() -> Vec<f64> {
    let mut g = vec![0.0, 0.5, 1.0, 2.0, 3.0];
    g.extend((0..=5).map(|k| 10f64.powi(k)));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn validate<K: Kernel + ?Sized>(model: &K, p: f64) -> ValidationReport {
    let grid = validation_grid();
    let mut failures = Vec::new();
    let mut c_p: f64 = 0.0;
    let mut atoms = Vec::new();
    for &x in &grid {
        for i in 0..model.labels().len() {
            let state = State::new(x, i);
            if model.check_state(state).is_err() {
                continue;
            }
            match model.atoms_into(state, &mut atoms) {
                Ok(()) => {
                    let dist = IncrementDistribution {
                        atoms: atoms.clone(),
                    };
                    if let Err(e) = dist.check(x) {
                        failures.push(format!("x={x}, label {}: {e}", model.labels()[i]));
                    }
                    for a in atoms.iter().filter(|a| a.prob > 0.0) {
                        c_p = c_p.max(a.jump.abs().powf(p));
                    }
                }
                Err(e) => failures.push(format!("x={x}, label {}: {e}", model.labels()[i])),
            }
        }
    }
    let limiting_q = drift::limiting_transitions(model, &drift::default_grid());
    let irreducible = crate::markov_core::StochasticMatrix::new(limiting_q.clone())
        .map(|q| q.is_irreducible())
        .unwrap_or(false);
    ValidationReport {
        stochastic: failures.is_empty(),
        stochastic_failures: failures,
        limiting_q,
        irreducible,
        p,
        c_p,
        grid,
    }
}
