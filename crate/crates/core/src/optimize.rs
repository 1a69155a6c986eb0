//! Nelder–Mead search over shifts, δ and basis coefficients.
//!
//! Points are plain `f64` vectors. Boundary conditions on the polynomials are
//! built into [`p_basis`]/[`q_basis`], so every point decodes to admissible
//! parameters; `R` and `δ` are clamped into their boxes.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::meanvalue::{reference_params, theta_max, EtaSpec, MeanValue, MollifierPair};
use crate::polyalg::{
    p_basis, parse_rat, q_basis, rat_from_f64, rat_to_f64, BasisKind, Rat, P_BASIS_MAX_LEN,
    Q_BASIS_MAX_LEN,
};
use crate::proportions::{distinct_bound, ng_bound, xi_critical_bound, ProportionError};
use crate::kernel_table::KernelTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Proportion(#[from] ProportionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Section2,
    Section3,
    Combined,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Section2 => "section2",
            Target::Section3 => "section3",
            Target::Combined => "combined",
        }
    }

    /// `section2` bounds a count from above and is minimized; the others are maximized.
    pub fn maximize(self) -> bool {
        !matches!(self, Target::Section2)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "section2" => Ok(Target::Section2),
            "section3" => Ok(Target::Section3),
            "combined" | "theorem1" => Ok(Target::Combined),
            other => Err(format!("unknown target `{other}`")),
        }
    }
}

/// Coefficient counts per basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeCaps {
    pub p1: usize,
    pub p2: usize,
    pub p: usize,
    pub q: usize,
}

impl Default for DegreeCaps {
    /// The coefficient counts of the published parameter choices.
    fn default() -> Self {
        DegreeCaps { p1: 2, p2: 3, p: 3, q: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub target: Target,
    pub caps: DegreeCaps,
    pub r_range: (f64, f64),
    pub delta_range: (f64, f64),
    pub theta: Rat,
}

impl SearchSpace {
    pub fn new(target: Target) -> Self {
        SearchSpace {
            target,
            caps: DegreeCaps::default(),
            r_range: (0.1, 3.0),
            delta_range: (0.01, 0.99),
            theta: theta_max(),
        }
    }

    pub fn validate(&self) -> Result<(), OptError> {
        let ordered = |(lo, hi): (f64, f64)| lo > 0.0 && lo < hi;
        if !ordered(self.r_range) || !ordered(self.delta_range) || self.delta_range.1 >= 1.0 {
            return Err(OptError::InvalidParams("ranges must be positive and ordered".into()));
        }
        let c = self.caps;
        // P2 is a plain x·Σ basis, so its cap counts one more coefficient.
        if c.p1 > P_BASIS_MAX_LEN || c.p > P_BASIS_MAX_LEN || c.p2 > P_BASIS_MAX_LEN + 1 || c.q > Q_BASIS_MAX_LEN {
            return Err(OptError::InvalidParams(format!("degree caps {c:?} exceed the basis limits")));
        }
        if c.p2 == 0 || c.q == 0 {
            return Err(OptError::InvalidParams("P2 and Q need at least one coefficient".into()));
        }
        Ok(())
    }

    fn section2_labels(&self) -> Vec<String> {
        let mut out = vec!["section2.R".to_string()];
        out.extend((0..self.caps.p1).map(|k| format!("section2.P1[{k}]")));
        out.extend((0..self.caps.p2).map(|k| format!("section2.P2[{k}]")));
        out
    }

    fn section3_labels(&self) -> Vec<String> {
        let mut out = vec!["section3.R".to_string(), "section3.delta".to_string()];
        out.extend((0..self.caps.p).map(|k| format!("section3.P[{k}]")));
        out.extend((0..self.caps.q).map(|k| format!("section3.Q[{k}]")));
        out
    }

    pub fn labels(&self) -> Vec<String> {
        match self.target {
            Target::Section2 => self.section2_labels(),
            Target::Section3 => self.section3_labels(),
            Target::Combined => {
                let mut l = self.section2_labels();
                l.extend(self.section3_labels());
                l
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.labels().len()
    }

    fn section2_dim(&self) -> usize {
        1 + self.caps.p1 + self.caps.p2
    }

    /// Projects `R` and `δ` coordinates into their boxes.
    pub fn clamp(&self, x: &mut [f64]) {
        let clamp_r = |v: &mut f64| *v = v.clamp(self.r_range.0, self.r_range.1);
        let clamp_d = |v: &mut f64| *v = v.clamp(self.delta_range.0, self.delta_range.1);
        match self.target {
            Target::Section2 => clamp_r(&mut x[0]),
            Target::Section3 => {
                clamp_r(&mut x[0]);
                clamp_d(&mut x[1]);
            }
            Target::Combined => {
                clamp_r(&mut x[0]);
                let off = self.section2_dim();
                clamp_r(&mut x[off]);
                clamp_d(&mut x[off + 1]);
            }
        }
    }

    fn decode_section2(&self, x: &[f64]) -> Result<MollifierPair, OptError> {
        let c = self.caps;
        let rats: Vec<Rat> = x.iter().map(|&v| rat_from_f64(v)).collect();
        MollifierPair::new(
            self.theta.clone(),
            rats[0].clone(),
            p_basis(BasisKind::Section2P1, &rats[1..1 + c.p1]),
            p_basis(BasisKind::Section2P2, &rats[1 + c.p1..1 + c.p1 + c.p2]),
        )
        .map_err(|e| OptError::InvalidParams(e.to_string()))
    }

    fn decode_section3(&self, x: &[f64]) -> Result<EtaSpec, OptError> {
        let c = self.caps;
        let rats: Vec<Rat> = x.iter().map(|&v| rat_from_f64(v)).collect();
        EtaSpec::new(
            self.theta.clone(),
            rats[0].clone(),
            rats[1].clone(),
            p_basis(BasisKind::Section3P, &rats[2..2 + c.p]),
            q_basis(&rats[2 + c.p..2 + c.p + c.q]),
        )
        .map_err(|e| OptError::InvalidParams(e.to_string()))
    }

    pub fn decode(&self, x: &[f64]) -> Result<Decoded, OptError> {
        if x.len() != self.dim() {
            return Err(OptError::InvalidParams(format!(
                "expected {} parameters, got {}",
                self.dim(),
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(OptError::InvalidParams("non-finite parameter".into()));
        }
        Ok(match self.target {
            Target::Section2 => Decoded { pair: Some(self.decode_section2(x)?), eta: None },
            Target::Section3 => Decoded { pair: None, eta: Some(self.decode_section3(x)?) },
            Target::Combined => {
                let off = self.section2_dim();
                Decoded {
                    pair: Some(self.decode_section2(&x[..off])?),
                    eta: Some(self.decode_section3(&x[off..])?),
                }
            }
        })
    }

    /// The published parameter choices as a point of this space (zero-padded to the caps).
    pub fn reference_point(&self) -> Vec<f64> {
        let f = |s: &str| rat_to_f64(&parse_rat(s).unwrap());
        let padded = |v: &[&str], n: usize| -> Vec<f64> {
            (0..n).map(|i| v.get(i).map(|s| f(s)).unwrap_or(0.0)).collect()
        };
        let mut s2 = vec![f(reference_params::SECTION2_R)];
        s2.extend(padded(&reference_params::P1_COEFFS, self.caps.p1));
        s2.extend(padded(&reference_params::P2_COEFFS, self.caps.p2));
        let mut s3 = vec![f(reference_params::SECTION3_R), f(reference_params::SECTION3_DELTA)];
        s3.extend(padded(&reference_params::P_COEFFS, self.caps.p));
        s3.extend(padded(&reference_params::Q_COEFFS, self.caps.q));
        match self.target {
            Target::Section2 => s2,
            Target::Section3 => s3,
            Target::Combined => s2.into_iter().chain(s3).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub pair: Option<MollifierPair>,
    pub eta: Option<EtaSpec>,
}

/// The proportion the target optimizes, in its natural orientation.
/// Mean values come from the shared [`KernelTable`] for the space's `θ`.
pub fn objective(space: &SearchSpace, x: &[f64]) -> Result<f64, OptError> {
    let d = space.decode(x)?;
    let table = KernelTable::shared(&space.theta);
    let wrap = |c: f64| MeanValue { c, breakdown: Vec::new() };
    let kappa_g = match &d.pair {
        Some(pair) => Some(ng_bound(&wrap(table.section2_mean(pair)), &pair.r)?),
        None => None,
    };
    let kappa_c = match &d.eta {
        Some(eta) => Some(xi_critical_bound(&wrap(table.section3_mean(eta)), &eta.r)?),
        None => None,
    };
    Ok(match (kappa_g, kappa_c) {
        (Some(g), None) => g,
        (None, Some(c)) => c,
        (Some(g), Some(c)) => distinct_bound(c, g),
        (None, None) => unreachable!("decode yields at least one block"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Objective evaluations after the start point.
    pub budget: usize,
    /// Stop a run once `max f − min f` over the simplex falls below this
    /// and the simplex fits inside `x_tolerance` of its best vertex.
    pub tolerance: f64,
    pub x_tolerance: f64,
    pub initial_step: f64,
    /// Extra runs started from the incumbent plus seeded Gaussian noise.
    pub restarts: usize,
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            budget: 10_000,
            tolerance: 1e-9,
            x_tolerance: 1e-7,
            initial_step: 0.05,
            restarts: 4,
            perturbation: 0.02,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub evaluations: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_params: Params,
    pub best_value: f64,
    pub start_value: f64,
    pub evaluations: usize,
    /// One entry per improvement of the incumbent.
    pub trace: Vec<TraceEntry>,
}

const INFEASIBLE: f64 = f64::INFINITY;

/// Outcome of [`minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub cost: f64,
    pub evaluations: usize,
    /// `(evaluations, cost)` at each improvement of the incumbent.
    pub improvements: Vec<(usize, f64)>,
}

struct Counter<C, P> {
    cost: C,
    project: P,
    evaluations: usize,
    budget: usize,
    best: (Vec<f64>, f64),
    improvements: Vec<(usize, f64)>,
}

impl<C, P> Counter<C, P>
where
    C: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    fn eval(&mut self, mut x: Vec<f64>) -> Option<(Vec<f64>, f64)> {
        if self.exhausted() {
            return None;
        }
        (self.project)(&mut x);
        let c = (self.cost)(&x);
        let c = if c.is_nan() { INFEASIBLE } else { c };
        self.evaluations += 1;
        if c < self.best.1 {
            self.best = (x.clone(), c);
            self.improvements.push((self.evaluations, c));
        }
        Some((x, c))
    }
}

/// Nelder–Mead with coefficients (1, 2, 0.5, 0.5) and seeded restarts.
///
/// `project` maps every trial point back into the feasible box before it is
/// evaluated. The start point is evaluated once outside the budget.
pub fn minimize<C, P>(cost: C, project: P, start: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    C: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let mut x0 = start.to_vec();
    project(&mut x0);
    let mut counter = Counter {
        cost,
        project,
        evaluations: 0,
        budget: opts.budget,
        best: (x0.clone(), 0.0),
        improvements: Vec::new(),
    };
    let c0 = (counter.cost)(&x0);
    counter.best.1 = if c0.is_nan() { INFEASIBLE } else { c0 };
    counter.improvements.push((0, counter.best.1));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let noise = Normal::new(0.0, opts.perturbation.max(f64::MIN_POSITIVE)).expect("finite sigma");
    for run in 0..=opts.restarts {
        if counter.exhausted() {
            break;
        }
        let origin = if run == 0 {
            x0.clone()
        } else {
            counter.best.0.iter().map(|v| v + noise.sample(&mut rng)).collect()
        };
        simplex_run(&mut counter, origin, opts);
    }
    Minimum {
        x: counter.best.0,
        cost: counter.best.1,
        evaluations: counter.evaluations,
        improvements: counter.improvements,
    }
}

pub fn run_nelder_mead(
    space: &SearchSpace,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> Result<OptResult, OptError> {
    space.validate()?;
    let mut x0 = start.to_vec();
    space.clamp(&mut x0);
    let start_value = objective(space, &x0)?;
    let sign = if space.target.maximize() { -1.0 } else { 1.0 };
    let cost = |x: &[f64]| match objective(space, x) {
        Ok(v) if v.is_finite() => sign * v,
        _ => INFEASIBLE,
    };
    let min = minimize(cost, |x: &mut [f64]| space.clamp(x), &x0, opts);
    Ok(OptResult {
        best_params: Params {
            labels: space.labels(),
            values: min.x,
        },
        best_value: sign * min.cost,
        start_value,
        evaluations: min.evaluations,
        trace: min
            .improvements
            .iter()
            .map(|&(evaluations, c)| TraceEntry { evaluations, value: sign * c })
            .collect(),
    })
}

fn simplex_run<C, P>(counter: &mut Counter<C, P>, origin: Vec<f64>, opts: &NelderMeadOptions)
where
    C: FnMut(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = origin.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(first) = counter.eval(origin.clone()) else { return };
    simplex.push(first);
    for i in 0..n {
        let mut v = origin.clone();
        v[i] += opts.initial_step;
        let Some(p) = counter.eval(v) else { return };
        simplex.push(p);
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread < opts.tolerance && size < opts.x_tolerance {
            return;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64)
            .collect();
        let toward = |coef: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let Some(reflected) = counter.eval(toward(REFLECT, &worst)) else { return };

        if reflected.1 < simplex[0].1 {
            let Some(expanded) = counter.eval(toward(EXPAND, &worst)) else { return };
            simplex[n] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[n - 1].1 {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if reflected.1 < simplex[n].1 {
            counter.eval(toward(CONTRACT, &worst))
        } else {
            counter.eval(toward(-CONTRACT, &worst))
        };
        let Some(contracted) = contracted else { return };
        if contracted.1 < simplex[n].1.min(reflected.1) {
            simplex[n] = contracted;
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let shrunk: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            let Some(p) = counter.eval(shrunk) else { return };
            *vertex = p;
        }
    }
}
