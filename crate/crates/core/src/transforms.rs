//! Picture changes: interaction frame, rotating-wave approximation and the
//! diagonal-free transformed picture.
//!
//! The transformed variables are `ρ̃_a = (ρ_a − c_a)·e^{λ_a t}` where `c` is a
//! steady state and `λ_a = i·𝓗_aa` on coherences (zero on populations).
//! Coherence diagonals cancel against the derivative of the scale factor;
//! population diagonals are moved off the diagonal with `Σ_k ρ̃_kk = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::generator::{Generator, LindbladGenerator};
use crate::liouville::{index_map, steady_state, ControlField, LevelSystem, LiouvilleIndexMap};
use crate::propagation::TimeGrid;
use crate::{HeodError, Result, StateVector, Superoperator, C64};

/// Relative tolerance for `𝓗(t)·c = 0` and for time-independent coherence
/// diagonals.
pub const SHIFT_TOLERANCE: f64 = 1e-10;

const CHECK_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Picture {
    Original,
    Interaction,
    Transformed,
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Picture::Original => "original",
            Picture::Interaction => "interaction",
            Picture::Transformed => "transformed",
        })
    }
}

impl FromStr for Picture {
    type Err = HeodError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Picture::Original),
            "interaction" => Ok(Picture::Interaction),
            "transformed" => Ok(Picture::Transformed),
            other => Err(HeodError::Domain(format!("unknown picture {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PictureSpec {
    pub picture: Picture,
    pub rwa: bool,
    pub carry_phases: bool,
}

pub fn interaction_generator(
    system: &LevelSystem,
    field: &ControlField,
    t: f64,
) -> Result<Superoperator> {
    Ok(LindbladGenerator::interaction(system, field)?.matrix(t))
}

pub fn rwa_generator(
    system: &LevelSystem,
    field: &ControlField,
    t: f64,
    carry_phases: bool,
) -> Result<Superoperator> {
    Ok(LindbladGenerator::rwa(system, field, carry_phases)?.matrix(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `ρ → ρ̃`.
    Forward,
    /// `ρ̃ → ρ`.
    Backward,
}

pub fn map_state(
    state: &StateVector,
    shift: &StateVector,
    exponents: &[C64],
    t: f64,
    direction: Direction,
) -> StateVector {
    StateVector::from_iterator(
        state.len(),
        state.iter().zip(shift.iter()).zip(exponents).map(|((&x, &c), &l)| match direction {
            Direction::Forward => (x - c) * (l * t).exp(),
            Direction::Backward => x * (-l * t).exp() + c,
        }),
    )
}

#[derive(Debug, Clone, Copy)]
enum TermKind {
    /// `inner · exp(rate·t)`
    Scaled(C64),
    /// `−inner`, from the trace-zero substitution.
    Negated,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    inner: usize,
    kind: TermKind,
}

/// Generator of the transformed variables; its diagonal is structurally
/// absent.
pub struct TransformedGenerator<G> {
    inner: G,
    map: LiouvilleIndexMap,
    shift: StateVector,
    exponents: Vec<C64>,
    support: Vec<(usize, usize)>,
    term_start: Vec<usize>,
    terms: Vec<Term>,
}

impl<G: Generator> TransformedGenerator<G> {
    pub fn inner(&self) -> &G {
        &self.inner
    }

    pub fn index_map(&self) -> &LiouvilleIndexMap {
        &self.map
    }

    pub fn shift(&self) -> &StateVector {
        &self.shift
    }

    /// `λ_a` per Liouville flat.
    pub fn exponents(&self) -> &[C64] {
        &self.exponents
    }

    pub fn to_transformed(&self, rho: &StateVector, t: f64) -> StateVector {
        map_state(rho, &self.shift, &self.exponents, t, Direction::Forward)
    }

    pub fn from_transformed(&self, rho: &StateVector, t: f64) -> StateVector {
        map_state(rho, &self.shift, &self.exponents, t, Direction::Backward)
    }
}

impl<G: Generator> Generator for TransformedGenerator<G> {
    fn liouville_dim(&self) -> usize {
        self.map.liouville_dim()
    }

    fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    fn values(&self, t: f64, out: &mut [C64]) {
        let mut inner = vec![C64::default(); self.inner.support().len()];
        self.inner.values(t, &mut inner);
        for (e, o) in out.iter_mut().enumerate() {
            *o = self.terms[self.term_start[e]..self.term_start[e + 1]]
                .iter()
                .map(|term| match term.kind {
                    TermKind::Scaled(rate) => inner[term.inner] * (rate * t).exp(),
                    TermKind::Negated => -inner[term.inner],
                })
                .sum();
        }
    }
}

fn check_times(grid: &TimeGrid) -> Vec<f64> {
    let k = grid.steps().min(CHECK_POINTS);
    (0..=k).map(|j| grid.time(j * grid.steps() / k)).collect()
}

/// Builds the diagonal-free generator from `inner` and the steady state
/// `shift`, verifying the preconditions on `check_grid`.
pub fn eliminate_diagonals<G: Generator>(
    inner: G,
    shift: &StateVector,
    check_grid: &TimeGrid,
) -> Result<TransformedGenerator<G>> {
    let big_d = inner.liouville_dim();
    let d = (big_d as f64).sqrt().round() as usize;
    if d * d != big_d {
        return Err(HeodError::Domain(format!("{big_d} is not a square dimension")));
    }
    let map = index_map(d)?;
    if shift.len() != big_d {
        return Err(HeodError::Domain("shift vector has the wrong length".into()));
    }
    let trace: C64 = map.populations().map(|a| shift[a]).sum();
    if (trace - 1.0).norm() > SHIFT_TOLERANCE {
        return Err(HeodError::ShiftInvalid { residual: (trace - 1.0).norm(), time: 0.0 });
    }

    let support = inner.support().to_vec();
    let diag_idx: Vec<Option<usize>> = (0..big_d).map(|a| inner.entry_index(a, a)).collect();

    let mut v0 = vec![C64::default(); support.len()];
    inner.values(0.0, &mut v0);
    let exponents: Vec<C64> = (0..big_d)
        .map(|a| match diag_idx[a] {
            Some(i) if !map.is_population(a) => C64::i() * v0[i],
            _ => C64::default(),
        })
        .collect();

    let mut vals = vec![C64::default(); support.len()];
    let shift_norm = shift.iter().map(|x| x.norm()).fold(0.0, f64::max);
    for t in check_times(check_grid) {
        inner.values(t, &mut vals);
        let scale = vals.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        for a in (0..big_d).filter(|&a| !map.is_population(a)) {
            if let Some(i) = diag_idx[a] {
                if (vals[i] - v0[i]).norm() > SHIFT_TOLERANCE * scale {
                    return Err(HeodError::Domain(format!(
                        "coherence diagonal |{}⟩⟩ varies in time",
                        map.label(a)
                    )));
                }
            }
        }
        let mut hc = vec![C64::default(); big_d];
        for (&(r, c), v) in support.iter().zip(&vals) {
            hc[r] += v * shift[c];
        }
        let residual = hc.iter().map(|x| x.norm()).fold(0.0, f64::max) / (scale * shift_norm);
        if residual > SHIFT_TOLERANCE {
            return Err(HeodError::ShiftInvalid { residual, time: t });
        }
    }

    let mut entries: std::collections::BTreeMap<(usize, usize), Vec<Term>> = Default::default();
    for (i, &(r, c)) in support.iter().enumerate() {
        if r != c {
            let rate = exponents[r] - exponents[c];
            entries.entry((r, c)).or_default().push(Term { inner: i, kind: TermKind::Scaled(rate) });
        }
    }
    for k in map.populations() {
        if let Some(i) = diag_idx[k] {
            for m in map.populations().filter(|&m| m != k) {
                entries.entry((k, m)).or_default().push(Term { inner: i, kind: TermKind::Negated });
            }
        }
    }

    let mut out_support = Vec::with_capacity(entries.len());
    let mut term_start = vec![0];
    let mut terms = Vec::new();
    for (rc, ts) in entries {
        out_support.push(rc);
        terms.extend(ts);
        term_start.push(terms.len());
    }

    Ok(TransformedGenerator {
        inner,
        map,
        shift: shift.clone(),
        exponents,
        support: out_support,
        term_start,
        terms,
    })
}

/// Transformed generator of a model: the RWA frame when `rwa` is set, the
/// interaction frame otherwise, shifted by the field-free steady state.
pub fn transformed_generator(
    system: &LevelSystem,
    field: &ControlField,
    rwa: bool,
    carry_phases: bool,
    check_grid: &TimeGrid,
) -> Result<TransformedGenerator<LindbladGenerator>> {
    let inner = if rwa {
        LindbladGenerator::rwa(system, field, carry_phases)?
    } else {
        LindbladGenerator::interaction(system, field)?
    };
    let c = steady_state(system)?;
    eliminate_diagonals(inner, &c, check_grid)
}

/// Populations `(ρ11, ρ22, ρ33)` of the field-free ladder `1 ⇄ 2 ⇄ 3` with
/// symmetric rates `γ12`, `γ23`, starting in level 1.
pub fn analytic_field_free(g12: f64, g23: f64, t: f64) -> Result<[f64; 3]> {
    if !(g12 > 0.0 && g23 > 0.0) {
        return Err(HeodError::Domain("field-free solution needs positive rates".into()));
    }
    let om = (g12 * g12 - g12 * g23 + g23 * g23).sqrt();
    let a = (g12 + g23) / (6.0 * om) - 1.0 / 6.0;
    let b = -(g12 + g23) / (6.0 * om) - 1.0 / 6.0;
    let e1 = ((-g12 - g23 - om) * t).exp();
    let e2 = ((-g12 - g23 + om) * t).exp();
    let r11 = 1.0 / 3.0 - a * (-g12 + g23 - om) * e1 / g23 - b * (-g12 + g23 + om) * e2 / g23;
    let r22 = 1.0 / 3.0 - a * (g12 + om) * e1 / g23 - b * (g12 - om) * e2 / g23;
    let r33 = 1.0 / 3.0 + a * e1 + b * e2;
    Ok([r11, r22, r33])
}
