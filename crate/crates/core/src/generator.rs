//! Time-dependent Liouville-space generators.
//!
//! A [`Generator`] exposes a fixed structural support (row, column pairs) and
//! fills the values on that support for any time. Propagators, the encoder and
//! the Dyson oracle all work on the support only; zeros outside it are exact.

use std::sync::Arc;

use crate::liouville::{
    commutator_entry, dissipator, index_map, ControlField, FieldComponent, LevelSystem,
    LiouvilleIndexMap,
};
use crate::{HeodError, Result, Superoperator, C64};

pub trait Generator: Send + Sync {
    /// Liouville dimension `D = d²`.
    fn liouville_dim(&self) -> usize;

    /// Structurally nonzero entries as `(row, column)`; `values` fills them in
    /// this order.
    fn support(&self) -> &[(usize, usize)];

    fn values(&self, t: f64, out: &mut [C64]);

    fn matrix(&self, t: f64) -> Superoperator {
        let dim = self.liouville_dim();
        let mut vals = vec![C64::new(0.0, 0.0); self.support().len()];
        self.values(t, &mut vals);
        let mut m = Superoperator::zeros(dim, dim);
        for (&(r, c), v) in self.support().iter().zip(vals) {
            m[(r, c)] = v;
        }
        m
    }

    /// Position of `(row, col)` in [`support`](Self::support).
    fn entry_index(&self, row: usize, col: usize) -> Option<usize> {
        self.support().iter().position(|&e| e == (row, col))
    }
}

impl<G: Generator + ?Sized> Generator for &G {
    fn liouville_dim(&self) -> usize {
        (**self).liouville_dim()
    }
    fn support(&self) -> &[(usize, usize)] {
        (**self).support()
    }
    fn values(&self, t: f64, out: &mut [C64]) {
        (**self).values(t, out)
    }
    fn entry_index(&self, row: usize, col: usize) -> Option<usize> {
        (**self).entry_index(row, col)
    }
}

impl<G: Generator + ?Sized> Generator for Box<G> {
    fn liouville_dim(&self) -> usize {
        (**self).liouville_dim()
    }
    fn support(&self) -> &[(usize, usize)] {
        (**self).support()
    }
    fn values(&self, t: f64, out: &mut [C64]) {
        (**self).values(t, out)
    }
    fn entry_index(&self, row: usize, col: usize) -> Option<usize> {
        (**self).entry_index(row, col)
    }
}

impl<G: Generator + ?Sized> Generator for Arc<G> {
    fn liouville_dim(&self) -> usize {
        (**self).liouville_dim()
    }
    fn support(&self) -> &[(usize, usize)] {
        (**self).support()
    }
    fn values(&self, t: f64, out: &mut [C64]) {
        (**self).values(t, out)
    }
    fn entry_index(&self, row: usize, col: usize) -> Option<usize> {
        (**self).entry_index(row, col)
    }
}

/// Boolean `D × D` mask; `edge(from, to)` is true when the generator has a
/// structurally nonzero entry at row `to`, column `from`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMask {
    dim: usize,
    mask: Vec<bool>,
}

impl SupportMask {
    pub fn empty(dim: usize) -> Self {
        Self { dim, mask: vec![false; dim * dim] }
    }

    pub fn from_entries(dim: usize, entries: &[(usize, usize)]) -> Self {
        let mut m = Self::empty(dim);
        for &(r, c) in entries {
            m.set(r, c, true);
        }
        m
    }

    pub fn of<G: Generator + ?Sized>(g: &G) -> Self {
        Self::from_entries(g.liouville_dim(), g.support())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.mask[row * self.dim + col] = on;
    }

    pub fn edge(&self, from: usize, to: usize) -> bool {
        self.get(to, from)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// Time-independent generator taken from a dense matrix.
#[derive(Debug, Clone)]
pub struct ConstantGenerator {
    dim: usize,
    support: Vec<(usize, usize)>,
    values: Vec<C64>,
}

impl ConstantGenerator {
    pub fn new(matrix: &Superoperator) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "generator must be square");
        let dim = matrix.nrows();
        let mut support = Vec::new();
        let mut values = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let v = matrix[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    support.push((r, c));
                    values.push(v);
                }
            }
        }
        Self { dim, support, values }
    }
}

impl Generator for ConstantGenerator {
    fn liouville_dim(&self) -> usize {
        self.dim
    }
    fn support(&self) -> &[(usize, usize)] {
        &self.support
    }
    fn values(&self, _t: f64, out: &mut [C64]) {
        out.copy_from_slice(&self.values);
    }
}

type EntryFn = Box<dyn Fn(f64) -> C64 + Send + Sync>;

/// Generator assembled from per-entry closures. Mostly useful for synthetic
/// checks of the encoder and decoder.
pub struct EntryGenerator {
    dim: usize,
    support: Vec<(usize, usize)>,
    entries: Vec<EntryFn>,
}

impl EntryGenerator {
    pub fn new(dim: usize) -> Self {
        Self { dim, support: Vec::new(), entries: Vec::new() }
    }

    pub fn with_entry(
        mut self,
        row: usize,
        col: usize,
        f: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        assert!(row < self.dim && col < self.dim);
        assert!(!self.support.contains(&(row, col)), "duplicate entry ({row},{col})");
        self.support.push((row, col));
        self.entries.push(Box::new(f));
        self
    }

    pub fn with_constant(self, row: usize, col: usize, v: C64) -> Self {
        self.with_entry(row, col, move |_| v)
    }
}

impl Generator for EntryGenerator {
    fn liouville_dim(&self) -> usize {
        self.dim
    }
    fn support(&self) -> &[(usize, usize)] {
        &self.support
    }
    fn values(&self, t: f64, out: &mut [C64]) {
        for (o, f) in out.iter_mut().zip(&self.entries) {
            *o = f(t);
        }
    }
}

/// A field component assigned to the dipole transition `lower → upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaCoupling {
    pub lower: usize,
    pub upper: usize,
    pub dipole: f64,
    pub component: FieldComponent,
    /// `υ − (ω_upper − ω_lower)`.
    pub detuning: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Frame {
    /// `H₀ − μE(t)`.
    Lab,
    /// `−μ_ij E(t) e^{i(ω_i − ω_j)t}`.
    Interaction,
    /// Slowly varying Rabi envelopes in the interaction frame.
    Rwa { couplings: Vec<RwaCoupling>, carry_phases: bool },
}

/// Lindblad generator `i dρ/dt = 𝓗(t)ρ` in the lab frame, the interaction
/// frame, or the interaction frame under the rotating-wave approximation.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    map: LiouvilleIndexMap,
    system: LevelSystem,
    field: ControlField,
    frame: Frame,
    support: Vec<(usize, usize)>,
    dissipator: Vec<C64>,
}

impl LindbladGenerator {
    pub fn lab(system: &LevelSystem, field: &ControlField) -> Result<Self> {
        Self::build(system, field, Frame::Lab)
    }

    pub fn interaction(system: &LevelSystem, field: &ControlField) -> Result<Self> {
        Self::build(system, field, Frame::Interaction)
    }

    pub fn rwa(system: &LevelSystem, field: &ControlField, carry_phases: bool) -> Result<Self> {
        system.validate()?;
        field.validate()?;
        let couplings = assign_rwa(system, field)?;
        Self::build(system, field, Frame::Rwa { couplings, carry_phases })
    }

    fn build(system: &LevelSystem, field: &ControlField, frame: Frame) -> Result<Self> {
        system.validate()?;
        field.validate()?;
        let map = index_map(system.dim)?;
        let d = system.dim;
        let dd = d * d;
        let diss = dissipator(system, &map);

        let mut coupled = vec![false; d * d];
        match &frame {
            Frame::Lab | Frame::Interaction => {
                if !field.is_zero() {
                    for i in 0..d {
                        for j in 0..d {
                            coupled[i * d + j] = system.dipole_at(i, j) != 0.0;
                        }
                    }
                }
            }
            Frame::Rwa { couplings, .. } => {
                for c in couplings {
                    coupled[c.lower * d + c.upper] = true;
                    coupled[c.upper * d + c.lower] = true;
                }
            }
        }

        let lab = matches!(frame, Frame::Lab);
        let mut support = Vec::new();
        let mut dissipator_vals = Vec::new();
        for r in 0..dd {
            let (m, n) = map.pair(r);
            for c in 0..dd {
                let (p, q) = map.pair(c);
                let present = if r == c {
                    lab && system.energies[m] != system.energies[n]
                } else {
                    (n == q && coupled[m * d + p]) || (m == p && coupled[q * d + n])
                };
                let dv = diss[(r, c)];
                if present || dv != C64::new(0.0, 0.0) {
                    support.push((r, c));
                    dissipator_vals.push(dv);
                }
            }
        }

        Ok(Self {
            map,
            system: system.clone(),
            field: field.clone(),
            frame,
            support,
            dissipator: dissipator_vals,
        })
    }

    pub fn index_map(&self) -> &LiouvilleIndexMap {
        &self.map
    }

    pub fn system(&self) -> &LevelSystem {
        &self.system
    }

    pub fn field(&self) -> &ControlField {
        &self.field
    }

    pub fn rwa_couplings(&self) -> &[RwaCoupling] {
        match &self.frame {
            Frame::Rwa { couplings, .. } => couplings,
            _ => &[],
        }
    }

    /// Hilbert-space Hamiltonian of the frame at time `t`, row-major.
    pub fn hamiltonian(&self, t: f64) -> Vec<C64> {
        let s = &self.system;
        let d = s.dim;
        let mut h = vec![C64::new(0.0, 0.0); d * d];
        match &self.frame {
            Frame::Lab => {
                let e = self.field.value(t);
                for i in 0..d {
                    h[i * d + i] = C64::new(s.energies[i], 0.0);
                    for j in 0..d {
                        if i != j {
                            h[i * d + j] = C64::new(-s.dipole_at(i, j) * e, 0.0);
                        }
                    }
                }
            }
            Frame::Interaction => {
                let e = self.field.value(t);
                for i in 0..d {
                    for j in 0..d {
                        let mu = s.dipole_at(i, j);
                        if i != j && mu != 0.0 {
                            let phase = (s.energies[i] - s.energies[j]) * t;
                            h[i * d + j] = C64::from_polar(-mu * e, phase);
                        }
                    }
                }
            }
            Frame::Rwa { couplings, carry_phases } => {
                let env = self.field.envelope(t);
                for c in couplings {
                    let theta = if *carry_phases { c.component.phase } else { 0.0 };
                    let w = C64::from_polar(
                        -c.dipole * c.component.amplitude * 0.5 * env,
                        theta + c.detuning * t,
                    );
                    h[c.lower * d + c.upper] += w;
                    h[c.upper * d + c.lower] += w.conj();
                }
            }
        }
        h
    }
}

impl Generator for LindbladGenerator {
    fn liouville_dim(&self) -> usize {
        self.map.liouville_dim()
    }

    fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    fn values(&self, t: f64, out: &mut [C64]) {
        let h = self.hamiltonian(t);
        for ((o, &(r, c)), dv) in out.iter_mut().zip(&self.support).zip(&self.dissipator) {
            *o = commutator_entry(&self.map, &h, r, c) + dv;
        }
    }
}

/// Pair every nonzero field component with the dipole transition whose Bohr
/// gap is closest to its carrier frequency.
fn assign_rwa(system: &LevelSystem, field: &ControlField) -> Result<Vec<RwaCoupling>> {
    let d = system.dim;
    let transitions: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .filter(|&(i, j)| system.dipole_at(i, j) != 0.0)
        .collect();
    let resonance_width = 1.0 / field.envelope_width;
    let mut couplings: Vec<RwaCoupling> = Vec::new();

    for comp in field.components.iter().filter(|c| c.amplitude != 0.0) {
        let mut ranked: Vec<(f64, (usize, usize))> = transitions
            .iter()
            .map(|&(i, j)| {
                let gap = (system.energies[j] - system.energies[i]).abs();
                ((comp.frequency - gap).abs(), (i, j))
            })
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        let Some(&(miss, (i, j))) = ranked.first() else {
            return Err(HeodError::RwaMismatch(
                "field present but the system has no dipole transitions".into(),
            ));
        };
        if let Some(&(next, _)) = ranked.get(1) {
            if (next - miss).abs() <= 1e-12 * miss.max(1e-300).max(comp.frequency.abs()) {
                return Err(HeodError::RwaMismatch(format!(
                    "component at frequency {} is equally close to two transitions",
                    comp.frequency
                )));
            }
        }
        if miss >= resonance_width {
            return Err(HeodError::RwaMismatch(format!(
                "component at frequency {} is not resonant with any transition (closest miss {miss:.3e})",
                comp.frequency
            )));
        }
        // orient so that ω_upper ≥ ω_lower
        let (lower, upper) = if system.energies[j] >= system.energies[i] { (i, j) } else { (j, i) };
        if couplings.iter().any(|c| (c.lower, c.upper) == (lower, upper)) {
            return Err(HeodError::RwaMismatch(format!(
                "transition {}-{} has more than one resonant component",
                lower + 1,
                upper + 1
            )));
        }
        couplings.push(RwaCoupling {
            lower,
            upper,
            dipole: system.dipole_at(lower, upper),
            component: *comp,
            detuning: comp.frequency - (system.energies[upper] - system.energies[lower]),
        });
    }

    if !field.is_zero() {
        for &(i, j) in &transitions {
            let (lower, upper) = if system.energies[j] >= system.energies[i] { (i, j) } else { (j, i) };
            if !couplings.iter().any(|c| (c.lower, c.upper) == (lower, upper)) {
                return Err(HeodError::RwaMismatch(format!(
                    "no resonant component for transition {}-{}",
                    lower + 1,
                    upper + 1
                )));
            }
        }
    }
    Ok(couplings)
}
