//! Model data and Liouville-space construction.
//!
//! Levels are 0-based in the API. A density matrix `ρ` of a `d`-level system
//! is flattened row-major: `ρ_jk` sits at `j·d + k`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{HeodError, Result, StateVector, Superoperator, C64};

/// Directed Lindblad channel with jump operator `sqrt(rate)·|to⟩⟨from|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// `d`-level system with Bohr energies, a real symmetric dipole matrix,
/// Lindblad channels and a global coupling strength `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSystem {
    pub dim: usize,
    pub energies: Vec<f64>,
    /// Row-major `dim × dim`.
    pub dipole: Vec<f64>,
    pub channels: Vec<Channel>,
    pub eta: f64,
}

impl LevelSystem {
    pub fn dipole_at(&self, i: usize, j: usize) -> f64 {
        self.dipole[i * self.dim + j]
    }

    /// Dissipation-only copy (`μ = 0`).
    pub fn without_dipole(&self) -> Self {
        Self {
            dipole: vec![0.0; self.dipole.len()],
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        let bad = |msg: String| Err(HeodError::InvalidModel(msg));
        if d < 2 {
            return bad(format!("dimension must be at least 2, got {d}"));
        }
        if self.energies.len() != d {
            return bad(format!("expected {d} energies, got {}", self.energies.len()));
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return bad("energies must be finite".into());
        }
        if self.energies[0] != 0.0 {
            return bad("energies[0] must be 0 (ground-state reference)".into());
        }
        if self.dipole.len() != d * d {
            return bad(format!("dipole must be {d}x{d}"));
        }
        for i in 0..d {
            if self.dipole_at(i, i) != 0.0 {
                return bad(format!("dipole diagonal entry ({i},{i}) must be zero"));
            }
            for j in 0..d {
                let v = self.dipole_at(i, j);
                if !v.is_finite() || v != self.dipole_at(j, i) {
                    return bad(format!("dipole must be finite and symmetric at ({i},{j})"));
                }
            }
        }
        for (n, ch) in self.channels.iter().enumerate() {
            if ch.from >= d || ch.to >= d || ch.from == ch.to {
                return bad(format!("channel {n} has invalid endpoints {} -> {}", ch.from, ch.to));
            }
            if !(ch.rate >= 0.0 && ch.rate.is_finite()) {
                return bad(format!("channel {n} rate must be finite and non-negative"));
            }
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta must be finite and non-negative".into());
        }
        Ok(())
    }
}

/// One cosine carrier `A cos(υ t + θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldComponent {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// Gaussian-enveloped multi-carrier field centered at `T/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlField {
    pub total_time: f64,
    pub envelope_width: f64,
    pub components: Vec<FieldComponent>,
}

impl ControlField {
    pub fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(HeodError::InvalidModel("field total_time must be positive".into()));
        }
        if !(self.envelope_width > 0.0 && self.envelope_width.is_finite()) {
            return Err(HeodError::InvalidModel("field envelope_width must be positive".into()));
        }
        Ok(())
    }

    /// `exp(-(t - T/2)² / 2σ²)`.
    pub fn envelope(&self, t: f64) -> f64 {
        let x = t - 0.5 * self.total_time;
        (-x * x / (2.0 * self.envelope_width * self.envelope_width)).exp()
    }

    pub fn value(&self, t: f64) -> f64 {
        field_value(self, t)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.amplitude == 0.0)
    }

    /// Same envelope and carriers with every amplitude set to zero.
    pub fn zeroed(&self) -> Self {
        let mut f = self.clone();
        f.components.iter_mut().for_each(|c| c.amplitude = 0.0);
        f
    }
}

pub fn field_value(field: &ControlField, t: f64) -> f64 {
    let carrier: f64 = field
        .components
        .iter()
        .map(|c| c.amplitude * (c.frequency * t + c.phase).cos())
        .sum();
    field.envelope(t) * carrier
}

/// Row-major bijection between level pairs `(j, k)` and flat indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiouvilleIndexMap {
    dim: usize,
}

pub fn index_map(dim: usize) -> Result<LiouvilleIndexMap> {
    if dim < 2 {
        return Err(HeodError::InvalidModel(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    Ok(LiouvilleIndexMap { dim })
}

impl LiouvilleIndexMap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn liouville_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn flat(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < self.dim && k < self.dim);
        j * self.dim + k
    }

    pub fn pair(&self, flat: usize) -> (usize, usize) {
        (flat / self.dim, flat % self.dim)
    }

    pub fn population(&self, m: usize) -> usize {
        self.flat(m, m)
    }

    pub fn is_population(&self, flat: usize) -> bool {
        let (j, k) = self.pair(flat);
        j == k
    }

    pub fn populations(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).map(|m| self.population(m))
    }

    /// 1-based label, `"12"` for `ρ_12`; levels beyond 9 use `"1.10"`.
    pub fn label(&self, flat: usize) -> String {
        let (j, k) = self.pair(flat);
        if self.dim <= 9 {
            format!("{}{}", j + 1, k + 1)
        } else {
            format!("{}.{}", j + 1, k + 1)
        }
    }

    /// Inverse of [`label`](Self::label).
    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let bad = || HeodError::Domain(format!("invalid Liouville state label {label:?}"));
        let (j, k) = if self.dim <= 9 {
            let digits: Vec<u32> = label
                .trim()
                .chars()
                .map(|c| c.to_digit(10))
                .collect::<Option<_>>()
                .ok_or_else(bad)?;
            match digits.as_slice() {
                [a, b] => (*a as usize, *b as usize),
                _ => return Err(bad()),
            }
        } else {
            let (a, b) = label.trim().split_once('.').ok_or_else(bad)?;
            (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
        };
        if j == 0 || k == 0 || j > self.dim || k > self.dim {
            return Err(bad());
        }
        Ok(self.flat(j - 1, k - 1))
    }
}

/// Entry `(r, c)` of the superoperator of `ρ ↦ Hρ − ρH` for a Hilbert-space
/// matrix `h` (row-major `d × d`).
pub(crate) fn commutator_entry(map: &LiouvilleIndexMap, h: &[C64], r: usize, c: usize) -> C64 {
    let d = map.dim();
    let (m, n) = map.pair(r);
    let (p, q) = map.pair(c);
    let mut v = C64::new(0.0, 0.0);
    if n == q {
        v += h[m * d + p];
    }
    if m == p {
        v -= h[q * d + n];
    }
    v
}

/// `i·η·𝓕` as a dense superoperator.
pub(crate) fn dissipator(system: &LevelSystem, map: &LiouvilleIndexMap) -> Superoperator {
    let d = system.dim;
    let dd = d * d;
    let mut out = DMatrix::zeros(dd, dd);
    for ch in &system.channels {
        let g = system.eta * ch.rate;
        if g == 0.0 {
            continue;
        }
        let gain = map.population(ch.to);
        let loss = map.population(ch.from);
        out[(gain, loss)] += C64::new(0.0, g);
        for n in 0..d {
            let a = map.flat(ch.from, n);
            out[(a, a)] += C64::new(0.0, -0.5 * g);
            let b = map.flat(n, ch.from);
            out[(b, b)] += C64::new(0.0, -0.5 * g);
        }
    }
    out
}

/// Hilbert-space `H₀ − μ e` for a fixed field value `e`.
pub(crate) fn lab_hamiltonian(system: &LevelSystem, e: f64) -> Vec<C64> {
    let d = system.dim;
    let mut h = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        h[i * d + i] = C64::new(system.energies[i], 0.0);
        for j in 0..d {
            if i != j {
                h[i * d + j] = C64::new(-system.dipole_at(i, j) * e, 0.0);
            }
        }
    }
    h
}

/// Generator of `i dρ/dt = 𝓗ρ` for the Lindblad equation with the field held
/// at the value `field_amplitude`.
pub fn build_liouvillian(system: &LevelSystem, field_amplitude: f64) -> Result<Superoperator> {
    system.validate()?;
    let map = index_map(system.dim)?;
    let h = lab_hamiltonian(system, field_amplitude);
    let mut out = dissipator(system, &map);
    let dd = map.liouville_dim();
    for r in 0..dd {
        for c in 0..dd {
            out[(r, c)] += commutator_entry(&map, &h, r, c);
        }
    }
    Ok(out)
}

/// Relative singular-value threshold for the population null space.
const NULL_SPACE_RTOL: f64 = 1e-10;

/// Field-free fixed point with zero coherences and unit trace.
pub fn steady_state(system: &LevelSystem) -> Result<StateVector> {
    let generator = build_liouvillian(system, 0.0)?;
    let map = index_map(system.dim)?;
    let d = system.dim;

    // The dissipator only moves population into population, so the zero-field
    // population block decouples from the coherences.
    let rates = DMatrix::<f64>::from_fn(d, d, |i, j| {
        (generator[(map.population(i), map.population(j))] * C64::new(0.0, -1.0)).re
    });
    let svd = rates.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.max();
    let cutoff = NULL_SPACE_RTOL * smax.max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..d)
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    if null.len() != 1 {
        return Err(HeodError::DegenerateSteadyState { nullity: null.len() });
    }
    let row = v_t.row(null[0]);
    let total: f64 = row.iter().sum();
    if total.abs() < f64::EPSILON {
        return Err(HeodError::DegenerateSteadyState { nullity: 1 });
    }
    let mut state = StateVector::zeros(d * d);
    for m in 0..d {
        state[map.population(m)] = C64::new(row[m] / total, 0.0);
    }
    Ok(state)
}

pub fn trace(map: &LiouvilleIndexMap, state: &StateVector) -> C64 {
    map.populations().map(|p| state[p]).sum()
}

/// `max_jk |ρ_jk − conj(ρ_kj)|`.
pub fn hermiticity_residual(map: &LiouvilleIndexMap, state: &StateVector) -> f64 {
    let d = map.dim();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let diff = state[map.flat(j, k)] - state[map.flat(k, j)].conj();
            worst = worst.max(diff.norm());
        }
    }
    worst
}

/// `|source⟩⟩` for a population or coherence basis state.
pub fn basis_state(dim: usize, flat: usize) -> StateVector {
    let mut v = StateVector::zeros(dim * dim);
    v[flat] = C64::new(1.0, 0.0);
    v
}
