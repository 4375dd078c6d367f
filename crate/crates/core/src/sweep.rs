//! Encoded sweeps over `s`, spectral decoding and pathway assignment.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::encoding::{modulation_phases, raw_frequency, EncodingMatrix, Pathway};
use crate::generator::Generator;
use crate::propagation::{GeneratorSamples, TimeGrid};
use crate::{HeodError, Result, StateVector, C64};

/// Observable `u(s) = ⟨⟨target|U_s(T)|source⟩⟩` for `s = 0..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub values: Vec<C64>,
    pub source: usize,
    pub target: usize,
    pub t_end: f64,
    pub steps: usize,
    pub encoding: EncodingMatrix,
}

/// Runs the `N` encoded propagations on a pool of `workers` threads. The
/// result does not depend on `workers`.
pub fn run_sweep<G: Generator + ?Sized>(
    generator: &G,
    gamma: &EncodingMatrix,
    source: usize,
    target: usize,
    grid: &TimeGrid,
    workers: usize,
) -> Result<SweepRecord> {
    let dim = generator.liouville_dim();
    if gamma.dim() != dim {
        return Err(HeodError::Domain(format!(
            "encoding matrix is {0}x{0} but the generator is {1}x{1}",
            gamma.dim(),
            dim
        )));
    }
    if source >= dim || target >= dim {
        return Err(HeodError::Domain(format!(
            "source/target {source}/{target} outside dimension {dim}"
        )));
    }
    let mut rho0 = StateVector::zeros(dim);
    rho0[source] = C64::new(1.0, 0.0);
    let samples = GeneratorSamples::new(generator, grid);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HeodError::Domain(format!("cannot start worker pool: {e}")))?;

    let results: Vec<Result<C64>> = pool.install(|| {
        (0..gamma.samples())
            .into_par_iter()
            .map(|s| {
                let phases = modulation_phases(samples.support(), gamma, s);
                samples
                    .propagate_modulated(&phases, &rho0)
                    .map(|rho| rho[target])
                    .map_err(|e| HeodError::Sweep { s, source: Box::new(e) })
            })
            .collect()
    });
    let values = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepRecord {
        values,
        source,
        target,
        t_end: grid.t_end(),
        steps: grid.steps(),
        encoding: gamma.clone(),
    })
}

/// Amplitude per feature-frequency bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub amplitudes: Vec<C64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `rel · max_f |c(f)|`.
    pub fn relative_threshold(&self, rel: f64) -> f64 {
        rel * self.max_magnitude()
    }
}

/// `c(f) = (1/N) Σ_s u(s) e^{−2πi f s/N}`.
pub fn decode_spectrum(record: &SweepRecord) -> Spectrum {
    decode_values(&record.values)
}

pub fn decode_values(values: &[C64]) -> Spectrum {
    let n = values.len();
    let mut buf = values.to_vec();
    if n > 0 {
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    }
    let scale = 1.0 / n.max(1) as f64;
    Spectrum { amplitudes: buf.into_iter().map(|c| c * scale).collect() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwayEntry {
    pub pathway: Pathway,
    pub raw_frequency: u64,
    pub bin: usize,
    pub amplitude: C64,
    pub magnitude: f64,
    pub phase: f64,
    /// Another listed pathway shares the bin; `amplitude` is the bin total.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwayReport {
    pub entries: Vec<PathwayEntry>,
    /// Bins at or above threshold that no listed pathway maps to.
    pub unassigned: Vec<(usize, C64)>,
    pub threshold: f64,
}

/// Matches each pathway to its bin and keeps those with `|c(bin)| ≥ threshold`,
/// in input order.
pub fn assign_pathways(
    spectrum: &Spectrum,
    pathways: &[Pathway],
    gamma: &EncodingMatrix,
    threshold: f64,
) -> PathwayReport {
    let n = spectrum.len() as u64;
    let mut by_bin: BTreeMap<usize, usize> = BTreeMap::new();
    let located: Vec<(u64, usize)> = pathways
        .iter()
        .map(|p| {
            let raw = raw_frequency(p, gamma);
            let bin = (raw % n.max(1)) as usize;
            *by_bin.entry(bin).or_default() += 1;
            (raw, bin)
        })
        .collect();

    let entries = pathways
        .iter()
        .zip(&located)
        .filter(|(_, &(_, bin))| spectrum.amplitudes[bin].norm() >= threshold)
        .map(|(p, &(raw, bin))| {
            let c = spectrum.amplitudes[bin];
            PathwayEntry {
                pathway: p.clone(),
                raw_frequency: raw,
                bin,
                amplitude: c,
                magnitude: c.norm(),
                phase: c.arg(),
                ambiguous: by_bin[&bin] > 1,
            }
        })
        .collect();
    let unassigned = spectrum
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(f, c)| c.norm() >= threshold && !by_bin.contains_key(f))
        .map(|(f, &c)| (f, c))
        .collect();
    PathwayReport { entries, unassigned, threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{enumerate_pathways, validate_encoding};
    use crate::generator::{EntryGenerator, LindbladGenerator, SupportMask};
    use crate::models::two_level_toy;
    use std::f64::consts::TAU;

    fn naive_dft(u: &[C64]) -> Vec<C64> {
        let n = u.len();
        (0..n)
            .map(|f| {
                u.iter()
                    .enumerate()
                    .map(|(s, &x)| x * C64::from_polar(1.0, -TAU * (f * s) as f64 / n as f64))
                    .sum::<C64>()
                    / n as f64
            })
            .collect()
    }

    #[test]
    fn decode_matches_naive_transform() {
        let u: Vec<C64> = (0..64)
            .map(|s| C64::new((s as f64 * 0.37).sin(), (s as f64 * 0.11).cos() - 0.2))
            .collect();
        let fast = decode_values(&u);
        let slow = naive_dft(&u);
        for (a, b) in fast.amplitudes.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
        let total: C64 = fast.amplitudes.iter().sum();
        assert!((total - u[0]).norm() < 1e-13);
    }

    #[test]
    fn constant_and_pure_tone() {
        let s = decode_values(&vec![C64::new(0.4, 0.1); 16]);
        assert!((s.amplitudes[0] - C64::new(0.4, 0.1)).norm() < 1e-15);
        assert!(s.amplitudes[1..].iter().all(|c| c.norm() < 1e-15));
        let tone: Vec<C64> =
            (0..32).map(|k| C64::from_polar(0.25, TAU * 5.0 * k as f64 / 32.0)).collect();
        let s = decode_values(&tone);
        assert!((s.amplitudes[5].norm() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn single_edge_decodes_exactly() {
        let h = C64::new(3e-3, -1e-3);
        let t_end = 2.0;
        let g = EntryGenerator::new(2).with_constant(1, 0, h);
        let gamma = EncodingMatrix::new(2, vec![0, 3, 3, 0], 16).unwrap();
        let grid = TimeGrid::new(t_end, 8).unwrap();
        let rec = run_sweep(&g, &gamma, 0, 1, &grid, 2).unwrap();
        for (s, u) in rec.values.iter().enumerate() {
            let exact = -C64::i() * h * t_end * C64::from_polar(1.0, TAU * 3.0 * s as f64 / 16.0);
            assert!((u - exact).norm() <= 1e-15);
        }
        let spec = decode_spectrum(&rec);
        assert!((spec.amplitudes[3] - (-C64::i() * h * t_end)).norm() <= 1e-12);
        for (f, c) in spec.amplitudes.iter().enumerate() {
            if f != 3 {
                assert!(c.norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let b = two_level_toy(0.002, 0.01);
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let grid = TimeGrid::new(b.field.total_time, 1024).unwrap();
        let gamma = b.off_diagonal.with_samples(64).unwrap();
        let a = run_sweep(&g, &gamma, 0, 3, &grid, 1).unwrap();
        let c = run_sweep(&g, &gamma, 0, 3, &grid, 3).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn sweep_errors_carry_index() {
        let g = EntryGenerator::new(1).with_constant(0, 0, C64::new(0.0, 1e30));
        let gamma = EncodingMatrix::zeros(1, 4).unwrap();
        let grid = TimeGrid::new(10.0, 10).unwrap();
        let err = run_sweep(&g, &gamma, 0, 0, &grid, 1).unwrap_err();
        assert!(matches!(err, HeodError::Sweep { s: 0, .. }));
    }

    #[test]
    fn assignment_flags() {
        let gamma = EncodingMatrix::new(2, vec![0, 2, 2, 0], 8).unwrap();
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[2] = C64::new(0.0, 1.0);
        amps[4] = C64::new(0.5, 0.0);
        amps[6] = C64::new(0.2, 0.0);
        let spec = Spectrum { amplitudes: amps };
        let p1 = Pathway(vec![0, 1]);
        let p2 = Pathway(vec![0, 1, 0]);
        let p2b = Pathway(vec![0, 1, 0]);
        let r = assign_pathways(&spec, &[p1.clone(), p2.clone(), p2b], &gamma, 0.1);
        assert_eq!(r.entries.len(), 3);
        assert_eq!(r.entries[0].bin, 2);
        assert!((r.entries[0].phase - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(!r.entries[0].ambiguous);
        assert!(r.entries[1].ambiguous);
        assert_eq!(r.unassigned, vec![(6, C64::new(0.2, 0.0))]);

        let none = assign_pathways(&spec, &[p1, p2], &gamma, f64::INFINITY);
        assert!(none.entries.is_empty() && none.unassigned.is_empty());
    }

    #[test]
    fn toy_spectrum_matches_enumerated_bins() {
        // dissipation only: every significant bin belongs to a dissipative walk
        let b = two_level_toy(0.002, 0.0);
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let mask = SupportMask::of(&g);
        let grid = TimeGrid::new(b.field.total_time, 512).unwrap();
        let rec = run_sweep(&g, &b.off_diagonal, 0, 3, &grid, 1).unwrap();
        let spec = decode_spectrum(&rec);
        let walks = enumerate_pathways(
            &crate::encoding::encoded_support(&mask, &b.off_diagonal),
            0,
            3,
            3,
            true,
        )
        .unwrap();
        assert!(walks.iter().all(|p| p.edges().all(|(a, c)| {
            let (x, y) = (a.min(c), a.max(c));
            (x, y) == (0, 3)
        })));
        let report = assign_pathways(&spec, &walks, &b.off_diagonal, spec.relative_threshold(1e-3));
        assert!(report.unassigned.is_empty(), "{:?}", report.unassigned);
        assert!(!report.entries.is_empty());
        assert!(validate_encoding(&b.off_diagonal, &mask, 0, 3, 3).unwrap().is_collision_free());
    }
}
