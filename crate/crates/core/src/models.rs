//! Preset models.

use crate::encoding::EncodingMatrix;
use crate::liouville::{Channel, ControlField, FieldComponent, LevelSystem};
use crate::{HeodError, Result};

/// Reference magnitude of the populations-only pathway `11>22>33`, used to
/// fix `eta`.
pub const U118_REFERENCE: f64 = 2.858e-2;

/// Expected values for one original-picture pathway: magnitudes and phases
/// for the off-diagonal and diagonal-inclusive schemes, and the quadrature
/// magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginalRow {
    pub pathway: &'static str,
    pub frequency: u64,
    pub off_diagonal: (f64, f64),
    pub diagonal_inclusive: (f64, f64),
    pub integration: f64,
}

/// Expected values for one transformed-picture pathway.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedRow {
    pub pathway: &'static str,
    pub decoded: (f64, f64),
    pub integration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub name: &'static str,
    pub system: LevelSystem,
    pub field: ControlField,
    /// Default propagation grid size over `[0, T]`.
    pub steps: usize,
    pub max_order: usize,
    /// Source and target Liouville flats.
    pub source: usize,
    pub target: usize,
    pub off_diagonal: EncodingMatrix,
    pub diagonal_inclusive: EncodingMatrix,
    pub transformed: EncodingMatrix,
    /// Pathway labels expected in reports, in display order.
    pub pathways: Vec<&'static str>,
    pub original_rows: Vec<OriginalRow>,
    pub transformed_rows: Vec<TransformedRow>,
    pub eta_provenance: String,
}

/// `eta = sqrt(2·target / (α12·α23·T²))`, inverting
/// `|U(11>22>33)| = eta²·α12·α23·T²/2`.
pub fn calibrate_eta(target: f64, alpha12: f64, alpha23: f64, total_time: f64) -> Result<f64> {
    if !(target >= 0.0) || !(alpha12 > 0.0) || !(alpha23 > 0.0) || !(total_time > 0.0) {
        return Err(HeodError::Domain(
            "calibrate_eta needs a non-negative target and positive rates and time".into(),
        ));
    }
    Ok((2.0 * target / (alpha12 * alpha23 * total_time * total_time)).sqrt())
}

const GAMMA: [[u32; 9]; 9] = [
    [0, 1, 0, 5, 17, 0, 0, 0, 0],
    [1, 0, 21, 0, 33, 0, 0, 0, 0],
    [0, 21, 0, 0, 0, 41, 0, 0, 0],
    [5, 0, 0, 0, 59, 0, 68, 0, 0],
    [17, 33, 0, 59, 0, 77, 0, 83, 101],
    [0, 0, 41, 0, 77, 0, 0, 0, 109],
    [0, 0, 0, 68, 0, 0, 0, 111, 0],
    [0, 0, 0, 0, 83, 0, 111, 0, 127],
    [0, 0, 0, 0, 101, 109, 0, 127, 0],
];

const DIAGONAL_CODES: [(usize, u32); 3] = [(0, 221), (4, 277), (8, 341)];

/// Code for the `11 <-> 33` entries that only the transformed generator has.
pub const TRANSFORMED_EXTRA_CODE: u32 = 151;

const TABLE_PATHWAYS: [&str; 11] = [
    "11>12>13>23>33",
    "11>21>31>32>33",
    "11>12>22>32>33",
    "11>21>22>23>33",
    "11>12>22>23>33",
    "11>21>22>32>33",
    "11>12>22>33",
    "11>21>22>33",
    "11>22>23>33",
    "11>22>32>33",
    "11>22>33",
];

/// Three-level ladder with two symmetric dissipation channel pairs and a
/// two-colour Gaussian pulse, with `eta` calibrated to [`U118_REFERENCE`].
pub fn benchmark_three_level() -> Benchmark {
    let (alpha12, alpha23) = (0.089, 0.194);
    let (w2, w3) = (0.0365, 0.0651);
    let (mu12, mu23) = (0.0691, 0.0835);
    let total_time = 8268.221;
    let eta = calibrate_eta(U118_REFERENCE, alpha12, alpha23, total_time).unwrap();

    let system = LevelSystem {
        dim: 3,
        energies: vec![0.0, w2, w3],
        dipole: vec![0.0, mu12, 0.0, mu12, 0.0, mu23, 0.0, mu23, 0.0],
        channels: vec![
            Channel { from: 1, to: 0, rate: alpha12 },
            Channel { from: 0, to: 1, rate: alpha12 },
            Channel { from: 2, to: 1, rate: alpha23 },
            Channel { from: 1, to: 2, rate: alpha23 },
        ],
        eta,
    };
    let field = ControlField {
        total_time,
        envelope_width: 1240.23,
        components: vec![
            FieldComponent { amplitude: 0.0038, frequency: w2, phase: 1.6551 },
            FieldComponent { amplitude: 0.0037, frequency: w3 - w2, phase: 3.2031 },
        ],
    };

    let rows: Vec<Vec<u32>> = GAMMA.iter().map(|r| r.to_vec()).collect();
    let off_diagonal = EncodingMatrix::from_rows(&rows, 1024).unwrap();
    let mut diagonal_inclusive = off_diagonal.with_samples(2048).unwrap();
    for (flat, code) in DIAGONAL_CODES {
        diagonal_inclusive = diagonal_inclusive.with_code(flat, flat, code).unwrap();
    }
    let transformed = off_diagonal.with_code(0, 8, TRANSFORMED_EXTRA_CODE).unwrap();

    let row = |i: usize, frequency, off, diag, integration| OriginalRow {
        pathway: TABLE_PATHWAYS[i],
        frequency,
        off_diagonal: off,
        diagonal_inclusive: diag,
        integration,
    };
    let original_rows = vec![
        row(0, 172, (1.197e-3, 1.704e-2), (1.433e-3, 1.606e-2), 1.606e-3),
        row(1, 311, (1.200e-3, -1.714e-2), (1.436e-3, -1.616e-2), 1.606e-3),
        row(2, 244, (1.192e-3, 6.901e-2), (1.492e-3, 7.884e-2), 1.642e-3),
        row(3, 250, (1.197e-3, -6.816e-2), (1.500e-3, -7.778e-2), 1.642e-3),
        row(4, 220, (1.171e-3, 2.433e-2), (1.468e-3, 2.476e-2), 1.615e-3),
        row(5, 274, (1.172e-3, -2.422e-2), (1.471e-3, -2.465e-2), 1.615e-3),
        row(6, 135, (8.978e-3, 8.187e-2), (1.166e-2, 8.536e-2), 1.230e-2),
        row(7, 165, (8.978e-3, -8.187e-2), (1.166e-2, -8.536e-2), 1.230e-2),
        row(8, 203, (5.436e-3, -5.526e-2), (7.296e-3, -5.811e-2), 7.798e-3),
        row(9, 227, (5.435e-3, 5.530e-2), (7.295e-3, 5.815e-2), 7.798e-3),
        row(10, 118, (2.032e-2, 6.794e-15), (2.857e-2, 6.572e-15), 2.858e-2),
    ];
    let trow = |i: usize, decoded, integration| TransformedRow {
        pathway: TABLE_PATHWAYS[i],
        decoded,
        integration,
    };
    let transformed_rows = vec![
        trow(0, (1.435e-3, 4.926e-14), 1.443e-3),
        trow(1, (1.442e-3, 4.707e-13), 1.443e-3),
        trow(2, (1.468e-3, 3.732e-14), 1.476e-3),
        trow(3, (1.533e-3, 5.196e-13), 1.476e-3),
        trow(4, (1.470e-3, -3.164e-13), 1.476e-3),
        trow(5, (1.438e-3, -3.581e-13), 1.476e-3),
        trow(6, (2.322e-2, 1.097e-14), 2.326e-2),
        trow(7, (2.322e-2, 6.223e-14), 2.326e-2),
        trow(8, (3.042e-2, 1.382e-14), 3.045e-2),
        trow(9, (3.040e-2, 2.191e-14), 3.045e-2),
        trow(10, (2.389e-1, 6.125e-15), 2.3868e-1),
    ];

    Benchmark {
        name: "three-level",
        system,
        field,
        steps: 32768,
        max_order: 4,
        source: 0,
        target: 8,
        off_diagonal,
        diagonal_inclusive,
        transformed,
        pathways: TABLE_PATHWAYS.to_vec(),
        original_rows,
        transformed_rows,
        eta_provenance: format!(
            "eta calibrated so that |U(11>22>33)| = eta^2*a12*a23*T^2/2 = {U118_REFERENCE}"
        ),
    }
}

/// Resonantly driven two-level system with one symmetric channel pair.
///
/// `rabi` is `μ·A`; the dipole is 1. The same collision-free 4×4 encoding is
/// used for every picture (walks `11 -> 22` up to order 3 land on distinct
/// bins).
pub fn two_level_toy(rate: f64, rabi: f64) -> Benchmark {
    let omega = 0.5;
    let system = LevelSystem {
        dim: 2,
        energies: vec![0.0, omega],
        dipole: vec![0.0, 1.0, 1.0, 0.0],
        channels: vec![
            Channel { from: 1, to: 0, rate },
            Channel { from: 0, to: 1, rate },
        ],
        eta: 1.0,
    };
    let field = ControlField {
        total_time: 200.0,
        envelope_width: 30.0,
        components: vec![FieldComponent { amplitude: rabi, frequency: omega, phase: 0.0 }],
    };
    let codes = vec![
        vec![0, 1, 3, 81],
        vec![1, 0, 0, 9],
        vec![3, 0, 0, 27],
        vec![81, 9, 27, 0],
    ];
    let gamma = EncodingMatrix::from_rows(&codes, 512).unwrap();
    Benchmark {
        name: "two-level-toy",
        system,
        field,
        steps: 4096,
        max_order: 3,
        source: 0,
        target: 3,
        off_diagonal: gamma.clone(),
        diagonal_inclusive: gamma.clone(),
        transformed: gamma,
        pathways: Vec::new(),
        original_rows: Vec::new(),
        transformed_rows: Vec::new(),
        eta_provenance: "eta fixed at 1".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{validate_encoding, Pathway};
    use crate::generator::{LindbladGenerator, SupportMask};
    use crate::liouville::index_map;

    #[test]
    fn benchmark_constants() {
        let b = benchmark_three_level();
        assert_eq!(b.system.energies[1], 0.0365);
        assert_eq!(b.system.dipole_at(1, 2), 0.0835);
        assert_eq!(b.off_diagonal.code(0, 4), 17);
        assert_eq!(b.off_diagonal.code(4, 8), 101);
        let diag: Vec<u32> = (0..9).map(|a| b.diagonal_inclusive.code(a, a)).collect();
        assert_eq!(diag, vec![221, 0, 0, 0, 277, 0, 0, 0, 341]);
        assert!(!b.off_diagonal.has_diagonal_codes());
        assert_eq!(b.transformed.code(8, 0), TRANSFORMED_EXTRA_CODE);
        assert!((b.system.eta - 2.2006e-4).abs() < 1e-8);
        b.system.validate().unwrap();
        b.field.validate().unwrap();
        assert_eq!(benchmark_three_level(), b);
    }

    #[test]
    fn eta_calibration() {
        assert_eq!(calibrate_eta(0.0, 0.089, 0.194, 8268.221).unwrap(), 0.0);
        let a = calibrate_eta(1e-2, 0.089, 0.194, 8268.221).unwrap();
        let b = calibrate_eta(2e-2, 0.089, 0.194, 8268.221).unwrap();
        assert!((b / a - 2f64.sqrt()).abs() < 1e-14);
        assert!(calibrate_eta(-1.0, 0.089, 0.194, 1.0).is_err());
        assert!(calibrate_eta(1.0, 0.0, 0.194, 1.0).is_err());
    }

    #[test]
    fn table_rows_are_consistent() {
        let b = benchmark_three_level();
        let map = index_map(3).unwrap();
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let mask = SupportMask::of(&g);
        for (row, label) in b.original_rows.iter().zip(&b.pathways) {
            assert_eq!(row.pathway, *label);
            let p = Pathway::parse(label, &map).unwrap();
            let f = crate::encoding::pathway_frequency(&p, &b.off_diagonal, &mask).unwrap();
            assert_eq!(f.raw, row.frequency);
        }
        assert_eq!(b.transformed_rows.len(), 11);
    }

    #[test]
    fn toy_encoding_is_collision_free() {
        for (rate, rabi) in [(0.0, 0.0), (0.002, 0.0), (0.002, 0.01)] {
            let b = two_level_toy(rate, rabi);
            b.system.validate().unwrap();
            let g = LindbladGenerator::lab(&b.system, &b.field.clone()).unwrap();
            let r = validate_encoding(&b.off_diagonal, &SupportMask::of(&g), 0, 3, 3).unwrap();
            assert!(r.is_collision_free(), "{:?}", r.collisions);
            assert!(r.min_samples <= b.off_diagonal.samples());
        }
    }
}
