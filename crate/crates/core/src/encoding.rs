//! Encoding matrices, generator modulation and pathway bookkeeping.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::generator::{Generator, SupportMask};
use crate::liouville::LiouvilleIndexMap;
use crate::{HeodError, Result, C64};

/// Enumeration guard; walks grow roughly as `degree^order`.
pub const MAX_PATHWAY_ORDER: usize = 8;

/// Symmetric non-negative integer code per generator entry, together with the
/// sweep length `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMatrix {
    dim: usize,
    codes: Vec<u32>,
    samples: usize,
}

impl EncodingMatrix {
    pub fn new(dim: usize, codes: Vec<u32>, samples: usize) -> Result<Self> {
        if codes.len() != dim * dim {
            return Err(HeodError::Domain(format!(
                "encoding matrix needs {} codes, got {}",
                dim * dim,
                codes.len()
            )));
        }
        if samples == 0 || !samples.is_power_of_two() {
            return Err(HeodError::Domain(format!(
                "sample count must be a positive power of two, got {samples}"
            )));
        }
        for r in 0..dim {
            for c in 0..r {
                if codes[r * dim + c] != codes[c * dim + r] {
                    return Err(HeodError::Domain(format!(
                        "encoding matrix must be symmetric; ({}, {}) differs",
                        r + 1,
                        c + 1
                    )));
                }
            }
        }
        Ok(Self { dim, codes, samples })
    }

    pub fn from_rows(rows: &[Vec<u32>], samples: usize) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(HeodError::Domain(format!(
                "encoding matrix row {} has {} entries, expected {dim}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::new(dim, rows.concat(), samples)
    }

    /// All-zero codes; modulation is the identity for every `s`.
    pub fn zeros(dim: usize, samples: usize) -> Result<Self> {
        Self::new(dim, vec![0; dim * dim], samples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn code(&self, row: usize, col: usize) -> u32 {
        self.codes[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.codes.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn with_samples(&self, samples: usize) -> Result<Self> {
        Self::new(self.dim, self.codes.clone(), samples)
    }

    pub fn with_code(&self, row: usize, col: usize, code: u32) -> Result<Self> {
        let mut codes = self.codes.clone();
        codes[row * self.dim + col] = code;
        codes[col * self.dim + row] = code;
        Self::new(self.dim, codes, self.samples)
    }

    pub fn has_diagonal_codes(&self) -> bool {
        (0..self.dim).any(|i| self.code(i, i) != 0)
    }

    /// `exp(2πi·γ·s/N)`, with `γ·s` reduced mod `N` before scaling.
    pub fn phase(&self, code: u32, s: usize) -> C64 {
        let n = self.samples as u128;
        let k = (code as u128 * s as u128) % n;
        C64::from_polar(1.0, TAU * k as f64 / n as f64)
    }
}

/// Encoding conventions accepted by the run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Only off-diagonal entries carry codes.
    OffDiagonal,
    /// Off-diagonal entries plus the pure-dissipation population diagonals.
    DiagonalInclusive,
    Custom,
}

impl Scheme {
    pub fn check(&self, gamma: &EncodingMatrix, map: &LiouvilleIndexMap) -> Result<()> {
        match self {
            Scheme::OffDiagonal if gamma.has_diagonal_codes() => Err(HeodError::Domain(
                "off-diagonal scheme requires a zero diagonal in the encoding matrix".into(),
            )),
            Scheme::DiagonalInclusive => {
                for a in 0..gamma.dim() {
                    if gamma.code(a, a) != 0 && !map.is_population(a) {
                        return Err(HeodError::Domain(format!(
                            "diagonal-inclusive scheme may only encode population diagonals; |{}⟩⟩ is a coherence",
                            map.label(a)
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::OffDiagonal => "off-diagonal",
            Scheme::DiagonalInclusive => "diagonal-inclusive",
            Scheme::Custom => "custom",
        })
    }
}

impl FromStr for Scheme {
    type Err = HeodError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off-diagonal" => Ok(Scheme::OffDiagonal),
            "diagonal-inclusive" => Ok(Scheme::DiagonalInclusive),
            "custom" => Ok(Scheme::Custom),
            other => Err(HeodError::Domain(format!("unknown encoding scheme {other:?}"))),
        }
    }
}

/// Phase factor for every support entry of `support` at sweep index `s`.
pub fn modulation_phases(
    support: &[(usize, usize)],
    gamma: &EncodingMatrix,
    s: usize,
) -> Vec<C64> {
    support.iter().map(|&(r, c)| gamma.phase(gamma.code(r, c), s)).collect()
}

/// A generator with every entry multiplied by `exp(2πi γ_ij s / N)`.
pub struct Modulated<G> {
    inner: G,
    phases: Vec<C64>,
}

impl<G: Generator> Generator for Modulated<G> {
    fn liouville_dim(&self) -> usize {
        self.inner.liouville_dim()
    }
    fn support(&self) -> &[(usize, usize)] {
        self.inner.support()
    }
    fn values(&self, t: f64, out: &mut [C64]) {
        self.inner.values(t, out);
        for (o, p) in out.iter_mut().zip(&self.phases) {
            *o *= p;
        }
    }
    fn entry_index(&self, row: usize, col: usize) -> Option<usize> {
        self.inner.entry_index(row, col)
    }
}

pub fn modulate<G: Generator>(inner: G, gamma: &EncodingMatrix, s: usize) -> Result<Modulated<G>> {
    if s >= gamma.samples() {
        return Err(HeodError::Domain(format!(
            "sweep index {s} out of range 0..{}",
            gamma.samples()
        )));
    }
    if gamma.dim() != inner.liouville_dim() {
        return Err(HeodError::Domain(format!(
            "encoding matrix is {0}x{0} but the generator is {1}x{1}",
            gamma.dim(),
            inner.liouville_dim()
        )));
    }
    let phases = modulation_phases(inner.support(), gamma, s);
    Ok(Modulated { inner, phases })
}

/// Walk through Liouville basis states, source first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pathway(pub Vec<usize>);

impl Pathway {
    pub fn new(states: Vec<usize>) -> Result<Self> {
        if states.len() < 2 {
            return Err(HeodError::InvalidPathway("a pathway needs at least one step".into()));
        }
        Ok(Self(states))
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn source(&self) -> usize {
        self.0[0]
    }

    pub fn target(&self) -> usize {
        *self.0.last().unwrap()
    }

    /// `(from, to)` pairs in time order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn has_self_step(&self) -> bool {
        self.edges().any(|(a, b)| a == b)
    }

    /// Joins two walks where the first ends at the second's start.
    pub fn concat(&self, next: &Pathway) -> Result<Pathway> {
        if self.target() != next.source() {
            return Err(HeodError::InvalidPathway("pathways do not meet".into()));
        }
        let mut states = self.0.clone();
        states.extend_from_slice(&next.0[1..]);
        Ok(Pathway(states))
    }

    /// `"11>12>13"` style label.
    pub fn label(&self, map: &LiouvilleIndexMap) -> String {
        self.0.iter().map(|&s| map.label(s)).collect::<Vec<_>>().join(">")
    }

    pub fn parse(label: &str, map: &LiouvilleIndexMap) -> Result<Self> {
        let states = label
            .split('>')
            .map(|s| map.parse_label(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn check_support(&self, support: &SupportMask) -> Result<()> {
        for (a, b) in self.edges() {
            if a >= support.dim() || b >= support.dim() || !support.edge(a, b) {
                return Err(HeodError::InvalidPathway(format!(
                    "step {a} -> {b} is not in the generator support"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathwayFrequency {
    /// Sum of edge codes.
    pub raw: u64,
    /// `raw mod N`.
    pub bin: usize,
}

pub(crate) fn raw_frequency(p: &Pathway, gamma: &EncodingMatrix) -> u64 {
    p.edges().map(|(a, b)| gamma.code(b, a) as u64).sum()
}

pub fn pathway_frequency(
    p: &Pathway,
    gamma: &EncodingMatrix,
    support: &SupportMask,
) -> Result<PathwayFrequency> {
    p.check_support(support)?;
    let raw = raw_frequency(p, gamma);
    Ok(PathwayFrequency { raw, bin: (raw % gamma.samples() as u64) as usize })
}

/// All walks `source → target` with 1..=`max_order` steps over `support`,
/// ordered by length and then lexicographically.
pub fn enumerate_pathways(
    support: &SupportMask,
    source: usize,
    target: usize,
    max_order: usize,
    allow_self: bool,
) -> Result<Vec<Pathway>> {
    if max_order > MAX_PATHWAY_ORDER {
        return Err(HeodError::Limit { requested: max_order, limit: MAX_PATHWAY_ORDER });
    }
    let dim = support.dim();
    if source >= dim || target >= dim {
        return Err(HeodError::InvalidPathway(format!(
            "endpoints {source} -> {target} outside dimension {dim}"
        )));
    }
    let neighbours: Vec<Vec<usize>> = (0..dim)
        .map(|a| {
            (0..dim)
                .filter(|&b| support.edge(a, b) && (allow_self || a != b))
                .collect()
        })
        .collect();
    let reach = steps_to_target(&neighbours, target);

    let mut out = Vec::new();
    for order in 1..=max_order {
        let mut walk = vec![source];
        collect_walks(&neighbours, &reach, target, order, &mut walk, &mut out);
    }
    Ok(out)
}

/// Minimum number of steps from each state to `target` (usize::MAX if
/// unreachable); zero steps only for the target itself.
pub(crate) fn steps_to_target(neighbours: &[Vec<usize>], target: usize) -> Vec<usize> {
    let dim = neighbours.len();
    let mut dist = vec![usize::MAX; dim];
    dist[target] = 0;
    let mut frontier = vec![target];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for a in 0..dim {
            if dist[a] == usize::MAX && neighbours[a].iter().any(|b| frontier.contains(b)) {
                dist[a] = depth;
                next.push(a);
            }
        }
        frontier = next;
    }
    dist
}

fn collect_walks(
    neighbours: &[Vec<usize>],
    reach: &[usize],
    target: usize,
    remaining: usize,
    walk: &mut Vec<usize>,
    out: &mut Vec<Pathway>,
) {
    let here = *walk.last().unwrap();
    if remaining == 0 {
        if here == target {
            out.push(Pathway(walk.clone()));
        }
        return;
    }
    for &b in &neighbours[here] {
        if reach[b] > remaining - 1 {
            continue;
        }
        walk.push(b);
        collect_walks(neighbours, reach, target, remaining - 1, walk, out);
        walk.pop();
    }
}

/// Off-diagonal support entries plus the diagonal entries that carry a
/// nonzero code. Unencoded diagonals are absorbed into every bin and never
/// count as pathway steps.
pub fn encoded_support(support: &SupportMask, gamma: &EncodingMatrix) -> SupportMask {
    let mut out = support.clone();
    for a in 0..support.dim() {
        if gamma.code(a, a) == 0 {
            out.set(a, a, false);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub bin: usize,
    pub pathways: Vec<Pathway>,
    pub raw: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    pub max_composite: u64,
    /// Smallest power of two strictly greater than `2·max_composite`.
    pub min_samples: usize,
    pub pathways: usize,
    pub collisions: Vec<Collision>,
}

impl EncodingReport {
    pub fn is_collision_free(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Checks that all walks `source → target` up to `max_order` land in distinct
/// bins. Self-steps are considered only on diagonals that carry a code.
pub fn validate_encoding(
    gamma: &EncodingMatrix,
    support: &SupportMask,
    source: usize,
    target: usize,
    max_order: usize,
) -> Result<EncodingReport> {
    let mask = encoded_support(support, gamma);
    let pathways = enumerate_pathways(&mask, source, target, max_order, true)?;
    let n = gamma.samples() as u64;
    let mut max_composite = 0;
    let mut bins: BTreeMap<usize, Vec<(Pathway, u64)>> = BTreeMap::new();
    for p in &pathways {
        let raw = raw_frequency(p, gamma);
        max_composite = max_composite.max(raw);
        bins.entry((raw % n) as usize).or_default().push((p.clone(), raw));
    }
    let collisions = bins
        .into_iter()
        .filter(|(_, v)| v.len() > 1)
        .map(|(bin, v)| {
            let (pathways, raw) = v.into_iter().unzip();
            Collision { bin, pathways, raw }
        })
        .collect();
    let min_samples = ((2 * max_composite + 1) as usize).next_power_of_two();
    Ok(EncodingReport { max_composite, min_samples, pathways: pathways.len(), collisions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{ConstantGenerator, LindbladGenerator};
    use crate::liouville::index_map;
    use crate::models::benchmark_three_level;
    use crate::Superoperator;
    use proptest::prelude::*;

    fn benchmark_mask() -> (SupportMask, EncodingMatrix, LiouvilleIndexMap) {
        let b = benchmark_three_level();
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        (SupportMask::of(&g), b.off_diagonal, index_map(3).unwrap())
    }

    fn path(labels: &str) -> Pathway {
        Pathway::parse(labels, &index_map(3).unwrap()).unwrap()
    }

    #[test]
    fn modulation_factors() {
        let mut h = Superoperator::zeros(4, 4);
        h[(1, 0)] = C64::new(2.0, 0.5);
        h[(0, 1)] = C64::new(-1.0, 0.0);
        h[(2, 2)] = C64::new(0.3, 0.0);
        let g = ConstantGenerator::new(&h);
        let mut codes = vec![0; 16];
        codes[1] = 17;
        codes[4] = 17;
        let gamma = EncodingMatrix::new(4, codes, 1024).unwrap();

        let m0 = modulate(&g, &gamma, 0).unwrap();
        assert_eq!(m0.matrix(0.0), h);

        let m1 = modulate(&g, &gamma, 1).unwrap().matrix(0.0);
        let factor = C64::from_polar(1.0, TAU * 17.0 / 1024.0);
        assert!((m1[(1, 0)] - h[(1, 0)] * factor).norm() < 1e-15);
        assert_eq!(m1[(2, 2)], h[(2, 2)]);

        assert!(modulate(&g, &gamma, 1024).is_err());
    }

    #[test]
    fn encoding_matrix_validation() {
        assert!(EncodingMatrix::new(2, vec![0, 1, 2, 0], 8).is_err());
        assert!(EncodingMatrix::new(2, vec![0, 1, 1, 0], 12).is_err());
        assert!(EncodingMatrix::new(2, vec![0, 1, 1], 8).is_err());
        assert!(EncodingMatrix::from_rows(&[vec![0, 1], vec![1]], 8).is_err());
    }

    #[test]
    fn table_frequencies() {
        let (mask, gamma, _) = benchmark_mask();
        let f = |l: &str| pathway_frequency(&path(l), &gamma, &mask).unwrap().raw;
        assert_eq!(f("11>12>13>23>33"), 172);
        assert_eq!(f("11>22>33"), 118);
        assert_eq!(f("11>12"), 1);
        assert!(pathway_frequency(&path("11>33"), &gamma, &mask).is_err());
    }

    #[test]
    fn scheme_checks() {
        let b = benchmark_three_level();
        let map = index_map(3).unwrap();
        assert!(Scheme::OffDiagonal.check(&b.off_diagonal, &map).is_ok());
        assert!(Scheme::OffDiagonal.check(&b.diagonal_inclusive, &map).is_err());
        assert!(Scheme::DiagonalInclusive.check(&b.diagonal_inclusive, &map).is_ok());
        let bad = b.off_diagonal.with_code(1, 1, 5).unwrap();
        assert!(Scheme::DiagonalInclusive.check(&bad, &map).is_err());
        assert_eq!("diagonal-inclusive".parse::<Scheme>().unwrap(), Scheme::DiagonalInclusive);
    }

    #[test]
    fn enumeration_on_benchmark_support() {
        let (mask, _, map) = benchmark_mask();
        let (s, t) = (map.flat(0, 0), map.flat(2, 2));
        assert!(enumerate_pathways(&mask, s, t, 1, false).unwrap().is_empty());
        let two = enumerate_pathways(&mask, s, t, 2, false).unwrap();
        assert_eq!(two, vec![path("11>22>33")]);

        let four = enumerate_pathways(&mask, s, t, 4, false).unwrap();
        for l in [
            "11>12>13>23>33",
            "11>21>31>32>33",
            "11>12>22>32>33",
            "11>21>22>23>33",
            "11>12>22>23>33",
            "11>21>22>32>33",
        ] {
            assert!(four.contains(&path(l)), "{l} missing");
        }
        assert!(four.iter().all(|p| !p.has_self_step()));
        assert!(enumerate_pathways(&mask, s, t, 9, false).is_err());
    }

    /// Brute force over every index sequence of each length.
    fn brute_force_walks(
        mask: &SupportMask,
        s: usize,
        t: usize,
        max_order: usize,
        allow_self: bool,
    ) -> Vec<Pathway> {
        let dim = mask.dim();
        let mut out = Vec::new();
        for order in 1..=max_order {
            let total = dim.pow(order as u32 - 1);
            for code in 0..total {
                let mut states = vec![s];
                let mut c = code;
                for _ in 0..order - 1 {
                    states.push(c % dim);
                    c /= dim;
                }
                states.push(t);
                let p = Pathway(states);
                if p.edges().all(|(a, b)| mask.edge(a, b) && (allow_self || a != b)) {
                    out.push(p);
                }
            }
        }
        out.sort_by(|a, b| a.order().cmp(&b.order()).then(a.cmp(b)));
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let (mask, _, _) = benchmark_mask();
        for allow_self in [false, true] {
            let fast = enumerate_pathways(&mask, 0, 8, 4, allow_self).unwrap();
            let slow = brute_force_walks(&mask, 0, 8, 4, allow_self);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn validation_reports() {
        let (mask, gamma, map) = benchmark_mask();
        let (s, t) = (map.flat(0, 0), map.flat(2, 2));
        let r = validate_encoding(&gamma, &mask, s, t, 2).unwrap();
        assert_eq!(r.max_composite, 118);
        assert_eq!(r.min_samples, 256);

        let r = validate_encoding(&gamma, &mask, s, t, 4).unwrap();
        let freqs: Vec<u64> = [
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
        ]
        .iter()
        .map(|l| raw_frequency(&path(l), &gamma))
        .collect();
        assert_eq!(freqs, vec![172, 311, 244, 250, 220, 274, 135, 165, 203, 227, 118]);
        let mut sorted = freqs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 11);
        for c in &r.collisions {
            assert!(!freqs.contains(&(c.bin as u64)), "table bin {} collides", c.bin);
        }

        // every nonzero code equal to one: all order-n walks share frequency n
        let ones: Vec<u32> = (0..81)
            .map(|i| if mask.get(i / 9, i % 9) && i / 9 != i % 9 { 1 } else { 0 })
            .collect();
        let ones = EncodingMatrix::new(9, ones, 64).unwrap();
        let r = validate_encoding(&ones, &mask, s, t, 4).unwrap();
        for c in &r.collisions {
            assert!(c.pathways.iter().all(|p| p.order() as u64 == c.raw[0]));
        }
        let all = enumerate_pathways(&mask, s, t, 4, false).unwrap();
        let collided: usize = r.collisions.iter().map(|c| c.pathways.len()).sum();
        let singletons = (1..=4)
            .filter(|&n| all.iter().filter(|p| p.order() == n).count() == 1)
            .count();
        assert_eq!(collided + singletons, all.len());

        let empty = validate_encoding(&gamma, &SupportMask::empty(9), s, t, 4).unwrap();
        assert_eq!(empty.pathways, 0);
        assert!(empty.is_collision_free());
    }

    #[test]
    fn diagonal_codes_enable_self_steps() {
        let b = benchmark_three_level();
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let mask = encoded_support(&SupportMask::of(&g), &b.diagonal_inclusive);
        assert!(mask.get(0, 0) && mask.get(4, 4) && mask.get(8, 8));
        assert!(!mask.get(1, 1));
        let walks = enumerate_pathways(&mask, 0, 8, 3, true).unwrap();
        let p = path("11>11>22>33");
        assert!(walks.contains(&p));
        assert_eq!(raw_frequency(&p, &b.diagonal_inclusive), 221 + 17 + 101);
        assert!(!walks.contains(&path("11>12>12>22")));
    }

    proptest! {
        #[test]
        fn modulation_is_unimodular_and_additive(
            a in 0u32..400, b in 0u32..400, s in 0usize..1024
        ) {
            let g1 = EncodingMatrix::new(2, vec![0, a, a, 0], 1024).unwrap();
            let g2 = EncodingMatrix::new(2, vec![0, b, b, 0], 1024).unwrap();
            let g12 = EncodingMatrix::new(2, vec![0, a + b, a + b, 0], 1024).unwrap();
            let p1 = g1.phase(a, s);
            prop_assert!((p1.norm() - 1.0).abs() < 1e-14);
            let twice = p1 * g2.phase(b, s);
            prop_assert!((twice - g12.phase(a + b, s)).norm() < 1e-12);
        }

        #[test]
        fn frequency_is_additive_under_concatenation(
            steps in proptest::collection::vec(0usize..9, 2..6),
            more in proptest::collection::vec(0usize..9, 1..4),
        ) {
            let gamma = benchmark_three_level().off_diagonal;
            let first = Pathway(steps.clone());
            let mut second_states = vec![*steps.last().unwrap()];
            second_states.extend(more);
            let second = Pathway(second_states);
            let joined = first.concat(&second).unwrap();
            prop_assert_eq!(
                raw_frequency(&joined, &gamma),
                raw_frequency(&first, &gamma) + raw_frequency(&second, &gamma)
            );
        }

        #[test]
        fn modulation_preserves_support(s in 0usize..1024) {
            let b = benchmark_three_level();
            let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
            let m = modulate(&g, &b.off_diagonal, s).unwrap().matrix(1000.0);
            let plain = g.matrix(1000.0);
            for r in 0..9 {
                for c in 0..9 {
                    if plain[(r, c)] == C64::new(0.0, 0.0) {
                        prop_assert_eq!(m[(r, c)], C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }
}
