//! Dyson-series pathway amplitudes by nested trapezoidal quadrature.
//!
//! For a walk `a₀ → a₁ → … → aₙ` the amplitude is
//! `(−i)ⁿ ∫…∫ 𝓗_{aₙaₙ₋₁}(tₙ) ⋯ 𝓗_{a₁a₀}(t₁)` over `0 ≤ t₁ ≤ … ≤ tₙ ≤ T`,
//! evaluated as `n` cumulative trapezoid passes on a uniform grid.

use crate::encoding::{steps_to_target, Pathway, MAX_PATHWAY_ORDER};
use crate::generator::Generator;
use crate::propagation::TimeGrid;
use crate::{HeodError, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    t_end: f64,
    intervals: usize,
}

impl QuadratureGrid {
    pub fn new(t_end: f64, intervals: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) || intervals == 0 {
            return Err(HeodError::Domain(format!(
                "quadrature grid needs T > 0 and at least one interval (T={t_end}, n={intervals})"
            )));
        }
        Ok(Self { t_end, intervals })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.intervals as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_end * k as f64 / self.intervals as f64
    }

    pub fn refined(&self) -> Self {
        Self { t_end: self.t_end, intervals: 2 * self.intervals }
    }
}

impl From<TimeGrid> for QuadratureGrid {
    fn from(g: TimeGrid) -> Self {
        Self { t_end: g.t_end(), intervals: g.steps() }
    }
}

/// Generator entries tabulated on a quadrature grid.
pub struct DysonOracle {
    dim: usize,
    grid: QuadratureGrid,
    /// `lookup[row·D + col]` is the position in `support`.
    lookup: Vec<Option<usize>>,
    nnz: usize,
    samples: Vec<C64>,
}

impl DysonOracle {
    pub fn new<G: Generator + ?Sized>(generator: &G, grid: QuadratureGrid) -> Self {
        let dim = generator.liouville_dim();
        let support = generator.support();
        let nnz = support.len();
        let mut lookup = vec![None; dim * dim];
        for (i, &(r, c)) in support.iter().enumerate() {
            lookup[r * dim + c] = Some(i);
        }
        let points = grid.intervals + 1;
        let mut samples = vec![C64::default(); points * nnz];
        if nnz > 0 {
            for (k, chunk) in samples.chunks_mut(nnz).enumerate() {
                generator.values(grid.time(k), chunk);
            }
        }
        Self { dim, grid, lookup, nnz, samples }
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    fn entry(&self, from: usize, to: usize) -> Option<usize> {
        if from >= self.dim || to >= self.dim {
            return None;
        }
        self.lookup[to * self.dim + from]
    }

    fn integrate_step(&self, entry: usize, f: &[C64], out: &mut [C64]) {
        let half_dt = 0.5 * self.grid.dt();
        let h = |k: usize| self.samples[k * self.nnz + entry];
        let mut prev = h(0) * f[0];
        out[0] = C64::default();
        for k in 1..f.len() {
            let g = h(k) * f[k];
            out[k] = out[k - 1] + (prev + g) * half_dt;
            prev = g;
        }
    }

    pub fn pathway_amplitude(&self, p: &Pathway) -> Result<C64> {
        let points = self.grid.intervals + 1;
        let mut f = vec![C64::new(1.0, 0.0); points];
        let mut next = vec![C64::default(); points];
        for (a, b) in p.edges() {
            let e = self.entry(a, b).ok_or_else(|| {
                HeodError::InvalidPathway(format!("step {a} -> {b} is not in the generator support"))
            })?;
            self.integrate_step(e, &f, &mut next);
            std::mem::swap(&mut f, &mut next);
        }
        Ok(minus_i_pow(p.order()) * f[points - 1])
    }

    /// Sum over every walk `source → target` of 1..=`max_order` steps, plus
    /// the order-0 identity term when `source == target`. Walks sharing a
    /// prefix share its quadrature.
    pub fn truncated_sum(
        &self,
        source: usize,
        target: usize,
        max_order: usize,
        allow_self: bool,
    ) -> Result<C64> {
        if max_order > MAX_PATHWAY_ORDER {
            return Err(HeodError::Limit { requested: max_order, limit: MAX_PATHWAY_ORDER });
        }
        if source >= self.dim || target >= self.dim {
            return Err(HeodError::InvalidPathway(format!(
                "endpoints {source} -> {target} outside dimension {}",
                self.dim
            )));
        }
        let neighbours: Vec<Vec<usize>> = (0..self.dim)
            .map(|a| {
                (0..self.dim)
                    .filter(|&b| self.entry(a, b).is_some() && (allow_self || a != b))
                    .collect()
            })
            .collect();
        let reach = steps_to_target(&neighbours, target);
        let points = self.grid.intervals + 1;
        let mut levels = vec![vec![C64::default(); points]; max_order + 1];
        levels[0].iter_mut().for_each(|x| *x = C64::new(1.0, 0.0));
        let mut total = if source == target { C64::new(1.0, 0.0) } else { C64::default() };
        self.descend(source, 0, max_order, target, &neighbours, &reach, &mut levels, &mut total);
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        node: usize,
        depth: usize,
        max_order: usize,
        target: usize,
        neighbours: &[Vec<usize>],
        reach: &[usize],
        levels: &mut [Vec<C64>],
        total: &mut C64,
    ) {
        if depth == max_order {
            return;
        }
        for &b in &neighbours[node] {
            if reach[b] > max_order - depth - 1 {
                continue;
            }
            let e = self.entry(node, b).unwrap();
            let (lo, hi) = levels.split_at_mut(depth + 1);
            self.integrate_step(e, &lo[depth], &mut hi[0]);
            if b == target {
                *total += minus_i_pow(depth + 1) * hi[0][hi[0].len() - 1];
            }
            self.descend(b, depth + 1, max_order, target, neighbours, reach, levels, total);
        }
    }
}

fn minus_i_pow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Amplitude of one walk; tabulates the generator once on `grid`.
pub fn pathway_amplitude<G: Generator + ?Sized>(
    generator: &G,
    p: &Pathway,
    grid: QuadratureGrid,
) -> Result<C64> {
    DysonOracle::new(generator, grid).pathway_amplitude(p)
}

pub fn truncated_sum<G: Generator + ?Sized>(
    generator: &G,
    source: usize,
    target: usize,
    max_order: usize,
    grid: QuadratureGrid,
    allow_self: bool,
) -> Result<C64> {
    DysonOracle::new(generator, grid).truncated_sum(source, target, max_order, allow_self)
}
