//! Fixed-step classical RK4 for `i dy/dt = 𝓗(t) y` on the generator support.

use crate::generator::Generator;
use crate::{HeodError, Result, StateVector, Superoperator, C64};

/// Uniform grid on `[0, t_end]` with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(HeodError::Domain("time grid needs at least one step".into()));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(HeodError::Domain(format!("time grid end must be positive, got {t_end}")));
        }
        Ok(Self { t_end, steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.half_time(2 * k)
    }

    /// Time of half-step index `j`; even `j` are grid points, odd `j` midpoints.
    pub fn half_time(&self, j: usize) -> f64 {
        self.t_end * j as f64 / (2 * self.steps) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub samples: Vec<T>,
}

impl<T> Trajectory<T> {
    pub fn last(&self) -> &T {
        self.samples.last().expect("trajectory always holds the initial sample")
    }
}

struct Rk4 {
    rows: Vec<usize>,
    cols: Vec<usize>,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
    v0: Vec<C64>,
    vm: Vec<C64>,
    v1: Vec<C64>,
}

impl Rk4 {
    fn new(support: &[(usize, usize)], dim: usize) -> Self {
        let nnz = support.len();
        Self {
            rows: support.iter().map(|e| e.0).collect(),
            cols: support.iter().map(|e| e.1).collect(),
            k1: vec![C64::default(); dim],
            k2: vec![C64::default(); dim],
            k3: vec![C64::default(); dim],
            k4: vec![C64::default(); dim],
            tmp: vec![C64::default(); dim],
            v0: vec![C64::default(); nnz],
            vm: vec![C64::default(); nnz],
            v1: vec![C64::default(); nnz],
        }
    }

    /// `out = −i·H y`.
    #[inline]
    fn apply(rows: &[usize], cols: &[usize], vals: &[C64], y: &[C64], out: &mut [C64]) {
        out.fill(C64::default());
        for ((&r, &c), &v) in rows.iter().zip(cols).zip(vals) {
            out[r] += v * y[c];
        }
        for o in out.iter_mut() {
            *o = C64::new(o.im, -o.re);
        }
    }

    /// Integrates over `grid`, pulling generator values for half-step index
    /// `j` from `values_at`, calling `observe(k, y)` after every step `k ≥ 1`.
    fn run(
        &mut self,
        grid: &TimeGrid,
        y: &mut [C64],
        mut values_at: impl FnMut(usize, &mut [C64]),
        mut observe: impl FnMut(usize, &[C64]),
    ) -> Result<()> {
        let h = grid.dt();
        let half = 0.5 * h;
        let sixth = h / 6.0;
        values_at(0, &mut self.v0);
        for k in 0..grid.steps() {
            values_at(2 * k + 1, &mut self.vm);
            values_at(2 * k + 2, &mut self.v1);
            let (rows, cols) = (&self.rows, &self.cols);

            Self::apply(rows, cols, &self.v0, y, &mut self.k1);
            for ((t, &yi), &ki) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
                *t = yi + ki * half;
            }
            Self::apply(rows, cols, &self.vm, &self.tmp, &mut self.k2);
            for ((t, &yi), &ki) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
                *t = yi + ki * half;
            }
            Self::apply(rows, cols, &self.vm, &self.tmp, &mut self.k3);
            for ((t, &yi), &ki) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
                *t = yi + ki * h;
            }
            Self::apply(rows, cols, &self.v1, &self.tmp, &mut self.k4);

            let mut finite = true;
            for i in 0..y.len() {
                y[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
                finite &= y[i].re.is_finite() && y[i].im.is_finite();
            }
            if !finite {
                return Err(HeodError::NumericOverflow { step: k + 1 });
            }
            std::mem::swap(&mut self.v0, &mut self.v1);
            observe(k + 1, y);
        }
        Ok(())
    }
}

fn check_dims<G: Generator + ?Sized>(gen: &G, len: usize) -> Result<()> {
    if len != gen.liouville_dim() {
        return Err(HeodError::Domain(format!(
            "state length {len} does not match generator dimension {}",
            gen.liouville_dim()
        )));
    }
    Ok(())
}

/// Propagates `rho0`, recording every `stride`-th grid point plus the final
/// time. `stride = 0` records only the endpoints.
pub fn propagate_state<G: Generator + ?Sized>(
    generator: &G,
    rho0: &StateVector,
    grid: &TimeGrid,
    stride: usize,
) -> Result<Trajectory<StateVector>> {
    check_dims(generator, rho0.len())?;
    let mut y: Vec<C64> = rho0.iter().copied().collect();
    let mut traj = Trajectory { times: vec![0.0], samples: vec![rho0.clone()] };
    let mut rk = Rk4::new(generator.support(), generator.liouville_dim());
    let steps = grid.steps();
    rk.run(
        grid,
        &mut y,
        |j, out| generator.values(grid.half_time(j), out),
        |k, y| {
            if k == steps || (stride > 0 && k % stride == 0) {
                traj.times.push(grid.time(k));
                traj.samples.push(StateVector::from_column_slice(y));
            }
        },
    )?;
    Ok(traj)
}

/// Final state only.
pub fn propagate_final<G: Generator + ?Sized>(
    generator: &G,
    rho0: &StateVector,
    grid: &TimeGrid,
) -> Result<StateVector> {
    Ok(propagate_state(generator, rho0, grid, 0)?.last().clone())
}

/// `U(t)` with `U(0) = I`, built column by column from basis-state
/// propagations.
pub fn propagate_evolution<G: Generator + ?Sized>(
    generator: &G,
    grid: &TimeGrid,
    stride: usize,
) -> Result<Trajectory<Superoperator>> {
    let dim = generator.liouville_dim();
    let mut columns = Vec::with_capacity(dim);
    for b in 0..dim {
        let mut e = StateVector::zeros(dim);
        e[b] = C64::new(1.0, 0.0);
        columns.push(propagate_state(generator, &e, grid, stride)?);
    }
    let times = columns[0].times.clone();
    let samples = (0..times.len())
        .map(|i| Superoperator::from_fn(dim, dim, |r, c| columns[c].samples[i][r]))
        .collect();
    Ok(Trajectory { times, samples })
}

/// Generator values tabulated at every half-step of a grid, so that many
/// propagations with entry-wise phase modulation share one evaluation pass.
pub struct GeneratorSamples {
    dim: usize,
    support: Vec<(usize, usize)>,
    grid: TimeGrid,
    values: Vec<C64>,
}

impl GeneratorSamples {
    pub fn new<G: Generator + ?Sized>(generator: &G, grid: &TimeGrid) -> Self {
        let support = generator.support().to_vec();
        let nnz = support.len();
        let points = 2 * grid.steps() + 1;
        let mut values = vec![C64::default(); points * nnz];
        for (j, chunk) in values.chunks_mut(nnz.max(1)).enumerate().take(points) {
            if nnz > 0 {
                generator.values(grid.half_time(j), chunk);
            }
        }
        Self { dim: generator.liouville_dim(), support, grid: *grid, values }
    }

    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Final state under the tabulated generator with entry `e` multiplied by
    /// `phases[e]`.
    pub fn propagate_modulated(&self, phases: &[C64], rho0: &StateVector) -> Result<StateVector> {
        assert_eq!(phases.len(), self.support.len());
        if rho0.len() != self.dim {
            return Err(HeodError::Domain(format!(
                "state length {} does not match generator dimension {}",
                rho0.len(),
                self.dim
            )));
        }
        let nnz = self.support.len();
        let mut y: Vec<C64> = rho0.iter().copied().collect();
        let mut rk = Rk4::new(&self.support, self.dim);
        rk.run(
            &self.grid,
            &mut y,
            |j, out| {
                let row = &self.values[j * nnz..(j + 1) * nnz];
                for ((o, &v), &p) in out.iter_mut().zip(row).zip(phases) {
                    *o = v * p;
                }
            },
            |_, _| {},
        )?;
        Ok(StateVector::from_vec(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{ConstantGenerator, EntryGenerator, LindbladGenerator};
    use crate::liouville::{basis_state, hermiticity_residual, index_map, trace};
    use crate::models::benchmark_three_level;
    use crate::transforms::analytic_field_free;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, 10).is_err());
        let g = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.time(4), 2.0);
        assert_eq!(g.half_time(3), 0.75);
    }

    #[test]
    fn zero_generator_keeps_state() {
        let g = ConstantGenerator::new(&Superoperator::zeros(4, 4));
        let rho = StateVector::from_vec(vec![
            C64::new(0.3, 0.0),
            C64::new(0.1, 0.2),
            C64::new(0.1, -0.2),
            C64::new(0.7, 0.0),
        ]);
        let grid = TimeGrid::new(10.0, 50).unwrap();
        let traj = propagate_state(&g, &rho, &grid, 10).unwrap();
        assert_eq!(traj.times.len(), 6);
        assert_eq!(traj.samples[0], rho);
        assert!(traj.samples.iter().all(|s| *s == rho));
        let u = propagate_evolution(&g, &grid, 0).unwrap();
        assert_eq!(*u.last(), Superoperator::identity(4, 4));
    }

    #[test]
    fn diagonal_generator_gives_exact_phases() {
        let omegas = [0.7, -1.3];
        let mut h = Superoperator::zeros(2, 2);
        h[(0, 0)] = C64::from(-omegas[0]);
        h[(1, 1)] = C64::from(-omegas[1]);
        let g = ConstantGenerator::new(&h);
        let period = std::f64::consts::TAU / 1.3;
        let rho = StateVector::from_vec(vec![C64::from(1.0), C64::from(1.0)]);

        // one step of period/400 is exact to 1e-10
        let one = TimeGrid::new(period / 400.0, 1).unwrap();
        let s = propagate_final(&g, &rho, &one).unwrap();
        for (k, w) in omegas.iter().enumerate() {
            assert!((s[k] - C64::from_polar(1.0, w * one.t_end())).norm() <= 1e-10);
        }

        // over several periods the error grows at most linearly from the
        // local truncation term (ωdt)^5/120
        let steps = 3 * 400;
        let grid = TimeGrid::new(3.0 * period, steps).unwrap();
        let traj = propagate_state(&g, &rho, &grid, 100).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.samples) {
            let n = (t / grid.dt()).round();
            for (k, w) in omegas.iter().enumerate() {
                let local = (w * grid.dt()).abs().powi(5) / 120.0;
                let exact = C64::from_polar(1.0, w * t);
                assert!((s[k] - exact).norm() <= 1.01 * n * local + 1e-14, "t={t}");
            }
        }
    }

    #[test]
    fn evolution_columns_match_state_propagation() {
        let b = benchmark_three_level();
        let g = LindbladGenerator::interaction(&b.system, &b.field).unwrap();
        let grid = TimeGrid::new(b.field.total_time, 2048).unwrap();
        let u = propagate_evolution(&g, &grid, 0).unwrap();
        for col in [0, 1, 4] {
            let s = propagate_final(&g, &basis_state(3, col), &grid).unwrap();
            assert!((u.last().column(col) - s).norm() <= 1e-12);
        }
    }

    #[test]
    fn field_free_populations_match_closed_form() {
        let b = benchmark_three_level();
        let g = LindbladGenerator::lab(&b.system, &b.field.zeroed()).unwrap();
        let grid = TimeGrid::new(b.field.total_time, b.steps).unwrap();
        let traj = propagate_state(&g, &basis_state(3, 0), &grid, 256).unwrap();
        let map = index_map(3).unwrap();
        let (g12, g23) = (b.system.eta * 0.089, b.system.eta * 0.194);
        for (t, s) in traj.times.iter().zip(&traj.samples) {
            let exact = analytic_field_free(g12, g23, *t).unwrap();
            for m in 0..3 {
                assert!((s[map.population(m)].re - exact[m]).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn trace_and_hermiticity_preserved_with_field() {
        let b = benchmark_three_level();
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let grid = TimeGrid::new(b.field.total_time, b.steps).unwrap();
        let map = index_map(3).unwrap();
        let mut rho = StateVector::zeros(9);
        rho[0] = C64::from(0.6);
        rho[4] = C64::from(0.3);
        rho[8] = C64::from(0.1);
        rho[1] = C64::new(0.05, 0.1);
        rho[3] = C64::new(0.05, -0.1);
        let traj = propagate_state(&g, &rho, &grid, 512).unwrap();
        for s in &traj.samples {
            assert!((trace(&map, s) - 1.0).norm() <= 1e-9);
            assert!(hermiticity_residual(&map, s) <= 1e-9);
        }
    }

    #[test]
    fn overflow_is_reported_with_step() {
        let g = EntryGenerator::new(1).with_constant(0, 0, C64::new(0.0, 1e30));
        let grid = TimeGrid::new(10.0, 10).unwrap();
        let err = propagate_final(&g, &basis_state(1, 0), &grid).unwrap_err();
        assert!(matches!(err, HeodError::NumericOverflow { step } if step > 1));
    }

    #[test]
    fn sampled_propagation_matches_direct() {
        let b = benchmark_three_level();
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let grid = TimeGrid::new(b.field.total_time, 4096).unwrap();
        let samples = GeneratorSamples::new(&g, &grid);
        let ones = vec![C64::from(1.0); g.support().len()];
        let a = samples.propagate_modulated(&ones, &basis_state(3, 0)).unwrap();
        let direct = propagate_final(&g, &basis_state(3, 0), &grid).unwrap();
        assert_eq!(a, direct);
    }

    #[test]
    fn deterministic() {
        let b = benchmark_three_level();
        let g = LindbladGenerator::lab(&b.system, &b.field).unwrap();
        let grid = TimeGrid::new(b.field.total_time, 1000).unwrap();
        let a = propagate_final(&g, &basis_state(3, 0), &grid).unwrap();
        let c = propagate_final(&g, &basis_state(3, 0), &grid).unwrap();
        assert_eq!(a, c);
    }
}
