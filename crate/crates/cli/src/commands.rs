use std::path::Path;

use heod::dyson::{DysonOracle, QuadratureGrid};
use heod::encoding::{
    encoded_support, enumerate_pathways, pathway_frequency, validate_encoding, EncodingReport,
    Pathway,
};
use heod::generator::{Generator, LindbladGenerator, SupportMask};
use heod::liouville::{basis_state, hermiticity_residual, trace};
use heod::propagation::propagate_state;
use heod::sweep::{assign_pathways, decode_spectrum, run_sweep, PathwayReport, Spectrum};
use heod::transforms::{transformed_generator, Picture, TransformedGenerator};
use serde_json::json;

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{num, Csv, OutDir};

enum PictureGenerator {
    Plain(LindbladGenerator),
    Transformed(TransformedGenerator<LindbladGenerator>),
}

impl PictureGenerator {
    fn build(r: &Resolved) -> Result<Self, CliError> {
        let p = r.picture;
        Ok(match p.picture {
            Picture::Original => Self::Plain(LindbladGenerator::lab(&r.system, &r.field)?),
            Picture::Interaction if p.rwa => {
                Self::Plain(LindbladGenerator::rwa(&r.system, &r.field, p.carry_phases)?)
            }
            Picture::Interaction => Self::Plain(LindbladGenerator::interaction(&r.system, &r.field)?),
            Picture::Transformed => Self::Transformed(transformed_generator(
                &r.system,
                &r.field,
                p.rwa,
                p.carry_phases,
                &r.grid,
            )?),
        })
    }

    fn generator(&self) -> &dyn Generator {
        match self {
            Self::Plain(g) => g,
            Self::Transformed(g) => g,
        }
    }
}

/// What the quadrature oracle integrates: the interaction frame for the
/// original picture (Bohr phases on the edges), the swept generator otherwise.
fn oracle_generator(r: &Resolved) -> Result<Option<LindbladGenerator>, CliError> {
    match r.picture.picture {
        Picture::Original => Ok(Some(LindbladGenerator::interaction(&r.system, &r.field)?)),
        _ => Ok(None),
    }
}

fn manifest_base(r: &Resolved, command: &str) -> serde_json::Value {
    json!({
        "tool": "heod",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "picture": r.picture.picture.to_string(),
        "rwa": r.picture.rwa,
        "carry_phases": r.picture.carry_phases,
        "scheme": r.scheme.to_string(),
        "samples": r.gamma.samples(),
        "steps": r.grid.steps(),
        "total_time": r.grid.t_end(),
        "max_order": r.max_order,
        "source": r.map.label(r.source),
        "target": r.map.label(r.target),
        "threshold_relative": r.threshold,
    })
}

pub struct SimulateSummary {
    pub rows: usize,
    pub max_trace_error: f64,
}

pub fn simulate(r: &Resolved, out: &Path) -> Result<SimulateSummary, CliError> {
    let g = PictureGenerator::build(r)?;
    let d = r.system.dim;
    let rho0 = basis_state(d, r.source);
    let (times, states) = match &g {
        PictureGenerator::Plain(g) => {
            let traj = propagate_state(g, &rho0, &r.grid, r.record_every)?;
            (traj.times, traj.samples)
        }
        PictureGenerator::Transformed(tg) => {
            let traj = propagate_state(tg, &tg.to_transformed(&rho0, 0.0), &r.grid, r.record_every)?;
            let back = traj
                .times
                .iter()
                .zip(&traj.samples)
                .map(|(t, s)| tg.from_transformed(s, *t))
                .collect();
            (traj.times, back)
        }
    };

    let mut header = vec!["t".to_string()];
    header.extend((0..d).map(|m| format!("rho_{}", r.map.label(r.map.population(m)))));
    header.extend(["trace".to_string(), "hermiticity_residual".to_string()]);
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    let mut max_trace_error: f64 = 0.0;
    for (t, s) in times.iter().zip(&states) {
        let tr = trace(&r.map, s);
        max_trace_error = max_trace_error.max((tr - 1.0).norm());
        let mut cells = vec![num(*t)];
        cells.extend((0..d).map(|m| num(s[r.map.population(m)].re)));
        cells.push(num(tr.re));
        cells.push(num(hermiticity_residual(&r.map, s)));
        csv.row(cells);
    }

    let mut dir = OutDir::create(out)?;
    dir.write("trajectory.csv", csv.as_str())?;
    let mut manifest = manifest_base(r, "simulate");
    manifest["record_every"] = json!(r.record_every);
    manifest["rows"] = json!(times.len());
    manifest["files"] = json!(["trajectory.csv"]);
    dir.write_json("manifest.json", &manifest)?;
    Ok(SimulateSummary { rows: times.len(), max_trace_error })
}

fn check_encoding(r: &Resolved, mask: &SupportMask) -> Result<EncodingReport, CliError> {
    let report = validate_encoding(&r.gamma, mask, r.source, r.target, r.max_order)?;
    if r.gamma.samples() < report.min_samples {
        return Err(CliError::Config(format!(
            "aliasing: N = {} is below the minimum {} for max_order {} (largest composite frequency {})",
            r.gamma.samples(),
            report.min_samples,
            r.max_order,
            report.max_composite
        )));
    }
    Ok(report)
}

fn pathway_list(r: &Resolved, mask: &SupportMask) -> Result<Vec<Pathway>, CliError> {
    match &r.pathways {
        Some(list) => {
            for p in list {
                pathway_frequency(p, &r.gamma, mask).map_err(|e| {
                    CliError::Config(format!("run.pathways {}: {e}", p.label(&r.map)))
                })?;
            }
            Ok(list.clone())
        }
        None => Ok(enumerate_pathways(
            &encoded_support(mask, &r.gamma),
            r.source,
            r.target,
            r.max_order,
            true,
        )?),
    }
}

pub struct PathwayRun {
    pub report: PathwayReport,
    pub spectrum: Spectrum,
    pub encoding: EncodingReport,
    pub u0: num_complex::Complex64,
}

fn sweep_and_assign(
    r: &Resolved,
    g: &PictureGenerator,
    workers: usize,
) -> Result<PathwayRun, CliError> {
    let gen = g.generator();
    let mask = SupportMask::of(gen);
    let encoding = check_encoding(r, &mask)?;
    let pathways = pathway_list(r, &mask)?;
    let rec = run_sweep(gen, &r.gamma, r.source, r.target, &r.grid, workers)?;
    let spectrum = decode_spectrum(&rec);
    let threshold = spectrum.relative_threshold(r.threshold);
    let report = assign_pathways(&spectrum, &pathways, &r.gamma, threshold);
    Ok(PathwayRun { report, spectrum, encoding, u0: rec.values[0] })
}

fn write_pathway_artifacts(
    r: &Resolved,
    run: &PathwayRun,
    dir: &mut OutDir,
) -> Result<serde_json::Value, CliError> {
    let scheme = r.scheme.to_string();
    let mut csv = Csv::new(&["pathway", "order", "lf_raw", "bin", "magnitude", "phase_rad", "scheme"]);
    for e in &run.report.entries {
        csv.row([
            e.pathway.label(&r.map),
            e.pathway.order().to_string(),
            e.raw_frequency.to_string(),
            e.bin.to_string(),
            num(e.magnitude),
            num(e.phase),
            scheme.clone(),
        ]);
    }
    dir.write("report.csv", csv.as_str())?;

    let entries: Vec<serde_json::Value> = run
        .report
        .entries
        .iter()
        .map(|e| {
            json!({
                "pathway": e.pathway.label(&r.map),
                "order": e.pathway.order(),
                "lf_raw": e.raw_frequency,
                "bin": e.bin,
                "re": num(e.amplitude.re),
                "im": num(e.amplitude.im),
                "magnitude": num(e.magnitude),
                "phase_rad": num(e.phase),
                "ambiguous": e.ambiguous,
            })
        })
        .collect();
    let unassigned: Vec<serde_json::Value> = run
        .report
        .unassigned
        .iter()
        .map(|(bin, c)| json!({"bin": bin, "re": num(c.re), "im": num(c.im)}))
        .collect();
    dir.write_json(
        "report.json",
        &json!({
            "threshold_absolute": num(run.report.threshold),
            "u0": {"re": num(run.u0.re), "im": num(run.u0.im)},
            "entries": entries,
            "unassigned": unassigned,
        }),
    )?;

    let mut spec = Csv::new(&["bin", "re", "im"]);
    for (f, c) in run.spectrum.amplitudes.iter().enumerate() {
        spec.row([f.to_string(), num(c.re), num(c.im)]);
    }
    dir.write("spectrum.csv", spec.as_str())?;

    let picture = r.picture.picture.to_string();
    let traces: Vec<serde_json::Value> = run
        .report
        .entries
        .iter()
        .map(|e| {
            json!({
                "pathway": e.pathway.label(&r.map),
                "scheme": scheme,
                "picture": picture,
                "bin": e.bin,
            })
        })
        .collect();
    Ok(json!({
        "entries": traces,
        "unassigned_bins": run.report.unassigned.len(),
        "encoding": {
            "max_composite": run.encoding.max_composite,
            "min_samples": run.encoding.min_samples,
            "enumerated_walks": run.encoding.pathways,
            "colliding_bins": run.encoding.collisions.len(),
        },
    }))
}

pub fn pathways(r: &Resolved, out: &Path, workers: usize) -> Result<PathwayReport, CliError> {
    let g = PictureGenerator::build(r)?;
    let run = sweep_and_assign(r, &g, workers)?;
    let mut dir = OutDir::create(out)?;
    let extra = write_pathway_artifacts(r, &run, &mut dir)?;
    let mut manifest = manifest_base(r, "pathways");
    merge(&mut manifest, extra);
    manifest["files"] = json!(dir.written());
    dir.write_json("manifest.json", &manifest)?;
    Ok(run.report)
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (Some(a), serde_json::Value::Object(b)) = (into.as_object_mut(), from) {
        a.extend(b);
    }
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub pathway: String,
    pub lf_raw: u64,
    pub bin: usize,
    pub decoded: num_complex::Complex64,
    pub oracle: num_complex::Complex64,
    /// `(|oracle| − |decoded|) / |oracle|`.
    pub r: f64,
}

pub struct CompareSummary {
    pub rows: Vec<CompareRow>,
    /// Largest `|r|` over the compared pathways.
    pub max_r: f64,
    pub max_r_pathway: String,
}

pub fn compare(r: &Resolved, out: &Path, workers: usize) -> Result<CompareSummary, CliError> {
    let g = PictureGenerator::build(r)?;
    let run = sweep_and_assign(r, &g, workers)?;
    let separate = oracle_generator(r)?;
    let oracle_gen: &dyn Generator = match &separate {
        Some(o) => o,
        None => g.generator(),
    };
    let oracle = DysonOracle::new(oracle_gen, QuadratureGrid::from(r.grid));

    let mut rows = Vec::with_capacity(run.report.entries.len());
    for e in &run.report.entries {
        let o = oracle.pathway_amplitude(&e.pathway)?;
        rows.push(CompareRow {
            pathway: e.pathway.label(&r.map),
            lf_raw: e.raw_frequency,
            bin: e.bin,
            decoded: e.amplitude,
            oracle: o,
            r: (o.norm() - e.magnitude) / o.norm(),
        });
    }
    let (max_r, max_r_pathway) = rows
        .iter()
        .filter(|row| row.r.is_finite())
        .map(|row| (row.r.abs(), row.pathway.clone()))
        .fold((f64::NAN, String::new()), |acc, x| if acc.0.is_nan() || x.0 > acc.0 { x } else { acc });

    let mut csv = Csv::new(&[
        "pathway",
        "lf_raw",
        "bin",
        "decoded_magnitude",
        "decoded_phase_rad",
        "oracle_magnitude",
        "oracle_phase_rad",
        "r",
    ]);
    for row in &rows {
        csv.row([
            row.pathway.clone(),
            row.lf_raw.to_string(),
            row.bin.to_string(),
            num(row.decoded.norm()),
            num(row.decoded.arg()),
            num(row.oracle.norm()),
            num(row.oracle.arg()),
            num(row.r),
        ]);
    }
    let mut dir = OutDir::create(out)?;
    let extra = write_pathway_artifacts(r, &run, &mut dir)?;
    dir.write("compare.csv", csv.as_str())?;
    let mut manifest = manifest_base(r, "compare");
    merge(&mut manifest, extra);
    manifest["oracle_picture"] = json!(match r.picture.picture {
        Picture::Original => "interaction".to_string(),
        p => p.to_string(),
    });
    manifest["max_r"] = json!(num(max_r));
    manifest["max_r_pathway"] = json!(max_r_pathway);
    manifest["files"] = json!(dir.written());
    dir.write_json("manifest.json", &manifest)?;
    Ok(CompareSummary { rows, max_r, max_r_pathway })
}

pub struct EncodingCheck {
    pub report: EncodingReport,
    /// Listed pathways that share a bin with another enumerated walk.
    pub shared: Vec<String>,
}

pub fn validate(r: &Resolved, out: &Path) -> Result<EncodingCheck, CliError> {
    let g = PictureGenerator::build(r)?;
    let mask = SupportMask::of(g.generator());
    let report = validate_encoding(&r.gamma, &mask, r.source, r.target, r.max_order)?;
    let listed = pathway_list(r, &mask)?;
    let shared: Vec<String> = report
        .collisions
        .iter()
        .flat_map(|c| c.pathways.iter())
        .filter(|p| r.pathways.is_some() && listed.contains(p))
        .map(|p| p.label(&r.map))
        .collect();

    let collisions: Vec<serde_json::Value> = report
        .collisions
        .iter()
        .map(|c| {
            json!({
                "bin": c.bin,
                "pathways": c.pathways.iter().map(|p| p.label(&r.map)).collect::<Vec<_>>(),
                "lf_raw": c.raw,
            })
        })
        .collect();
    let mut dir = OutDir::create(out)?;
    dir.write_json(
        "encoding.json",
        &json!({
            "samples": r.gamma.samples(),
            "max_composite": report.max_composite,
            "min_samples": report.min_samples,
            "enumerated_walks": report.pathways,
            "listed_pathways_sharing_a_bin": shared,
            "collisions": collisions,
        }),
    )?;
    let mut manifest = manifest_base(r, "validate-encoding");
    manifest["files"] = json!(dir.written());
    dir.write_json("manifest.json", &manifest)?;

    if r.gamma.samples() < report.min_samples {
        return Err(CliError::Config(format!(
            "aliasing: N = {} is below the minimum {} (largest composite frequency {})",
            r.gamma.samples(),
            report.min_samples,
            report.max_composite
        )));
    }
    Ok(EncodingCheck { report, shared })
}
