use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;

use orbitmap::group::{CanonicalResult, Similarity3};
use orbitmap::image::{
    orbit_map_image, read_pnm, encode_pnm, ImageError, RasterImage, SampleCircleSet,
};
use orbitmap::kernel::{check_condition, ConditionCheck, KernelPair};
use orbitmap::pointcloud::{
    center, orbit_map_similarity_with, pca_align_with, read_cloud, scale_normalize, CloudError,
    CloudFormat, PcaAlignment, PcaDiagnostics, PcaOptions, PointCloud, SignRule,
};
use orbitmap::stability::{
    smooth_corpus, stability_report, toy_shape_bench_with, BenchConfig, ResidualOptions,
};

use crate::output::{emit_json, write_atomic};
use crate::{
    AngleArgs, BuiltinPair, CloudMode, Command, EstimatorArg, Interp, SignRuleArg, Status,
};

pub fn run(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::CanonicalizeImage {
            input,
            output,
            report,
            interp,
            angle,
        } => canonicalize_image(&input, &output, report.as_deref(), interp, &angle),
        Command::CanonicalizeCloud {
            input,
            output,
            report,
            mode,
            proper_rotation,
            sign_rule,
        } => {
            let options = PcaOptions {
                sign_rule: match sign_rule {
                    SignRuleArg::FirstRow => SignRule::FirstRow,
                    SignRuleArg::FirstSignificant => SignRule::FirstSignificant,
                },
                proper_rotation,
            };
            canonicalize_cloud(&input, &output, report.as_deref(), mode, &options)
        }
        Command::StabilityReport {
            inputs,
            synthetic,
            seed,
            step_deg,
            interp,
            estimator,
            noise_variance,
            angle,
            output,
        } => stability(
            &inputs,
            synthetic,
            seed,
            step_deg,
            interp,
            estimator,
            noise_variance,
            &angle,
            output.as_deref(),
        ),
        Command::KernelCheck {
            builtin,
            pair,
            quarter_turns,
            output,
        } => kernel_check(builtin, pair.as_deref(), &quarter_turns, output.as_deref()),
        Command::OrbitBench {
            seed,
            grid,
            assert,
            output,
        } => orbit_bench(seed, grid, assert, output.as_deref()),
    }
}

fn circles(angle: &AngleArgs) -> anyhow::Result<SampleCircleSet> {
    Ok(SampleCircleSet::new(angle.radii.clone(), angle.samples)?)
}

#[derive(Serialize)]
struct ImageReport {
    angle_deg: Option<f64>,
    integral_magnitude: f64,
    degenerate: bool,
}

fn canonicalize_image(
    input: &Path,
    output: &Path,
    report: Option<&Path>,
    interp: Interp,
    angle: &AngleArgs,
) -> anyhow::Result<Status> {
    let (img, depth) =
        read_pnm(input).with_context(|| format!("cannot read image {}", input.display()))?;
    let circles = circles(angle)?;
    let map = orbitmap::image::ImageOrbitMap {
        interpolation: interp.into(),
        circles: circles.clone(),
        sigma: angle.sigma,
    };
    match map.angle(&img) {
        Ok((rotation, magnitude)) => {
            let result = orbit_map_image(&img, interp.into(), &circles, angle.sigma)?;
            write_atomic(output, &encode_pnm(&result.canonical, depth, false)?)?;
            emit_json(
                report,
                &ImageReport {
                    angle_deg: Some(rotation.degrees()),
                    integral_magnitude: magnitude,
                    degenerate: false,
                },
            )?;
            Ok(Status::Ok)
        }
        Err(ImageError::DegenerateOrientation { magnitude, .. }) => {
            emit_json(
                report,
                &ImageReport {
                    angle_deg: None,
                    integral_magnitude: magnitude,
                    degenerate: true,
                },
            )?;
            Ok(Status::Degenerate)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct CloudReport {
    mode: &'static str,
    /// The applied transform is `x ↦ scale · rotation · x + translation`.
    translation: [f64; 3],
    scale: f64,
    rotation: [f64; 9],
    determinant: f64,
    singular_values: Option<[f64; 3]>,
    gaps: Option<[f64; 2]>,
    sign_vector: Option<[f64; 3]>,
    degenerate: bool,
}

#[derive(Serialize)]
struct DegenerateCloudReport {
    mode: &'static str,
    degenerate: bool,
    error: String,
    gaps: Option<[f64; 2]>,
    axis: Option<usize>,
}

fn mode_name(mode: CloudMode) -> &'static str {
    match mode {
        CloudMode::Center => "center",
        CloudMode::Scale => "scale",
        CloudMode::Pca => "pca",
        CloudMode::Similarity => "similarity",
    }
}

fn canonicalize_cloud(
    input: &Path,
    output: &Path,
    report: Option<&Path>,
    mode: CloudMode,
    options: &PcaOptions,
) -> anyhow::Result<Status> {
    let cloud =
        read_cloud(input).with_context(|| format!("cannot read cloud {}", input.display()))?;
    let outcome: Result<(CanonicalResult<PointCloud, Similarity3>, Option<PcaDiagnostics>), CloudError> =
        match mode {
            CloudMode::Center => Ok((center(&cloud), None)),
            CloudMode::Scale => scale_normalize(&cloud).map(|r| (r, None)),
            CloudMode::Pca => pca_align_with(&cloud, options).map(split),
            CloudMode::Similarity => orbit_map_similarity_with(&cloud, options).map(split),
        };
    match outcome {
        Ok((result, diagnostics)) => {
            let format = CloudFormat::from_path(output).unwrap_or(CloudFormat::Xyz);
            write_atomic(output, format.format(&result.canonical).as_bytes())?;
            let e = &result.element;
            let t = e.translation();
            emit_json(
                report,
                &CloudReport {
                    mode: mode_name(mode),
                    translation: [t.x, t.y, t.z],
                    scale: e.scale(),
                    rotation: e.rotation_row_major(),
                    determinant: e.determinant(),
                    singular_values: diagnostics.map(|d| d.singular_values),
                    gaps: diagnostics.map(|d| d.relative_gaps),
                    sign_vector: diagnostics.map(|d| d.sign_vector),
                    degenerate: false,
                },
            )?;
            Ok(Status::Ok)
        }
        Err(
            e @ (CloudError::DegenerateSpectrum { .. }
            | CloudError::AmbiguousSign { .. }
            | CloudError::DegenerateScale),
        ) => {
            let (gaps, axis) = match &e {
                CloudError::DegenerateSpectrum { relative_gaps } => (Some(*relative_gaps), None),
                CloudError::AmbiguousSign { axis } => (None, Some(*axis)),
                _ => (None, None),
            };
            emit_json(
                report,
                &DegenerateCloudReport {
                    mode: mode_name(mode),
                    degenerate: true,
                    error: e.to_string(),
                    gaps,
                    axis,
                },
            )?;
            Ok(Status::Degenerate)
        }
        Err(e) => Err(e.into()),
    }
}

fn split(a: PcaAlignment) -> (CanonicalResult<PointCloud, Similarity3>, Option<PcaDiagnostics>) {
    (a.result, Some(a.diagnostics))
}

#[allow(clippy::too_many_arguments)]
fn stability(
    inputs: &[PathBuf],
    synthetic: Option<usize>,
    seed: u64,
    step_deg: f64,
    interp: Interp,
    estimator: EstimatorArg,
    noise_variance: f64,
    angle: &AngleArgs,
    output: Option<&Path>,
) -> anyhow::Result<Status> {
    let images: Vec<RasterImage> = match synthetic {
        Some(0) => bail!("--synthetic needs at least one image"),
        Some(n) => smooth_corpus(n, seed),
        None => {
            if inputs.is_empty() {
                bail!("no input images (pass files or --synthetic N)");
            }
            inputs
                .iter()
                .map(|p| {
                    read_pnm(p)
                        .map(|(img, _)| img)
                        .with_context(|| format!("cannot read image {}", p.display()))
                })
                .collect::<anyhow::Result<_>>()?
        }
    };
    let options = ResidualOptions {
        step_deg,
        interpolation: interp.into(),
        estimator: estimator.into(),
        sigma: angle.sigma,
        circles: circles(angle)?,
        noise_variance,
        seed,
    };
    let report = stability_report(&images, &options)?;
    emit_json(output, &report)?;
    Ok(if report.mean_std_deg.is_none() {
        Status::Degenerate
    } else {
        Status::Ok
    })
}

#[derive(Serialize)]
struct QuarterTurnCheck {
    quarter_turns: i32,
    #[serde(flatten)]
    check: ConditionCheck,
}

#[derive(Serialize)]
struct KernelReport {
    pair: KernelPair,
    holds: bool,
    max_violation: f64,
    checks: Vec<QuarterTurnCheck>,
}

fn kernel_check(
    builtin: Option<BuiltinPair>,
    pair_path: Option<&Path>,
    quarter_turns: &[i32],
    output: Option<&Path>,
) -> anyhow::Result<Status> {
    let pair = match (builtin, pair_path) {
        (Some(BuiltinPair::Central), _) => KernelPair::central_difference(),
        (Some(BuiltinPair::Forward), _) => KernelPair::forward_difference(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let raw: KernelPair = serde_json::from_str(&text)
                .with_context(|| format!("invalid kernel pair in {}", path.display()))?;
            // re-validate shapes
            KernelPair::new(raw.k1().clone(), raw.k2().clone())?
        }
        (None, None) => bail!("pass --builtin or --pair"),
    };
    if quarter_turns.is_empty() || quarter_turns.iter().any(|q| !(1..=3).contains(q)) {
        bail!("quarter turns must be in 1..=3");
    }
    let checks: Vec<QuarterTurnCheck> = quarter_turns
        .iter()
        .map(|&q| QuarterTurnCheck {
            quarter_turns: q,
            check: check_condition(&pair, q),
        })
        .collect();
    let report = KernelReport {
        holds: checks.iter().all(|c| c.check.holds),
        max_violation: checks.iter().map(|c| c.check.max_violation).fold(0.0, f64::max),
        pair,
        checks,
    };
    emit_json(output, &report)?;
    Ok(Status::Ok)
}

fn orbit_bench(seed: u64, grid: usize, assert: bool, output: Option<&Path>) -> anyhow::Result<Status> {
    if grid == 0 {
        bail!("--grid must be positive");
    }
    let config = BenchConfig {
        grid,
        ..BenchConfig::default()
    };
    let report = toy_shape_bench_with(seed, &config)?;
    emit_json(output, &report)?;
    let w = &report.with_orbit_map;
    let invariant =
        w.clean.to_bits() == w.average.to_bits() && w.clean.to_bits() == w.worst.to_bits();
    if assert && !invariant {
        eprintln!(
            "assertion failed: with orbit map clean/average/worst = {}/{}/{}",
            w.clean, w.average, w.worst
        );
        return Ok(Status::AssertionFailed);
    }
    Ok(Status::Ok)
}
