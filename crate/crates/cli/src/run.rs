//! Dispatch from a parsed config to the library, plus result persistence.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use pellip_core::algebra::{analyticity_angle, delta_p, delta_p_field, p_ellipticity_range};
use pellip_core::bellman::approximant::certify_p_mix;
use pellip_core::bellman::rigidity::rigidity_probe;
use pellip_core::bellman::{
    calibrate_c1, calibrate_delta, certify_bellman, certify_rn, ApproximantSpec, BellmanSpec, ConvexityCertificate,
    MollifierSpec, Pair, SamplingPlan, Verdict,
};
use pellip_core::exec::Exec;
use pellip_core::semigroup::{
    bilinear, contractivity, heat_flow, BilinearConfig, ContractivityConfig, ContractivityVerdict, HeatFlowConfig,
};
use pellip_core::spectral::{parabola_samples, tangency_check, ParabolaSpec, ParabolaValue};
use serde::Serialize;
use serde_json::Value;

use crate::config::{self, CertifyInput, CertifyTarget, Command, DeltaInput, ExperimentConfig, RangeInput};
use crate::error::{CliError, Context};
use crate::output::{num, sha256_hex, Outputs, RunRecord, RECORD_FILE};

/// How a single verdict bears on the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 3,
            Status::Inconclusive => 4,
        }
    }
}

#[derive(Default)]
struct Verdicts {
    named: BTreeMap<String, String>,
    worst: Option<Status>,
}

impl Verdicts {
    fn record(&mut self, name: &str, label: impl Into<String>, status: Status) {
        self.named.insert(name.to_string(), label.into());
        self.worst = self.worst.max(Some(status));
    }

    fn certificate(&mut self, name: &str, cert: &ConvexityCertificate) {
        let (label, status) = match cert.verdict {
            Verdict::CertifiedNonnegativeWithMargin => ("certified-nonnegative-with-margin", Status::Pass),
            Verdict::NegativityWitness => ("negativity-witness", Status::Fail),
            Verdict::Inconclusive => ("inconclusive", Status::Inconclusive),
        };
        self.record(name, label, status);
    }
}

pub struct RunOptions<'a> {
    pub seed: Option<u64>,
    pub out: Option<&'a Path>,
    pub exec: Exec,
    pub verbose: bool,
}

/// Parses, dispatches, writes all outputs and the record.
pub fn run_config(text: &str, opts: &RunOptions<'_>) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let raw: Value = serde_json::from_str(text).map_err(|e| CliError::Schema(format!("config: {e}")))?;
    let config: ExperimentConfig = serde_json::from_value(raw.clone()).map_err(|e| CliError::Schema(format!("config: {e}")))?;
    let seed = opts.seed.or(config.seed).unwrap_or(0);
    let dir = match (opts.out, &config.output_path) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(p)) => p.into(),
        (None, None) => format!("pellip-out/{}", config.command).into(),
    };
    let canonical = serde_json::json!({ "config": raw, "seed": seed });
    let config_sha256 = sha256_hex(canonical.to_string().as_bytes());

    let mut out = Outputs::create(&dir)?;
    let mut verdicts = Verdicts::default();
    let ctx = Ctx {
        seed,
        exec: opts.exec,
        verbose: opts.verbose,
    };
    ctx.log(format_args!("{} -> {}", config.command, out.dir().display()));
    dispatch(config.command, config.inputs, &ctx, &mut out, &mut verdicts)?;

    let record = RunRecord {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.to_string(),
        seed,
        config_sha256,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        verdicts: verdicts.named,
        exit_code: verdicts.worst.unwrap_or(Status::Pass).exit_code(),
        files: out.manifest(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    let path = out.dir().join(RECORD_FILE);
    std::fs::write(&path, text).map_err(|source| CliError::Write { path, source })?;
    Ok(record)
}

struct Ctx {
    seed: u64,
    exec: Exec,
    verbose: bool,
}

impl Ctx {
    fn plan(&self, count: usize) -> SamplingPlan {
        SamplingPlan {
            seed: self.seed,
            count,
            exec: self.exec,
        }
    }

    fn log(&self, msg: std::fmt::Arguments<'_>) {
        if self.verbose {
            eprintln!("[pellip] {msg}");
        }
    }
}

fn dispatch(command: Command, inputs: Value, ctx: &Ctx, out: &mut Outputs, v: &mut Verdicts) -> Result<(), CliError> {
    match command {
        Command::Delta => run_delta(config::inputs(command, inputs)?, out, v),
        Command::Range => run_range(config::inputs(command, inputs)?, out),
        Command::Certify => run_certify(config::inputs(command, inputs)?, ctx, out, v),
        Command::Flow => {
            let (setup, cfg): (_, HeatFlowConfig) = config::setup_and(command, inputs)?;
            let report = heat_flow(&setup, &cfg, ctx.seed, ctx.exec).module("semigroup")?;
            ctx.log(format_args!("delta = {}, fd error = {:e}", report.delta, report.dissipation_error));
            out.csv(
                "trace.csv",
                &["t", "E", "norm_p", "norm_q", "bilinear"],
                report
                    .trace
                    .rows()
                    .map(|(t, e, np, nq, b)| vec![num(t), num(e), num(np), num(nq), num(b)]),
            )?;
            out.json("report.json", &report)?;
            v.record("monotone", pass_label(report.monotone), status(report.monotone));
            v.record("heat_flow", pass_label(report.passed), status(report.passed));
            Ok(())
        }
        Command::Bilinear => {
            let (setup, cfg): (_, BilinearConfig) = config::setup_and(command, inputs)?;
            let report = bilinear(&setup, &cfg, ctx.seed, ctx.exec).module("semigroup")?;
            ctx.log(format_args!("max ratio = {}, drift = {:?}", report.max_ratio, report.drift));
            let refined = report.refined_ratios.clone().unwrap_or_default();
            out.csv(
                "ratios.csv",
                &["pair", "ratio", "refined_ratio"],
                report
                    .ratios
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| vec![k.to_string(), num(r), num(refined.get(k).copied())]),
            )?;
            out.json("report.json", &report)?;
            v.record("bilinear", pass_label(report.passed), status(report.passed));
            Ok(())
        }
        Command::Contract => {
            let (setup, cfg): (_, ContractivityConfig) = config::setup_and(command, inputs)?;
            let report = contractivity(&setup, &cfg, ctx.seed, ctx.exec).module("semigroup")?;
            ctx.log(format_args!("max ratio = {}, verdict = {:?}", report.max_ratio, report.verdict));
            out.csv(
                "ratios.csv",
                &["t", "max_ratio"],
                report
                    .times
                    .iter()
                    .zip(&report.max_ratio_by_time)
                    .map(|(&t, &r)| vec![num(t), num(r)]),
            )?;
            out.json("report.json", &report)?;
            let (label, st) = match report.verdict {
                ContractivityVerdict::Pass => ("pass", Status::Pass),
                ContractivityVerdict::Violation => ("violation", Status::Fail),
                ContractivityVerdict::Inconclusive => ("inconclusive", Status::Inconclusive),
            };
            v.record("contractivity", label, st);
            Ok(())
        }
        Command::Spectrum => {
            let input: config::SpectrumInput = config::inputs(command, inputs)?;
            let spec = ParabolaSpec::new(input.p, input.alpha).module("spectral")?;
            let rows = match input.y {
                Some(y) => vec![match spec.point(y) {
                    ParabolaValue::Point(z) => (y, z.re, z.arg()),
                    ParabolaValue::Ray { start } => (0.0, start, 0.0),
                }],
                None => parabola_samples(&spec, input.y_max, input.count),
            };
            out.csv(
                "parabola.csv",
                &["y", "x", "arg"],
                rows.into_iter().map(|(y, x, a)| vec![num(y), num(x), num(a)]),
            )?;
            if input.p != 2.0 {
                let report = tangency_check(input.p, input.alpha).module("spectral")?;
                out.json("tangency.json", &report)?;
            }
            Ok(())
        }
        Command::Rigidity => {
            let input: config::RigidityInput = config::inputs(command, inputs)?;
            let a = input.a.build("A")?;
            let cert = rigidity_probe(&a, &input.profile, ctx.plan(input.samples));
            out.json("certificate.json", &cert)?;
            v.certificate("rigidity", &cert);
            Ok(())
        }
    }
}

fn pass_label(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn run_delta(input: DeltaInput, out: &mut Outputs, v: &mut Verdicts) -> Result<(), CliError> {
    let report = match &input.a {
        config::Matrices::One(m) => delta_p(&m.build("A")?, input.p),
        many => delta_p_field(&many.field("A")?, input.p),
    }
    .module("algebra")?;
    out.json("delta.json", &report)?;
    let label = if report.delta > 0.0 { "p-elliptic" } else { "not-p-elliptic" };
    v.named.insert("p_ellipticity".into(), label.into());
    Ok(())
}

#[derive(Serialize)]
struct RangeReport {
    lower: f64,
    upper: Option<f64>,
    p: Option<f64>,
    analyticity_angle: Option<f64>,
}

fn run_range(input: RangeInput, out: &mut Outputs) -> Result<(), CliError> {
    let field = input.a.field("A")?;
    let range = p_ellipticity_range(&field).module("algebra")?;
    let angle = match input.p {
        Some(p) if range.contains(p) => Some(analyticity_angle(&field, p).module("algebra")?),
        _ => None,
    };
    out.json(
        "range.json",
        &RangeReport {
            lower: range.lower,
            upper: range.upper,
            p: input.p,
            analyticity_angle: angle,
        },
    )
}

fn run_certify(input: CertifyInput, ctx: &Ctx, out: &mut Outputs, v: &mut Verdicts) -> Result<(), CliError> {
    let pair = Pair::new(input.a.build("A")?, input.b.build("B")?).module("bellman")?;
    let p = input.p;
    let delta_for = |given: Option<f64>, samples: usize, out: &mut Outputs| -> Result<f64, CliError> {
        match given {
            Some(d) => Ok(d),
            None => {
                let cal = calibrate_delta(p, &pair, ctx.plan(samples)).module("bellman")?;
                ctx.log(format_args!("calibrated delta = {}", cal.delta));
                out.json("delta_calibration.json", &cal)?;
                Ok(cal.delta)
            }
        }
    };
    let cert = match input.target {
        CertifyTarget::Bellman {
            delta,
            calibration_samples,
        } => {
            let delta = delta_for(delta, calibration_samples, out)?;
            certify_bellman(p, delta, &pair, ctx.plan(input.samples)).module("bellman")?
        }
        CertifyTarget::Approximant {
            n,
            nu,
            radius_points,
            delta,
            c1,
            calibration_samples,
        } => {
            let delta = delta_for(delta, calibration_samples, out)?;
            let bellman = BellmanSpec::new(p, delta).module("bellman")?;
            let moll = MollifierSpec::new(nu, radius_points).module("bellman")?;
            let base = ApproximantSpec::new(bellman, &pair, n, moll).module("bellman")?;
            let c1 = match c1 {
                Some(c) => c,
                None => {
                    let cal = calibrate_c1(&base, &pair, &[n], ctx.plan(calibration_samples)).module("bellman")?;
                    out.json("c1_calibration.json", &cal)?;
                    match cal.c1 {
                        Some(c) => c,
                        None => {
                            v.record("c1_calibration", "inconclusive", Status::Inconclusive);
                            return Ok(());
                        }
                    }
                }
            };
            certify_rn(&base.with_c1(c1), &pair, ctx.plan(input.samples)).module("bellman")?
        }
        CertifyTarget::PMix => certify_p_mix(p, &pair, ctx.plan(input.samples)),
    };
    ctx.log(format_args!("min form = {:e}", cert.min_normalized_form));
    out.json("certificate.json", &cert)?;
    v.certificate("convexity", &cert);
    Ok(())
}
