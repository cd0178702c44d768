//! Implementations of the `gauge` subcommands. Each returns the
//! process exit code; all file formats carry the metadata header
//! (version, seed, config hash) and are deterministic for a fixed
//! seed and configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use gauge_core::group::{class_coordinates, ClassCoordinates, GroupKind, RepLabel};
use gauge_core::heat::{heat_kernel, su3_weyl_factor, KernelParams};
use gauge_core::hida::{metric_d, norm_t, TestFunction};
use gauge_core::lattice::{plaquette_holonomy, GaugeConfig, LatticeLevel};
use gauge_core::linalg::C64;
use gauge_core::measure::{convolution_check, BetaSchedule, McmcChain};
use gauge_core::stats::histogram;
use gauge_core::strata::{classify_stratum, stratum_examples, stratum_measure_profile, HolonomySet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use crate::config::{fmt_f64, Meta, RunConfig};
use crate::io;
use crate::verify;

pub type CmdResult = Result<i32, String>;

fn ensure_out(out: &Path) -> Result<(), String> {
    fs::create_dir_all(out).map_err(|e| format!("cannot create {}: {e}", out.display()))
}

fn out_file(out: &Path, name: &str) -> PathBuf {
    out.join(name)
}

fn rng_for(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn effective_beta(cfg: &RunConfig) -> Result<f64, String> {
    match cfg.schedule_c {
        Some(c) => {
            let s = BetaSchedule::new(c).map_err(|e| format!("bad schedule constant: {e:?}"))?;
            Ok(s.beta(cfg.level))
        }
        None => Ok(cfg.beta),
    }
}

fn lattice_for(cfg: &RunConfig) -> Result<LatticeLevel, String> {
    LatticeLevel::new(cfg.dim, 1.0, cfg.level, cfg.extent)
        .map_err(|e| format!("bad lattice geometry: {e:?}"))
}

// ------------------------------------------------------- kernel-grid

/// Kernel density table over (class coordinates) x beta. The U1
/// default covers theta in [0,1], beta in [0.001, 0.4].
pub fn cmd_kernel_grid(cfg: &RunConfig, out: &Path) -> CmdResult {
    ensure_out(out)?;
    let kind = cfg.kind()?;
    let meta = Meta::new(cfg);
    let betas: Vec<f64> = {
        // logarithmic ladder from 0.001 to 0.4 inclusive
        let (lo, hi, n) = (0.001f64, 0.4f64, 25usize);
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    };
    let mut csv = meta.csv_comment();
    match kind {
        GroupKind::U1 | GroupKind::Su2 => {
            let coord = if kind == GroupKind::U1 { "theta" } else { "x" };
            csv.push_str(&format!("{coord},beta,density\n"));
            for &beta in &betas {
                let p = KernelParams::new(beta).map_err(|e| format!("{e:?}"))?;
                for i in 0..=100 {
                    let x = i as f64 / 100.0;
                    let coords = if kind == GroupKind::U1 {
                        ClassCoordinates::U1(x)
                    } else {
                        ClassCoordinates::Su2(x)
                    };
                    let k = heat_kernel(&coords, &p).map_err(|e| format!("{e:?}"))?;
                    csv.push_str(&format!("{},{},{}\n", fmt_f64(x), fmt_f64(beta), fmt_f64(k)));
                }
            }
        }
        GroupKind::Su3 => {
            csv.push_str("t1,t2,beta,density\n");
            for &beta in &betas {
                let p = KernelParams::new(beta).map_err(|e| format!("{e:?}"))?;
                for i in 0..=24 {
                    for j in 0..=24 {
                        let t1 = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * i as f64 / 24.0;
                        let t2 = -core::f64::consts::PI + 2.0 * core::f64::consts::PI * j as f64 / 24.0;
                        // keep to the interior of the alcove where the
                        // theta form is well conditioned
                        if t1 < t2 || su3_weyl_factor(t1, t2).abs() < 1e-3 {
                            continue;
                        }
                        let k = heat_kernel(&ClassCoordinates::Su3(t1, t2), &p)
                            .map_err(|e| format!("{e:?}"))?;
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            fmt_f64(t1),
                            fmt_f64(t2),
                            fmt_f64(beta),
                            fmt_f64(k)
                        ));
                    }
                }
            }
        }
    }
    io::write_text(&out_file(out, "kernel_grid.csv"), &csv)?;
    Ok(0)
}

// ------------------------------------------------------------ verify

pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> CmdResult {
    ensure_out(out)?;
    let suite = verify::run_suite(cfg);
    let text = serde_json::to_string_pretty(&suite).map_err(|e| e.to_string())?;
    io::write_text(&out_file(out, "verify_report.json"), &(text.clone() + "\n"))?;
    println!("{text}");
    for c in &suite.checks {
        let tag = if c.negative_control { " [negative control]" } else { "" };
        eprintln!(
            "{:<32} {}{}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            tag
        );
    }
    Ok(if suite.overall_pass { 0 } else { 1 })
}

// ------------------------------------------------------------ sample

/// MCMC sampling of the interaction measure on the configured lattice.
/// With sweeps = 0, emits only the initial (Haar) configuration.
pub fn cmd_sample(cfg: &RunConfig, out: &Path) -> CmdResult {
    ensure_out(out)?;
    let kind = cfg.kind()?;
    let meta = Meta::new(cfg);
    let beta = effective_beta(cfg)?;
    let lattice = lattice_for(cfg)?;
    let mut rng = rng_for(cfg);

    if cfg.mcmc.sweeps == 0 {
        let config = GaugeConfig::sample_kinematical(lattice, kind, &mut rng);
        let j = io::config_to_json(&config, &meta);
        io::write_json(&out_file(out, "gauge_config.json"), &j)?;
        return Ok(0);
    }

    let params = cfg.mcmc.to_params();
    let mut chain =
        McmcChain::new(lattice, kind, beta, &params, rng).map_err(|e| format!("{e:?}"))?;
    chain.burn_in(params.burnin).map_err(|e| format!("{e:?}"))?;
    let samples = chain
        .run(params.sweeps, params.thinning, |c| {
            c.lattice
                .enumerate_plaquettes()
                .iter()
                .map(|p| match class_coordinates(&plaquette_holonomy(c, p)) {
                    ClassCoordinates::U1(t) => t,
                    ClassCoordinates::Su2(x) => x,
                    ClassCoordinates::Su3(t1, _) => t1,
                })
                .collect()
        })
        .map_err(|e| format!("{e:?}"))?;
    let values: Vec<f64> = samples.into_iter().flatten().collect();
    let (lo, hi) = match kind {
        GroupKind::U1 => (0.0, 1.0),
        GroupKind::Su2 => (0.0, 1.0),
        GroupKind::Su3 => (-core::f64::consts::PI, core::f64::consts::PI),
    };
    let bins = histogram(&values, 50, lo, hi);
    let mut csv = meta.csv_comment();
    csv.push_str("bin_left,bin_right,count,density\n");
    for b in &bins {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(b.left),
            fmt_f64(b.right),
            b.count,
            fmt_f64(b.density)
        ));
    }
    io::write_text(&out_file(out, "histogram.csv"), &csv)?;
    let j = io::config_to_json(&chain.config, &meta);
    io::write_json(&out_file(out, "gauge_config.json"), &j)?;
    eprintln!(
        "sampled {} sweeps at beta={} (acceptance {:.3})",
        params.sweeps,
        beta,
        chain.acceptance_rate()
    );
    Ok(0)
}

// ------------------------------------------------------ coarsen-test

/// Kinematical projective-consistency test (fine level -> one coarser
/// level) at the configured group and sample size.
pub fn cmd_coarsen_test(cfg: &RunConfig, out: &Path) -> CmdResult {
    ensure_out(out)?;
    let kind = cfg.kind()?;
    let n = cfg.sample_size(100_000);
    let mut rng = rng_for(cfg);
    let fine = LatticeLevel::new(cfg.dim, 1.0, cfg.level + 1, cfg.extent)
        .map_err(|e| format!("{e:?}"))?;
    let coarse = lattice_for(cfg)?;
    let report = gauge_core::measure::verify_kinematical_consistency(
        &fine,
        &coarse,
        kind,
        n,
        cfg.significance(),
        gauge_core::measure::BreakMode::None,
        &mut rng,
    )
    .map_err(|e| format!("{e:?}"))?;
    let doc = json!({ "meta": Meta::new(cfg), "report": report });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    io::write_text(&out_file(out, "coarsen_report.json"), &(text.clone() + "\n"))?;
    println!("{text}");
    Ok(if report.pass { 0 } else { 1 })
}

// ------------------------------------------------- verify-convolution

pub fn cmd_verify_convolution(cfg: &RunConfig, out: &Path) -> CmdResult {
    ensure_out(out)?;
    let kind = cfg.kind()?;
    let mut rng = rng_for(cfg);
    let budget = cfg.sample_size(200_000);
    let report = convolution_check(kind, effective_beta(cfg)?, budget, &mut rng)
        .map_err(|e| format!("{e:?}"))?;
    let doc = json!({ "meta": Meta::new(cfg), "report": report });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    io::write_text(&out_file(out, "convolution_report.json"), &(text.clone() + "\n"))?;
    println!("{text}");
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------- classify

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyInput {
    group: String,
    /// flat edge payloads, same encoding as gauge configurations:
    /// SU2 4 and SU3 9 row-major complex entries as [re, im, ...]
    elements: Vec<Vec<f64>>,
}

/// Classify the stratum of a holonomy set read from JSON, or emit the
/// classified table-row examples with --examples.
pub fn cmd_classify(
    cfg: &RunConfig,
    out: &Path,
    input: Option<&Path>,
    examples: bool,
) -> CmdResult {
    ensure_out(out)?;
    let meta = Meta::new(cfg);
    if examples {
        let kind = cfg.kind()?;
        let indices: &[u8] = match kind {
            GroupKind::Su2 => &[1, 2, 3],
            GroupKind::Su3 => &[1, 2, 3, 4, 5],
            GroupKind::U1 => return Err("strata classification needs su2 or su3".into()),
        };
        let mut rng = rng_for(cfg);
        let mut rows = Vec::new();
        for &i in indices {
            let h = stratum_examples(kind, i, &mut rng).map_err(|e| format!("{e:?}"))?;
            let s = classify_stratum(&h).map_err(|e| format!("{e:?}"))?;
            println!(
                "stratum {}: isotropy {}, subbundle {}, commutant dimension {}",
                s.index, s.isotropy, s.subbundle, s.commutant_dimension
            );
            rows.push(s);
        }
        let doc = json!({ "meta": meta, "strata": rows });
        io::write_json(&out_file(out, "strata.json"), &doc)?;
        return Ok(0);
    }
    let input = input.ok_or("classify needs an input file (or --examples)")?;
    let text = fs::read_to_string(input)
        .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let parsed: ClassifyInput =
        serde_json::from_str(&text).map_err(|e| format!("invalid input: {e}"))?;
    let kind = match parsed.group.as_str() {
        "su2" => GroupKind::Su2,
        "su3" => GroupKind::Su3,
        other => return Err(format!("group {other:?} has no stratum table")),
    };
    let elements = parsed
        .elements
        .iter()
        .map(|p| io::element_from_flat(kind, p))
        .collect::<Result<Vec<_>, _>>()?;
    let h = HolonomySet::new(elements).map_err(|e| format!("{e:?}"))?;
    let s = classify_stratum(&h).map_err(|e| format!("{e:?}"))?;
    let doc = json!({ "meta": meta, "stratum": s });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    io::write_text(&out_file(out, "stratum.json"), &(text.clone() + "\n"))?;
    println!("{text}");
    Ok(0)
}

// ------------------------------------------------------------- norms

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormsInput {
    group: String,
    /// one coefficient list per test function; labels are [n] for U1,
    /// [twice_lambda] for SU2, [p, q] for SU3
    functions: Vec<Vec<CoefficientEntry>>,
    #[serde(default = "default_t_values")]
    t_values: Vec<f64>,
}

fn default_t_values() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientEntry {
    label: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

fn parse_label(kind: GroupKind, raw: &[i64]) -> Result<RepLabel, String> {
    match (kind, raw) {
        (GroupKind::U1, [n]) => Ok(RepLabel::U1(*n)),
        (GroupKind::Su2, [t]) if *t >= 0 => Ok(RepLabel::Su2 {
            twice_lambda: *t as u32,
        }),
        (GroupKind::Su3, [p, q]) if *p >= 1 && *q >= 1 => Ok(RepLabel::Su3 {
            p: *p as u32,
            q: *q as u32,
        }),
        _ => Err(format!("bad label {raw:?} for {kind:?}")),
    }
}

/// Hida norms of coefficient lists for each requested t, plus the
/// pairwise metric distances.
pub fn cmd_norms(cfg: &RunConfig, out: &Path, input: &Path) -> CmdResult {
    ensure_out(out)?;
    let meta = Meta::new(cfg);
    let text = fs::read_to_string(input)
        .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let parsed: NormsInput =
        serde_json::from_str(&text).map_err(|e| format!("invalid input: {e}"))?;
    let kind = match parsed.group.as_str() {
        "u1" => GroupKind::U1,
        "su2" => GroupKind::Su2,
        "su3" => GroupKind::Su3,
        other => return Err(format!("unknown group {other:?}")),
    };
    let mut functions = Vec::new();
    for entries in &parsed.functions {
        let mut coeffs = BTreeMap::new();
        for e in entries {
            coeffs.insert(parse_label(kind, &e.label)?, C64::new(e.re, e.im));
        }
        functions.push(TestFunction::new(kind, coeffs).map_err(|e| format!("{e:?}"))?);
    }
    let mut norms_csv = meta.csv_comment();
    norms_csv.push_str("function,t,norm\n");
    for (i, f) in functions.iter().enumerate() {
        for &t in &parsed.t_values {
            let n = norm_t(f, t).map_err(|e| format!("{e:?}"))?;
            norms_csv.push_str(&format!("{i},{},{}\n", fmt_f64(t), fmt_f64(n)));
            println!("function {i}: ||.||_{t} = {n:.12e}");
        }
    }
    io::write_text(&out_file(out, "norms.csv"), &norms_csv)?;
    let mut metric_csv = meta.csv_comment();
    metric_csv.push_str("function_i,function_j,distance\n");
    for i in 0..functions.len() {
        for j in (i + 1)..functions.len() {
            let d = metric_d(&functions[i], &functions[j]).map_err(|e| format!("{e:?}"))?;
            metric_csv.push_str(&format!("{i},{j},{}\n", fmt_f64(d)));
        }
    }
    io::write_text(&out_file(out, "metric.csv"), &metric_csv)?;
    Ok(0)
}

// ---------------------------------------------------- profile-strata

/// Kernel profile along a curve in each stratum approaching the
/// identity class point.
pub fn cmd_profile_strata(cfg: &RunConfig, out: &Path) -> CmdResult {
    ensure_out(out)?;
    let kind = cfg.kind()?;
    let indices: &[u8] = match kind {
        GroupKind::Su2 => &[1, 2, 3],
        GroupKind::Su3 => &[1, 2, 3, 4, 5],
        GroupKind::U1 => return Err("strata profiles need su2 or su3".into()),
    };
    let meta = Meta::new(cfg);
    let mut csv = meta.csv_comment();
    csv.push_str("stratum,parameter,kernel_value\n");
    for &i in indices {
        let profile = stratum_measure_profile(kind, i, effective_beta(cfg)?, 64)
            .map_err(|e| format!("{e:?}"))?;
        for pt in profile {
            csv.push_str(&format!(
                "{i},{},{}\n",
                fmt_f64(pt.parameter),
                fmt_f64(pt.kernel_value)
            ));
        }
    }
    io::write_text(&out_file(out, "strata_profile.csv"), &csv)?;
    Ok(0)
}
