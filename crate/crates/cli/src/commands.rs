use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use qkt_core::assembly::{
    default_group_sample, group_projection_at, invariance_defect, mishchenko_px, qi_probe, qs_probe, roe_projection,
    AssemblyError, MergeCriterion, SampledFunctionMatrix,
};
use qkt_core::coarse_space::{rips, rips_with_max_dim, validate_space, FiniteGroup, FiniteMetricSpace};
use qkt_core::filtered_matrix::FilteredMatrix;
use qkt_core::homotopy::{
    connect_projections, persistence_radius, rotation_homotopy, ConnectOptions, HomotopyError, ProfileOptions,
};
use qkt_core::io::{self, CertFile, MatrixFile, SamplesFile};
use qkt_core::quant_k::{
    check_quasi_projection, check_quasi_unitary, forbidden_halfwidth, kappa0, projection_defect, unitary_defects,
    QuantError,
};
use qkt_core::rational::format_rat;
use qkt_core::{Rat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{
    envelope, hash_input, hash_inputs, parse_eps, parse_eps_grid, parse_nonneg, parse_rat_grid, rat_list, sha256_hex,
    InputHash, TOOL_VERSION,
};
use crate::{Cli, Command, Criterion, Outcome, SpaceKind, EXIT_OBSTRUCTION, EXIT_REJECT};

pub(crate) fn dispatch(cli: &Cli) -> Outcome {
    let seed = cli.seed;
    let result = match &cli.command {
        Command::Check { matrix, budget, unitary } => return cmd_check(matrix, &budget.eps, &budget.r, *unitary, seed),
        Command::Profile { class, grid_eps, grid_r, id } => {
            return cmd_profile(class, grid_eps, grid_r, id.as_deref(), seed)
        }
        Command::ProbeQi { space, d, r, eps, grid_d, criterion } => {
            let criterion = match criterion {
                Criterion::Edge => MergeCriterion::DirectEdge,
                Criterion::Component => MergeCriterion::Component,
            };
            let cfg = ProbeConfig::Qi {
                space: space.clone(),
                d: d.clone(),
                r: r.clone(),
                eps: eps.clone(),
                grid_d: grid_d.clone(),
                criterion,
            };
            return cmd_probe(&cfg, seed);
        }
        Command::ProbeQs { target, input_eps, input_r, eps, grid_d, grid_r } => {
            let cfg = ProbeConfig::Qs {
                target: target.clone(),
                input_eps: input_eps.clone(),
                input_r: input_r.clone(),
                eps: eps.clone(),
                grid_d: grid_d.clone(),
                grid_r: grid_r.clone(),
            };
            return cmd_probe(&cfg, seed);
        }
        Command::Kappa0 { matrix, budget } => kappa0_cmd(matrix, &budget.eps, &budget.r, seed),
        Command::Rotate { matrix, budget, steps, hash_samples } => {
            rotate_cmd(matrix, &budget.eps, &budget.r, *steps, *hash_samples, seed)
        }
        Command::Connect { source, target, budget, input_eps, steps, no_truncate, hash_samples } => connect_cmd(
            source,
            target,
            &budget.eps,
            &budget.r,
            input_eps.as_deref(),
            ConnectOptions { steps: *steps, truncate: !no_truncate, ..Default::default() },
            *hash_samples,
            seed,
        ),
        Command::GenSpace { kind, n, rho, max_weight } => gen_space_cmd(*kind, *n, rho.as_deref(), *max_weight, seed),
        Command::Rips { space, s, max_dim, barycenters } => rips_cmd(space, s, *max_dim, *barycenters, seed),
        Command::Px { samples, action } => px_cmd(samples, action.as_deref(), seed),
        Command::GroupProj { group, d, gens } => group_proj_cmd(group, d, gens.as_deref(), seed),
        Command::RoeProj { samples, xi } => roe_proj_cmd(samples, xi, seed),
    };
    result.unwrap_or_else(|e| Outcome::malformed(&e))
}

/// Validates a `matrix.v1` file at `(eps, r)`: exit 0 on accept, 2 on
/// rejection, 1 on malformed input.
pub fn cmd_check(path: &Path, eps: &str, r: &str, unitary: bool, seed: u64) -> Outcome {
    check_inner(path, eps, r, unitary, seed).unwrap_or_else(|e| Outcome::malformed(&e))
}

fn check_inner(path: &Path, eps_s: &str, r_s: &str, unitary: bool, seed: u64) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let eps = parse_eps(eps_s)?;
    let r = parse_nonneg(r_s, "r")?;
    let params = json!({ "eps": eps_s, "r": format_rat(&r), "unitary": unitary });
    let (verdict, measured) = if unitary {
        let u = io::load_unitized(path)?;
        let (a, b) = unitary_defects(u.to_matrix().entries());
        let measured = json!({
            "defect": a.max(b),
            "defect_left": a,
            "defect_right": b,
            "propagation": format_rat(&u.propagation()),
        });
        (check_quasi_unitary(&u, eps, r).map(|_| ()), measured)
    } else {
        let m = io::load_matrix(path)?;
        let defect = projection_defect(m.entries());
        let measured = json!({
            "defect": defect,
            "propagation": format_rat(&m.propagation()),
            "self_adjoint_defect": m.self_adjoint_defect(),
            "gap_halfwidth": if defect < 0.25 { Some(forbidden_halfwidth(defect)) } else { None },
        });
        (check_quasi_projection(&m, eps, r).map(|_| ()), measured)
    };
    let (code, result) = match verdict {
        Ok(()) => (0, json!({ "verdict": "accept", "measured": measured })),
        Err(e @ (QuantError::InvalidEps(_) | QuantError::Matrix(_))) => return Err(anyhow!(e)),
        Err(e) => (EXIT_REJECT, json!({ "verdict": "reject", "reason": e.to_string(), "measured": measured })),
    };
    Ok(Outcome::with_code(code, envelope("check.v1", "check", seed, &inputs, params, result)))
}

fn kappa0_cmd(path: &Path, eps_s: &str, r_s: &str, seed: u64) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let eps = parse_eps(eps_s)?;
    let r = parse_nonneg(r_s, "r")?;
    let params = json!({ "eps": eps_s, "r": format_rat(&r) });
    let m = io::load_matrix(path)?;
    let reject = |e: QuantError| {
        let result = json!({ "verdict": "reject", "reason": e.to_string() });
        Ok(Outcome::with_code(EXIT_REJECT, envelope("kappa0.v1", "kappa0", seed, &inputs, params.clone(), result)))
    };
    let p = match check_quasi_projection(&m, eps, r) {
        Ok(p) => p,
        Err(e) => return reject(e),
    };
    let k = match kappa0(&p) {
        Ok(k) => k,
        Err(e) => return reject(e),
    };
    let result = json!({
        "verdict": "accept",
        "rank": k.rank,
        "gap_halfwidth": k.gap_halfwidth,
        "distance": k.distance,
        "eigenvalues": k.eigenvalues,
        "defect": p.defect,
        "projection": MatrixFile::inline(&k.projection),
    });
    Ok(Outcome::ok(envelope("kappa0.v1", "kappa0", seed, &inputs, params, result)))
}

fn cert_json(cert: &qkt_core::homotopy::HomotopyCertificate, hash_samples: bool) -> Value {
    let hasher = |s: &str| sha256_hex(s.as_bytes());
    let file = if hash_samples { CertFile::new(cert, Some(&hasher)) } else { CertFile::new(cert, None) };
    serde_json::to_value(file).expect("certificate serializes")
}

fn rotate_cmd(path: &Path, eps_s: &str, r_s: &str, steps: usize, hash_samples: bool, seed: u64) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let eps = parse_eps(eps_s)?;
    let r = parse_nonneg(r_s, "r")?;
    let params = json!({ "eps": eps_s, "r": format_rat(&r), "steps": steps });
    let u = io::load_unitized(path)?;
    let u = match check_quasi_unitary(&u, eps, r) {
        Ok(u) => u,
        Err(e) => {
            let result = json!({ "verdict": "reject", "reason": e.to_string() });
            return Ok(Outcome::with_code(EXIT_REJECT, envelope("cert.v1", "rotate", seed, &inputs, params, result)));
        }
    };
    let cert = rotation_homotopy(&u, steps)?;
    let code = if cert.accepted { 0 } else { EXIT_REJECT };
    Ok(Outcome::with_code(code, envelope("cert.v1", "rotate", seed, &inputs, params, cert_json(&cert, hash_samples))))
}

#[allow(clippy::too_many_arguments)]
fn connect_cmd(
    source: &Path,
    target: &Path,
    eps_s: &str,
    r_s: &str,
    input_eps: Option<&str>,
    opts: ConnectOptions,
    hash_samples: bool,
    seed: u64,
) -> Result<Outcome> {
    let inputs = hash_inputs(&[source, target])?;
    let eps = parse_eps(eps_s)?;
    let r = parse_nonneg(r_s, "r")?;
    let in_eps = parse_eps(input_eps.unwrap_or(eps_s))?;
    let params = json!({
        "eps": eps_s,
        "r": format_rat(&r),
        "input_eps": input_eps.unwrap_or(eps_s),
        "steps": opts.steps,
        "truncate": opts.truncate,
    });
    let out = |code: i32, result: Value| {
        Ok(Outcome::with_code(code, envelope("cert.v1", "connect", seed, &inputs, params.clone(), result)))
    };
    let (pm, qm) = (io::load_matrix(source)?, io::load_matrix(target)?);
    let validate = |m: &FilteredMatrix| check_quasi_projection(m, in_eps, m.propagation());
    let (p, q) = match (validate(&pm), validate(&qm)) {
        (Ok(p), Ok(q)) => (p, q),
        (Err(e), _) | (_, Err(e)) => return out(EXIT_REJECT, json!({ "verdict": "reject", "reason": e.to_string() })),
    };
    match connect_projections(&p, &q, r, eps, &opts) {
        Ok(cert) => out(0, cert_json(&cert, hash_samples)),
        Err(e @ HomotopyError::RankMismatch { .. }) => {
            out(EXIT_OBSTRUCTION, json!({ "verdict": "rank-mismatch", "reason": e.to_string() }))
        }
        Err(HomotopyError::BudgetInfeasible { achieved_eps, achieved_r, discarded_norm }) => out(
            EXIT_REJECT,
            json!({
                "verdict": "budget-infeasible",
                "achieved_eps": achieved_eps,
                "achieved_r": format_rat(&achieved_r),
                "discarded_norm": discarded_norm,
            }),
        ),
        Err(HomotopyError::RefinementLimit { eps_eff }) => {
            out(EXIT_REJECT, json!({ "verdict": "timeout", "eps_eff": eps_eff }))
        }
        Err(HomotopyError::Quant(e)) => out(EXIT_REJECT, json!({ "verdict": "reject", "reason": e.to_string() })),
        Err(e) => Err(anyhow!(e)),
    }
}

/// Persistence profile CSV for a degree-0 class. Exit 3 when the class
/// has a nonzero rank obstruction.
pub fn cmd_profile(class: &Path, grid_eps: &str, grid_r: &str, id: Option<&str>, seed: u64) -> Outcome {
    profile_inner(class, grid_eps, grid_r, id, seed).unwrap_or_else(|e| Outcome::malformed(&e))
}

fn profile_inner(path: &Path, grid_eps: &str, grid_r: &str, id: Option<&str>, seed: u64) -> Result<Outcome> {
    let input = hash_input(path)?;
    let eps_grid = parse_eps_grid(grid_eps)?;
    let r_grid = parse_rat_grid(grid_r, "r")?;
    let class = io::load_class(path)?;
    let class_id = id.map(str::to_owned).unwrap_or_else(|| input.sha256[..16].to_owned());
    let opts = ProfileOptions { class_id: class_id.clone(), ..Default::default() };
    let profile = match persistence_radius(&class, &eps_grid, &r_grid, &opts) {
        Ok(p) => p,
        Err(e @ HomotopyError::NotNullInK0 { .. }) => {
            return Ok(Outcome { code: EXIT_OBSTRUCTION, stdout: String::new(), stderr: format!("obstruction: {e}\n") })
        }
        Err(e) => return Err(anyhow!(e)),
    };
    let eps_labels: Vec<String> = eps_grid.iter().map(|e| e.to_string()).collect();
    let mut csv = String::new();
    csv.push_str(&format!("# tool_version={TOOL_VERSION}\n"));
    csv.push_str(&format!(
        "# statement=PA class_id={class_id} input={} sha256={} seed={seed}\n",
        input.name, input.sha256
    ));
    csv.push_str(&format!(
        "# class_eps={} class_r={} l={} grid_eps={} grid_r={}\n",
        class.eps,
        format_rat(&class.r),
        class.l().unwrap_or(0),
        eps_labels.join(";"),
        rat_list(&r_grid).join(";"),
    ));
    csv.push_str(&profile.to_csv());
    Ok(Outcome::ok(csv))
}

/// Inputs of the QI/QS probes.
#[derive(Debug, Clone)]
pub enum ProbeConfig {
    Qi { space: PathBuf, d: String, r: String, eps: String, grid_d: String, criterion: MergeCriterion },
    Qs { target: PathBuf, input_eps: String, input_r: String, eps: String, grid_d: String, grid_r: String },
}

/// Runs a probe; exits 0 whenever the inputs parse.
pub fn cmd_probe(cfg: &ProbeConfig, seed: u64) -> Outcome {
    let res = match cfg {
        ProbeConfig::Qi { space, d, r, eps, grid_d, criterion } => probe_qi(space, d, r, eps, grid_d, *criterion, seed),
        ProbeConfig::Qs { target, input_eps, input_r, eps, grid_d, grid_r } => {
            probe_qs(target, input_eps, input_r, eps, grid_d, grid_r, seed)
        }
    };
    res.unwrap_or_else(|e| Outcome::malformed(&e))
}

fn probe_qi(
    path: &Path,
    d_s: &str,
    r_s: &str,
    eps_s: &str,
    grid: &str,
    criterion: MergeCriterion,
    seed: u64,
) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let d = parse_nonneg(d_s, "d")?;
    let r = parse_nonneg(r_s, "r")?;
    let eps = parse_eps(eps_s)?;
    let schedule = parse_rat_grid(grid, "d'")?;
    if r < d {
        bail!("the probe needs r >= d");
    }
    let space = Arc::new(io::load_space(path)?);
    let report = qi_probe(&space, d, r, eps, &schedule, criterion, &ConnectOptions::default())?;
    let summary = match report.minimal_d_prime {
        Some(dp) => format!("holds at d'={}", format_rat(&dp)),
        None => "fails at all scheduled d'".to_owned(),
    };
    let mut result = serde_json::to_value(&report)?;
    result["summary"] = json!(summary);
    let params = json!({ "d": format_rat(&d), "r": format_rat(&r), "eps": eps_s, "grid_d_prime": rat_list(&schedule) });
    Ok(Outcome::ok(envelope("probe.v1", "probe-qi", seed, &inputs, params, result)))
}

#[allow(clippy::too_many_arguments)]
fn probe_qs(
    path: &Path,
    in_eps_s: &str,
    in_r_s: &str,
    eps_s: &str,
    grid_d: &str,
    grid_r: &str,
    seed: u64,
) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let in_eps = parse_eps(in_eps_s)?;
    let in_r = parse_nonneg(in_r_s, "input r")?;
    let eps = parse_eps(eps_s)?;
    let d_grid = parse_rat_grid(grid_d, "d")?;
    let r_grid = parse_rat_grid(grid_r, "r")?;
    let m = io::load_matrix(path)?;
    let y = check_quasi_projection(&m, in_eps, in_r).context("target is not a valid quasi-projection")?;
    let report = qs_probe(&y, &d_grid, &r_grid, eps, &ConnectOptions::default())?;
    let summary = match report.minimal {
        Some((d, r)) => format!("holds at d={}, r={}", format_rat(&d), format_rat(&r)),
        None => "fails on the whole grid".to_owned(),
    };
    let mut result = serde_json::to_value(&report)?;
    result["summary"] = json!(summary);
    let params = json!({
        "input_eps": in_eps_s,
        "input_r": format_rat(&in_r),
        "eps": eps_s,
        "grid_d": rat_list(&d_grid),
        "grid_r": rat_list(&r_grid),
    });
    Ok(Outcome::ok(envelope("probe.v1", "probe-qs", seed, &inputs, params, result)))
}

/// Adds provenance keys to a loadable file document.
fn stamp(mut doc: Value, command: &str, seed: u64, inputs: &[InputHash]) -> String {
    doc["tool_version"] = json!(TOOL_VERSION);
    doc["command"] = json!(command);
    doc["seed"] = json!(seed);
    doc["inputs"] = json!(inputs);
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

/// Shortest-path metric of a random connected weighted graph.
fn random_space(n: usize, max_weight: u32, seed: u64) -> Result<FiniteMetricSpace> {
    if n == 0 {
        bail!("a space needs at least one point");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inf = u64::MAX / 4;
    let mut w = vec![vec![inf; n]; n];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 0;
    }
    let edge = |w: &mut Vec<Vec<u64>>, a: usize, b: usize, len: u64| {
        w[a][b] = w[a][b].min(len);
        w[b][a] = w[b][a].min(len);
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let len = rng.gen_range(1..=max_weight.max(1)) as u64;
        edge(&mut w, i, j, len);
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.3) {
                let len = rng.gen_range(1..=max_weight.max(1)) as u64;
                edge(&mut w, a, b, len);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k] + w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    let dist = w.iter().map(|row| row.iter().map(|&x| Rat::from_integer(x as i64)).collect()).collect();
    Ok(validate_space((0..n).map(|i| format!("p{i}")).collect(), dist)?)
}

fn gen_space_cmd(kind: SpaceKind, n: usize, rho: Option<&str>, max_weight: u32, seed: u64) -> Result<Outcome> {
    let space = match kind {
        SpaceKind::Path if n > 0 => FiniteMetricSpace::path(n),
        SpaceKind::Cycle if n > 0 => FiniteMetricSpace::cycle(n),
        SpaceKind::Path | SpaceKind::Cycle => bail!("a space needs at least one point"),
        SpaceKind::TwoPoint => {
            let rho = parse_nonneg(rho.ok_or_else(|| anyhow!("--rho is required for two-point spaces"))?, "rho")?;
            FiniteMetricSpace::two_point(rho)?
        }
        SpaceKind::Random => random_space(n, max_weight, seed)?,
    };
    let doc = serde_json::to_value(space.to_file())?;
    Ok(Outcome::ok(stamp(doc, "gen-space", seed, &[])))
}

fn rips_cmd(path: &Path, s_str: &str, max_dim: Option<usize>, barycenters: bool, seed: u64) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let s = parse_nonneg(s_str, "s")?;
    let space = io::load_space(path)?;
    let complex = match max_dim {
        Some(k) => rips_with_max_dim(&space, s, k)?,
        None => rips(&space, s)?,
    };
    if barycenters {
        let doc = serde_json::to_value(SamplesFile::from_points(&space, s, &complex.barycenters()))?;
        return Ok(Outcome::ok(stamp(doc, "rips", seed, &inputs)));
    }
    let labels = space.labels();
    let simplices: Vec<Vec<&str>> =
        complex.simplices().iter().map(|sx| sx.iter().map(|&v| labels[v].as_str()).collect()).collect();
    let counts: Vec<usize> = (0..=complex.max_dim()).map(|k| complex.simplices_of_dim(k).count()).collect();
    let params = json!({ "s": format_rat(&s), "max_dim": complex.max_dim() });
    let result = json!({ "simplices": simplices, "counts_by_dim": counts });
    Ok(Outcome::ok(envelope("rips.v1", "rips", seed, &inputs, params, result)))
}

fn sampled_json(f: &SampledFunctionMatrix, space: &FiniteMetricSpace) -> Value {
    let labels = space.labels();
    let values: Vec<Value> = f
        .domain_samples
        .iter()
        .zip(&f.values)
        .map(|(x, v)| {
            let weights: serde_json::Map<String, Value> =
                x.weights().iter().map(|(&i, w)| (labels[i].clone(), json!(format_rat(w)))).collect();
            let trace: f64 = (0..v.dim()).map(|i| v.entries()[(i, i)].re).sum();
            json!({
                "sample": weights,
                "defect": projection_defect(v.entries()),
                "self_adjoint_defect": v.self_adjoint_defect(),
                "trace": trace,
                "propagation": format_rat(&v.propagation()),
                "entries": io::entries_to_rows(v.entries()),
            })
        })
        .collect();
    json!({
        "scale": format_rat(&f.scale),
        "fiber_dim": f.values.first().map(|v| v.fiber_dim()),
        "space": space.to_file(),
        "equivariance_residual": f.equivariance_residual,
        "values": values,
    })
}

fn assembly_reject(
    schema: &str,
    command: &str,
    seed: u64,
    inputs: &[InputHash],
    params: Value,
    e: AssemblyError,
) -> Result<Outcome> {
    match e {
        AssemblyError::UnsupportedSample(_)
        | AssemblyError::NonUnitVector(_)
        | AssemblyError::EquivarianceFailed(_)
        | AssemblyError::ScaleTooSmall(_) => {
            let result = json!({ "verdict": "reject", "reason": e.to_string() });
            Ok(Outcome::with_code(EXIT_REJECT, envelope(schema, command, seed, inputs, params, result)))
        }
        other => Err(anyhow!(other)),
    }
}

fn px_cmd(path: &Path, action: Option<&Path>, seed: u64) -> Result<Outcome> {
    let mut paths = vec![path];
    paths.extend(action);
    let inputs = hash_inputs(&paths)?;
    let (space, scale, points) = io::load_samples(path)?;
    let action = action.map(|a| io::load_action(a, &space)).transpose()?;
    let params = json!({ "scale": format_rat(&scale), "samples": points.len(), "action": action.is_some() });
    match mishchenko_px(&space, scale, &points, action.as_ref()) {
        Ok(f) => Ok(Outcome::ok(envelope("px.v1", "px", seed, &inputs, params, sampled_json(&f, &space)))),
        Err(e) => assembly_reject("px.v1", "px", seed, &inputs, params, e),
    }
}

fn parse_group(name: &str) -> Result<(FiniteGroup, Vec<usize>)> {
    let name = name.trim().to_ascii_lowercase();
    if name == "s3" {
        return Ok((FiniteGroup::symmetric3(), vec![1, 2]));
    }
    let n: usize = name
        .strip_prefix("cyclic:")
        .ok_or_else(|| anyhow!("group must be cyclic:N or s3, got {name:?}"))?
        .parse()
        .context("cyclic order must be a positive integer")?;
    if n == 0 {
        bail!("cyclic order must be positive");
    }
    let mut gens = vec![1 % n, (n - 1) % n];
    gens.dedup();
    Ok((FiniteGroup::cyclic(n), gens))
}

fn group_proj_cmd(group_spec: &str, d_s: &str, gens: Option<&str>, seed: u64) -> Result<Outcome> {
    let (group, default_gens) = parse_group(group_spec)?;
    let gens = match gens {
        Some(g) => {
            g.split(',').map(|s| s.trim().parse::<usize>().context("generator index")).collect::<Result<Vec<_>>>()?
        }
        None => default_gens,
    };
    let d = parse_nonneg(d_s, "d")?;
    let params = json!({ "group": group_spec, "gens": gens, "d": format_rat(&d) });
    let computed = default_group_sample(&group, &gens, d).and_then(|x| {
        let p = group_projection_at(&group, &gens, d, &x)?;
        let residual = invariance_defect(&group, &gens, d, &x)?;
        Ok((x, p, residual))
    });
    let (x, p, residual) = match computed {
        Ok(v) => v,
        Err(e) => return assembly_reject("group-proj.v1", "group-proj", seed, &[], params, e),
    };
    let weights: serde_json::Map<String, Value> =
        x.weights().iter().map(|(&g, w)| (format!("g{g}"), json!(format_rat(w)))).collect();
    let result = json!({
        "sample": weights,
        "defect": projection_defect(p.entries()),
        "self_adjoint_defect": p.self_adjoint_defect(),
        "propagation": format_rat(&p.propagation()),
        "invariance_residual": residual,
        "matrix": MatrixFile::inline(&p),
    });
    Ok(Outcome::ok(envelope("group-proj.v1", "group-proj", seed, &[], params, result)))
}

fn parse_fiber_vector(s: &str) -> Result<Vec<C64>> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let (re, im) = match part.split_once(':') {
                Some((a, b)) => (a, b),
                None => (part, "0"),
            };
            Ok(C64::new(re.trim().parse().context("fiber entry")?, im.trim().parse().context("fiber entry")?))
        })
        .collect()
}

fn roe_proj_cmd(path: &Path, xi_s: &str, seed: u64) -> Result<Outcome> {
    let inputs = hash_inputs(&[path])?;
    let xi = parse_fiber_vector(xi_s)?;
    let (space, scale, points) = io::load_samples(path)?;
    let params = json!({ "scale": format_rat(&scale), "xi": xi_s, "samples": points.len() });
    match roe_projection(&space, scale, &xi, &points) {
        Ok(f) => Ok(Outcome::ok(envelope("roe-proj.v1", "roe-proj", seed, &inputs, params, sampled_json(&f, &space)))),
        Err(e) => assembly_reject("roe-proj.v1", "roe-proj", seed, &inputs, params, e),
    }
}
