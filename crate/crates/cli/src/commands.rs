//! One function per subcommand.

use crate::config::{parse_gammas, Bc, CommandKind, Dir, Flags};
use crate::output::{complex, complex_list, json_text, num, write_text, Csv};
use kl_strip::clamped_strip::{radiating_solution, Bump, ClampedStrip, ContourSpec, SourceTerm};
use kl_strip::fem::{EndCondition, FemProblem, RectHole, StripMesh};
use kl_strip::physics::{absorption_trajectory, damping_slope, group_velocity, phase_velocity, WaveSpeed};
use kl_strip::scattering::{check_cutoff, default_cutoff, lifted_source, scattering_matrix, scattering_row, Direction, IncidentMode, ScatteringConfig};
use kl_strip::spectrum::{complex_exponents, propagating_etas, simply_supported_count, simply_supported_exponents, thresholds, ExponentClass, SearchRegion};
use kl_strip::{BoundaryKind, Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

pub fn dispatch(kind: CommandKind, f: &Flags) -> Result<()> {
    let start = Instant::now();
    let (csv, mut summary) = match kind {
        CommandKind::Thresholds => thresholds_cmd(f)?,
        CommandKind::Modes => modes_cmd(f)?,
        CommandKind::Dispersion => dispersion_cmd(f)?,
        CommandKind::SolveStrip => solve_strip_cmd(f)?,
        CommandKind::Scatter => scatter_cmd(f)?,
        CommandKind::ClampedSolve => clamped_solve_cmd(f)?,
        CommandKind::Labs => labs_cmd(f)?,
    };
    summary["status"] = json!("ok");
    summary["rows"] = json!(csv.n_rows());
    summary["runtime_s"] = json!(start.elapsed().as_secs_f64());
    write_text(f.out.as_deref(), &csv.text())?;
    match (&f.summary, &f.out) {
        (Some(p), _) => write_text(Some(p), &json_text(&summary)),
        (None, Some(_)) => write_text(None, &json_text(&summary)),
        // The CSV already went to stdout.
        (None, None) => Ok(()),
    }
}

fn bc_or(f: &Flags, default: Bc) -> BoundaryKind {
    f.bc.unwrap_or(default).into()
}

fn bc_name(bc: BoundaryKind) -> &'static str {
    match bc {
        BoundaryKind::SimplySupported => "simply",
        BoundaryKind::Clamped => "clamped",
    }
}

fn class_name(c: ExponentClass) -> &'static str {
    match c {
        ExponentClass::Propagating => "propagating",
        ExponentClass::RealEvanescent => "real",
        ExponentClass::Complex => "complex",
        ExponentClass::Zero => "zero",
    }
}

fn hole(f: &Flags) -> Result<Option<RectHole>> {
    f.hole.as_deref().map(RectHole::parse).transpose()
}

fn thresholds_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let bc = bc_or(f, Bc::Clamped);
    let t = thresholds(bc, f.n.unwrap_or(5))?;
    let mut csv = Csv::new(&["n", "k_n", "asymptote"]);
    for (i, (k, a)) in t.k.iter().zip(&t.asymptote).enumerate() {
        csv.row(vec![(i + 1).to_string(), num(*k), num(*a)]);
    }
    Ok((csv, json!({ "command": "thresholds", "bc": bc_name(bc), "k": t.k })))
}

fn modes_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let k = f.k()?;
    let bc = bc_or(f, Bc::Simply);
    let exps = match bc {
        BoundaryKind::SimplySupported => simply_supported_exponents(k, f.pmax.unwrap_or(10))?,
        BoundaryKind::Clamped => complex_exponents(k, bc, &SearchRegion::default_for(k))?,
    };
    let mut csv = Csv::new(&["index", "re", "im", "class", "alg_mult", "geom_mult"]);
    for e in &exps {
        csv.row(vec![
            e.index.map_or(String::new(), |p| p.to_string()),
            num(e.lambda.re),
            num(e.lambda.im),
            class_name(e.class).into(),
            e.alg_mult.to_string(),
            e.geom_mult.to_string(),
        ]);
    }
    let n_prop: usize = exps.iter().filter(|e| e.class == ExponentClass::Propagating).map(|e| e.geom_mult).sum();
    Ok((csv, json!({ "command": "modes", "bc": bc_name(bc), "k": k, "n_exponents": exps.len(), "n_propagating": n_prop })))
}

fn dispersion_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let bc = bc_or(f, Bc::Clamped);
    let c = f.c()?;
    let (kmin, kmax, nk) = (f.kmin.unwrap_or(1.0), f.kmax.unwrap_or(12.0), f.nk.unwrap_or(111));
    if !(kmin > 0.0 && kmax > kmin && nk >= 2) {
        return Err(Error::InvalidParameter(format!("need 0 < kmin < kmax and nk >= 2, got {kmin}, {kmax}, {nk}")));
    }
    let speed = WaveSpeed::new(c)?;
    let mut csv = Csv::new(&["k", "omega", "p", "eta", "group_velocity", "phase_velocity"]);
    let mut skipped = Vec::new();
    for i in 0..nk {
        let k = kmin + (kmax - kmin) * i as f64 / (nk - 1) as f64;
        let etas = match propagating_etas(k, bc) {
            Ok(e) => e,
            Err(Error::ThresholdWavenumber { .. }) => {
                skipped.push(k);
                continue;
            }
            Err(e) => return Err(e),
        };
        for (j, eta) in etas.iter().enumerate() {
            let p = j + 1;
            csv.row(vec![
                num(k),
                num(speed.omega(k)),
                p.to_string(),
                num(*eta),
                num(group_velocity(p, k, bc, c)?),
                num(phase_velocity(p, k, bc, c)?),
            ]);
        }
    }
    Ok((csv, json!({ "command": "dispersion", "bc": bc_name(bc), "c": c, "skipped_thresholds": skipped })))
}

fn strip_mesh(f: &Flags) -> Result<StripMesh> {
    StripMesh::new(f.l.unwrap_or(1.5), f.nx.unwrap_or(160), f.ny.unwrap_or(40), hole(f)?)
}

fn solve_strip_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let k = f.k()?;
    if bc_or(f, Bc::Simply) != BoundaryKind::SimplySupported {
        return Err(Error::InvalidParameter("solve-strip needs a simply supported strip (the DtN map exists only there)".into()));
    }
    let mesh = strip_mesh(f)?;
    let l = mesh.l;
    let zeta = default_cutoff(l);
    check_cutoff(&zeta, &mesh)?;
    let dir = match f.dir.unwrap_or(Dir::Plus) {
        Dir::Plus => Direction::Plus,
        Dir::Minus => Direction::Minus,
    };
    let mode = IncidentMode::new(f.p.unwrap_or(1), dir, k)?;
    let n = simply_supported_count(k);
    let (nx, ny) = (mesh.nx, mesh.ny);
    let problem = FemProblem::new(mesh, k, 0.3, BoundaryKind::SimplySupported, EndCondition::Dtn)?.with_p_max(f.pmax.unwrap_or(kl_strip::dtn::DEFAULT_P_MAX).max(n));
    let system = problem.assemble()?;
    let v = system.solve(&system.load_vector(&lifted_source(&mode, &zeta), 6))?;
    let row = scattering_row(&v, &mode, l)?;
    let energy: f64 = row.iter().map(|z| z.norm_sqr()).sum();

    let mut csv = Csv::new(&["x", "y", "re_u", "im_u"]);
    for i in 0..=nx {
        let x = -l + 2.0 * l * i as f64 / nx as f64;
        for j in 0..=ny {
            let y = j as f64 / ny as f64;
            if let Some(d) = v.eval(x, y) {
                let u = d.value() + zeta.eval(x)[0] * mode.eval(x, y);
                csv.row(vec![num(x), num(y), num(u.re), num(u.im)]);
            }
        }
    }
    Ok((
        csv,
        json!({
            "command": "solve-strip",
            "k": k,
            "p": mode.p,
            "n_propagating": n,
            "right_going": complex_list(&row[..n]),
            "left_going": complex_list(&row[n..]),
            "energy_defect": (energy - 1.0).abs(),
        }),
    ))
}

fn scatter_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let k = f.k()?;
    let mesh = strip_mesh(f)?;
    let (nx, ny, l) = (mesh.nx, mesh.ny, mesh.l);
    let cfg = ScatteringConfig { p_max: f.pmax.unwrap_or(kl_strip::dtn::DEFAULT_P_MAX), ..Default::default() };
    let s = scattering_matrix(k, mesh, &cfg)?;
    let mut csv = Csv::new(&["i", "j", "re", "im"]);
    for i in 0..2 * s.n {
        for j in 0..2 * s.n {
            let z = s.entry(i, j);
            csv.row(vec![i.to_string(), j.to_string(), num(z.re), num(z.im)]);
        }
    }
    Ok((
        csv,
        json!({
            "command": "scatter",
            "k": k,
            "nx": nx,
            "ny": ny,
            "L": l,
            "n": s.n,
            "S_re": s.s_re,
            "S_im": s.s_im,
            "unitarity_defect": s.unitarity_defect,
            "symmetry_defect": s.symmetry_defect,
            "row_energy": s.row_energy(),
        }),
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    xs: Vec<f64>,
    ys: Vec<f64>,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

/// Source file format: `{"bumps": [...]}` or `{"grid": {xs, ys, re, im}}`.
#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum SourceSpec {
    Bumps(Vec<Bump>),
    Grid(GridSpec),
}

fn load_source(path: &PathBuf) -> Result<SourceTerm> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read source {}: {e}", path.display())))?;
    let spec: SourceSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("source {}: {e}", path.display())))?;
    let term = match spec {
        SourceSpec::Bumps(b) => SourceTerm::Bumps(b),
        SourceSpec::Grid(g) => {
            let values = g
                .re
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &r)| C64::new(r, g.im.as_ref().and_then(|m| m.get(i)?.get(j).copied()).unwrap_or(0.0)))
                        .collect()
                })
                .collect();
            SourceTerm::Grid { xs: g.xs, ys: g.ys, values }
        }
    };
    term.validate()?;
    Ok(term)
}

/// Two smooth random bumps, reproducible from `seed`.
pub fn random_source(seed: u64) -> SourceTerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps = (0..2)
        .map(|_| Bump {
            center: rng.gen_range(-0.5..0.5),
            half_width: rng.gen_range(0.3..0.6),
            power: 8,
            amplitude: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            y_poly: (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        })
        .collect();
    SourceTerm::Bumps(bumps)
}

fn clamped_solve_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let k = f.k()?;
    let source = match &f.source {
        Some(p) => load_source(p)?,
        None => random_source(f.seed.unwrap_or(0)),
    };
    let strip = ClampedStrip::new(k)?;
    let mut spec = ContourSpec::default_for(&strip);
    if let Some(b) = f.beta {
        spec = spec.with_beta(b);
    }
    let sol = radiating_solution(&strip, &source, &spec)?;
    let (x0, x1) = source.support();
    let reach = x0.abs().max(x1.abs());
    let l = f.l.unwrap_or(reach + 0.25);
    let (fa, fb) = sol.flux_coefficients(2.0 * l + 0.5)?;
    let (a, b) = (sol.a(), sol.b());
    let mismatch = a.iter().zip(&fa).chain(b.iter().zip(&fb)).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);

    let (nxs, nys) = (f.nx.unwrap_or(121), f.ny.unwrap_or(21));
    if nxs < 2 || nys < 2 {
        return Err(Error::InvalidParameter("need at least two samples per direction".into()));
    }
    let xmax = 2.0 * l + 3.0;
    let xs: Vec<f64> = (0..nxs).map(|i| -xmax + 2.0 * xmax * i as f64 / (nxs - 1) as f64).collect();
    let ys: Vec<f64> = (0..nys).map(|j| j as f64 / (nys - 1) as f64).collect();
    let d = sol.decompose(l, &xs, &ys);
    let mut csv = Csv::new(&["x", "y", "re_u", "im_u", "re_remainder", "im_remainder"]);
    for (i, &x) in xs.iter().enumerate() {
        let c = sol.stack(x);
        for (j, &y) in ys.iter().enumerate() {
            let u = strip.grid().eval(&c[0], y)[0];
            let r = d.remainder[i][j];
            csv.row(vec![num(x), num(y), num(u.re), num(u.im), num(r.re), num(r.im)]);
        }
    }
    let coeffs = json!({
        "k": k,
        "beta": sol.contour.beta,
        "L": l,
        "a": complex_list(&a),
        "b": complex_list(&b),
        "flux_a": complex_list(&fa),
        "flux_b": complex_list(&fb),
        "eta": strip.modes.iter().map(|m| m.eta).collect::<Vec<_>>(),
        "coefficient_mismatch": mismatch,
        "quadrature_error": sol.contour.quadrature_error,
        "decay_right": d.decay_right,
        "decay_left": d.decay_left,
    });
    if let Some(p) = &f.coeffs {
        write_text(Some(p), &json_text(&coeffs))?;
    }
    let mut summary = coeffs;
    summary["command"] = json!("clamped-solve");
    Ok((csv, summary))
}

fn labs_cmd(f: &Flags) -> Result<(Csv, Value)> {
    let k = f.k.unwrap_or(6.0);
    let p = f.p.unwrap_or(1);
    let bc = bc_or(f, Bc::Clamped);
    let c = f.c()?;
    let gammas = parse_gammas(f.gammas.as_deref().unwrap_or("1e-2..1e-6"))?;
    let t = absorption_trajectory(p, k, bc, c, &gammas)?;
    let mut csv = Csv::new(&["gamma", "re", "im"]);
    for (g, e) in t.gammas.iter().zip(&t.eta_gamma) {
        csv.row(vec![num(*g), num(e.re), num(e.im)]);
    }
    // Slope of iη^γ at γ = 0 from the two smallest dampings (Richardson).
    let n = gammas.len();
    let slope = (n >= 2).then(|| {
        let lam = |i: usize| (C64::new(0.0, 1.0) * t.eta_gamma[i] - C64::new(0.0, t.limit)) / gammas[i];
        let (g1, g2) = (gammas[n - 2], gammas[n - 1]);
        (g1 * lam(n - 1) - g2 * lam(n - 2)) / (g1 - g2)
    });
    Ok((
        csv,
        json!({
            "command": "labs",
            "bc": bc_name(bc),
            "k": k,
            "p": p,
            "c": c,
            "limit": t.limit,
            "limiting_absorption": t.is_limiting_absorption(),
            "min_gap": t.min_gap,
            "close_modes": t.close_modes,
            "predicted_slope": damping_slope(p, k, c, bc)?,
            "measured_slope": slope.map(complex),
        }),
    ))
}
