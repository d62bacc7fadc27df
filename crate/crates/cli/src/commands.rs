use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use sl3t::acceptance;
use sl3t::legendre::{holder_bound, LegendreTable};
use sl3t::report::{save_json, CsvTable, RunManifest};
use sl3t::repsim::{coefficient_decay, empirical_exponent, invariant_gap};
use sl3t::schatten::{
    combined_vector_bound, defect_matrix, interpolation_bound, interpolation_theta, mixed_norm_lower_bound,
    MixedNormSpace, SingularProfile, TypeCotype,
};
use sl3t::sl3::embedding::{embedding2_solve, quarter_turn};
use sl3t::sl3::{kak, Mat3};
use sl3t::spectral::{
    defect_diagonal, divergence_probe_p4, dyadic_delta_grid, fit_power_law, op_norm_limit,
    schatten_limit, DecayFit, Exponent, TruncationPolicy,
};
use sl3t::sphere::{mixing_profile, MarkovTrace, Vec3};
use sl3t::zigzag::{
    annulus_diameter_bound, annulus_point, cauchy_tail_constant, diameter_decay_profile, AnnulusCertificate,
    ExponentProfile,
};
use sl3t::Error;

use crate::{Cli, Command};

/// Exit status and message of a failed run.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

/// 3 for numerical degeneracy, 1 for a failed check, 2 for bad input.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_degenerate() {
            3
        } else if e.is_check_failure() {
            1
        } else {
            2
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Collects outputs and writes the manifest last.
struct Run<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl<'a> Run<'a> {
    fn new(dir: &'a Path, manifest: RunManifest) -> Result<Self, Failure> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir, manifest })
    }

    fn csv(&mut self, name: &str, table: &CsvTable) -> Outcome {
        table.save(&self.dir.join(name))?;
        self.manifest.outputs.push(PathBuf::from(name));
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Outcome {
        save_json(value, &self.dir.join(name))?;
        self.manifest.outputs.push(PathBuf::from(name));
        Ok(())
    }

    fn finish(self) -> Outcome {
        let name = format!("{}.manifest.json", self.manifest.command);
        save_json(&self.manifest, &self.dir.join(&name))?;
        println!("wrote {} files and {name} to {}", self.manifest.outputs.len(), self.dir.display());
        Ok(())
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn run(cli: &Cli) -> Outcome {
    let dir = cli.out_dir.as_path();
    match &cli.command {
        Command::LegendreBounds(a) => legendre_bounds(dir, a),
        Command::TdeltaNorms(a) => tdelta_norms(dir, a),
        Command::SchattenProbe(a) => schatten_probe(dir, a),
        Command::MixedNorm(a) => mixed_norm(dir, a),
        Command::Kak(a) => kak_command(dir, a),
        Command::Embedding2(a) => embedding2(dir, a),
        Command::Zigzag(a) => zigzag(dir, a),
        Command::Markov(a) => markov(dir, a),
        Command::HoweMoore(a) => howe_moore(dir, a),
        Command::InvariantGap(a) => gap(dir, a),
        Command::CheckAll => check_all(dir),
        Command::Replay(a) => replay(dir, &a.manifest),
    }
}

fn legendre_bounds(dir: &Path, a: &crate::LegendreBounds) -> Outcome {
    if a.grid < 2 {
        return Err(Failure::usage("--grid must be at least 2"));
    }
    let mut run = Run::new(dir, RunManifest::new("legendre-bounds").param("nmax", a.nmax).param("grid", a.grid))?;
    let zero = LegendreTable::new(a.nmax, 0.0)?;
    let mut table = CsvTable::new(&["delta", "max_defect", "argmax_n", "bound", "ratio"])
        .comment("Hölder continuity of the Legendre spectrum at 0: max_n |P_n(0) - P_n(delta)| <= 4 sqrt|delta|")
        .comment(format!("degrees 0..={}", a.nmax));
    let mut violations = 0;
    for d in linspace(-1.0, 1.0, a.grid) {
        let t = LegendreTable::new(a.nmax, d)?;
        let (n, m) = zero
            .values()
            .iter()
            .zip(t.values())
            .map(|(x, y)| (x - y).abs())
            .enumerate()
            .fold((0, 0.0), |b, c| if c.1 > b.1 { c } else { b });
        let bound = holder_bound(d);
        if m > bound {
            violations += 1;
        }
        let ratio = if bound > 0.0 { m / bound } else { 0.0 };
        table.push(vec![d.into(), m.into(), n.into(), bound.into(), ratio.into()]);
    }
    run.csv("legendre_bounds.csv", &table)?;
    run.finish()?;
    println!("{violations} violations of |P_n(0) - P_n(δ)| <= 4√|δ|");
    if violations > 0 {
        return Err(Failure::check(format!("check `holder bound` failed: {violations} violations")));
    }
    Ok(())
}

fn parse_exponent(s: &str) -> Result<Exponent, Failure> {
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(Exponent::Infinity);
    }
    let p: f64 = s.parse().map_err(|_| Failure::usage(format!("invalid exponent `{s}`")))?;
    Ok(Exponent::finite(p)?)
}

fn tdelta_norms(dir: &Path, a: &crate::TdeltaNorms) -> Outcome {
    let exps = a.p.iter().map(|s| parse_exponent(s)).collect::<Result<Vec<_>, _>>()?;
    let deltas = if a.deltas.is_empty() { dyadic_delta_grid(10) } else { a.deltas.clone() };
    let policy = TruncationPolicy {
        max_degree: a.nmax,
        start: TruncationPolicy::default().start.min(a.nmax),
        ..TruncationPolicy::default()
    };
    let mut run = Run::new(
        dir,
        RunManifest::new("tdelta-norms")
            .param("p", &a.p)
            .param("deltas", &a.deltas)
            .param("nmax", a.nmax),
    )?;
    let mut table = CsvTable::new(&["delta", "p", "N", "value", "relative_change", "converged"])
        .comment("Schatten-class membership of T_0 - T_delta for p > 4 and decay like delta^(1/2 - 2/p)")
        .comment("finite p: windowed doubling estimate; p = inf: certified operator norm");
    let mut fits: Vec<DecayFit> = Vec::new();
    for &p in &exps {
        let mut grid = Vec::new();
        for &d in &deltas {
            if !(d > 0.0 && d <= 0.5) {
                return Err(Error::Domain { what: "delta", value: d, domain: "(0, 1/2]" }.into());
            }
            let (n, value, change, ok) = match p {
                Exponent::Infinity => {
                    let r = op_norm_limit(d, a.nmax)?;
                    (r.truncation, r.certified(), 0.0, r.head_dominates)
                }
                Exponent::Finite(pf) => {
                    let r = schatten_limit(d, pf, &policy)?;
                    (r.degree(), r.value(), r.relative_change, r.stabilized)
                }
            };
            table.push(vec![d.into(), p.to_string().into(), n.into(), value.into(), change.into(), ok.into()]);
            grid.push((d, value));
        }
        let fit = fit_power_law(p, grid)?;
        println!(
            "p = {p}: exponent {:.6} (expected {:.6}), constant {:.6}",
            fit.exponent,
            p.decay_exponent(),
            fit.constant
        );
        fits.push(fit);
    }
    run.csv("tdelta_norms.csv", &table)?;
    run.json("decay_fit.json", &fits)?;
    run.finish()
}

fn schatten_probe(dir: &Path, a: &crate::SchattenProbe) -> Outcome {
    if !a.p4 {
        return Err(Failure::usage("schatten-probe needs --p4 (the boundary exponent is the only probe)"));
    }
    if !(10..=24).contains(&a.kmax) {
        return Err(Failure::usage("--kmax must be in 10..=24"));
    }
    let degrees: Vec<usize> = (10..=a.kmax).map(|k| 1usize << k).collect();
    let mut run = Run::new(
        dir,
        RunManifest::new("schatten-probe")
            .param("p4", true)
            .param("delta", &a.delta)
            .param("kmax", a.kmax),
    )?;
    let mut table = CsvTable::new(&["delta", "N", "partial_sum", "increment", "predicted_increment"])
        .comment("boundary exponent p = 4: dyadic increments of sum (2n+1) P_n(delta)^4 (recorded, not asserted)")
        .comment("predicted_increment = 3 log 2 / (pi^2 (1 - delta^2)) from the Bernstein asymptotics");
    for &d in &a.delta {
        let probe = divergence_probe_p4(d, &degrees)?;
        let predicted = acceptance::p4_increment_prediction(d);
        for (i, (&n, &s)) in probe.degrees.iter().zip(&probe.partial_sums).enumerate() {
            let inc = if i == 0 { f64::NAN } else { probe.increments[i - 1] };
            table.push(vec![d.into(), n.into(), s.into(), inc.into(), predicted.into()]);
        }
        println!(
            "δ = {d}: increments in [{:.6}, {:.6}], predicted {predicted:.6}",
            probe.min_increment(),
            probe.max_increment()
        );
    }
    run.csv("schatten_probe.csv", &table)?;
    run.finish()
}

fn mixed_norm(dir: &Path, a: &crate::MixedNorm) -> Outcome {
    let mut run = Run::new(
        dir,
        RunManifest::new("mixed-norm")
            .param("p", &a.p)
            .param("delta", &a.delta)
            .param("restarts", a.restarts)
            .param("seed", a.seed)
            .param("iters", a.iters)
            .param("truncation", a.truncation)
            .param("inner-dim", a.inner_dim)
            .seed(a.seed),
    )?;
    let mut table = CsvTable::new(&["delta", "p", "lower_bound", "interp_bound", "dyadic_bound"])
        .comment("vector-valued extension of T_0 - T_delta on l2(lp): witnessed lower bound vs interpolation and dyadic upper bounds")
        .comment(format!(
            "truncation {}, inner dimension {}, {} restarts x {} iterations, seed {}; type/cotype constants 1",
            a.truncation, a.inner_dim, a.restarts, a.iters, a.seed
        ));
    let mut violations = 0;
    for &p in &a.p {
        for &d in &a.delta {
            let t = defect_matrix(d, a.truncation)?;
            let space = MixedNormSpace::new(t.nrows(), a.inner_dim, p)?;
            let est = mixed_norm_lower_bound(&t, &space, a.restarts, a.iters, a.seed)?;
            let interp = interpolation_bound(op_norm_limit(d, 1 << 16)?.certified(), 2.0, interpolation_theta(p))?;
            let profile = SingularProfile::from_unsorted(defect_diagonal(d, a.truncation)?.into_iter().map(f64::abs))?;
            let dyadic = combined_vector_bound(&profile, 1.0, &TypeCotype::lp_surrogate(p)?)?.sum;
            if est.value > interp + 1e-9 {
                violations += 1;
            }
            table.push(vec![d.into(), p.into(), est.value.into(), interp.into(), dyadic.into()]);
        }
    }
    run.csv("mixed_norm.csv", &table)?;
    run.finish()?;
    println!("{violations} lower bounds above the interpolation bound");
    if violations > 0 {
        return Err(Failure::check(format!("check `interpolation bound` failed: {violations} violations")));
    }
    Ok(())
}

fn rows(m: &Mat3) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]])
}

#[derive(Serialize)]
struct KakOut {
    k1: [[f64; 3]; 3],
    a: [f64; 3],
    k2: [[f64; 3]; 3],
    residual: f64,
}

fn kak_command(dir: &Path, a: &crate::Kak) -> Outcome {
    let g = Mat3::from_row_slice(&a.matrix);
    let mut run = Run::new(dir, RunManifest::new("kak").param("matrix", &a.matrix))?;
    let d = kak(&g)?;
    let out = KakOut {
        k1: rows(&d.k1),
        a: d.a.to_array(),
        k2: rows(&d.k2),
        residual: d.residual(&g),
    };
    println!("{}", serde_json::to_string(&out).expect("serializable"));
    run.json("kak.json", &out)?;
    run.finish()
}

#[derive(Serialize)]
struct EmbeddingOut {
    gamma: f64,
    alpha: f64,
    beta: f64,
    delta1: f64,
    delta2: f64,
    angles: [f64; 4],
    residual1: f64,
    residual2: f64,
    margins: sl3t::sl3::embedding::Embedding2Margins,
    k2_quarter_turn_error: f64,
}

fn embedding2(dir: &Path, a: &crate::Embedding2) -> Outcome {
    if a.alpha_grid == 0 {
        return Err(Failure::usage("--alpha-grid must be at least 1"));
    }
    let mut run = Run::new(
        dir,
        RunManifest::new("embedding2").param("gamma", &a.gamma).param("alpha-grid", a.alpha_grid),
    )?;
    let mut out = Vec::new();
    for &g in &a.gamma {
        for alpha in linspace(g, 7.0 * g / 6.0, a.alpha_grid) {
            let cert = embedding2_solve(g, alpha)?;
            let margins = cert.verify()?;
            out.push(EmbeddingOut {
                gamma: g,
                alpha,
                beta: cert.beta(),
                delta1: cert.delta1,
                delta2: cert.delta2,
                angles: cert.angles,
                residual1: cert.residual1,
                residual2: cert.residual2,
                margins,
                k2_quarter_turn_error: (cert.k2 - quarter_turn()).abs().max(),
            });
        }
    }
    println!("{} certificates verified", out.len());
    run.json("embedding2.json", &out)?;
    run.finish()
}

fn zigzag(dir: &Path, a: &crate::Zigzag) -> Outcome {
    let prof = ExponentProfile::new(a.s, a.t, a.c, a.l)?;
    let mut run = Run::new(
        dir,
        RunManifest::new("zigzag")
            .param("s", a.s)
            .param("t", a.t)
            .param("C", a.c)
            .param("L", a.l)
            .param("alpha-grid", &a.alpha_grid)
            .param("epsilon", a.epsilon),
    )?;
    let c_prime = cauchy_tail_constant(&prof)?;
    let profile = diameter_decay_profile(&a.alpha_grid, &prof)?;
    let mut table = CsvTable::new(&["alpha", "bound"])
        .comment("Cauchy tail of the annulus covering: C' e^((2t-s) alpha), C' = 6 C L^2 e^s / (1 - e^(2t-s))")
        .comment(format!("C' = {}", sl3t::report::fmt_f64(c_prime)));
    for &(alpha, b) in &profile {
        table.push(vec![alpha.into(), b.into()]);
    }
    // corner-to-corner pairs on both sides of the wall and across it
    let mut ledgers: Vec<AnnulusCertificate> = Vec::new();
    for &alpha in &a.alpha_grid {
        for (p, q) in [
            ((0.0, 0.5, false), (1.0, 0.5, true)),
            ((0.0, 0.0, false), (1.0, 1.0, false)),
            ((1.0, 0.2, true), (0.0, 0.9, true)),
        ] {
            let p = annulus_point(alpha, a.epsilon, p.0, p.1, p.2)?;
            let q = annulus_point(alpha, a.epsilon, q.0, q.1, q.2)?;
            ledgers.push(annulus_diameter_bound(alpha, a.epsilon, &prof, &p, &q)?);
        }
    }
    println!("C' = {c_prime:.6}; {} ledgers within 6CL²e^(-γα)", ledgers.len());
    run.csv("zigzag_profile.csv", &table)?;
    run.json("zigzag_ledgers.json", &ledgers)?;
    run.finish()
}

fn markov(dir: &Path, a: &crate::Markov) -> Outcome {
    let mut run = Run::new(
        dir,
        RunManifest::new("markov")
            .param("delta", a.delta)
            .param("steps", a.steps)
            .param("replicas", a.replicas)
            .param("seed", a.seed)
            .seed(a.seed),
    )?;
    let prof = mixing_profile(a.delta, a.steps, a.replicas, a.seed)?;
    let mut table = CsvTable::new(&["step", "mean_norm", "mc_sigma", "expected"])
        .comment("mean contraction of the circle walk: |E x_k| = |delta|^k")
        .comment(format!("delta {}, {} replicas from e3, seed {}", a.delta, a.replicas, a.seed));
    let mut outside = 0;
    for r in &prof.rows {
        let expected = a.delta.abs().powi(r.step as i32);
        if (r.mean_norm - expected).abs() > 3.0 * r.mc_sigma {
            outside += 1;
        }
        table.push(vec![r.step.into(), r.mean_norm.into(), r.mc_sigma.into(), expected.into()]);
    }
    let trace = MarkovTrace::run(Vec3::z(), a.delta, a.steps, a.seed)?;
    let mut tt = CsvTable::new(&["step", "x1", "x2", "x3"])
        .comment("one trajectory of the circle walk (stream 0 of the seed)");
    for (k, x) in trace.positions.iter().enumerate() {
        tt.push(vec![k.into(), x.x.into(), x.y.into(), x.z.into()]);
    }
    run.csv("markov_profile.csv", &table)?;
    run.csv("markov_trace.csv", &tt)?;
    run.finish()?;
    println!("{outside} of {} steps outside 3 Monte-Carlo sigmas", prof.rows.len());
    Ok(())
}

fn howe_moore(dir: &Path, a: &crate::HoweMoore) -> Outcome {
    let mut run = Run::new(
        dir,
        RunManifest::new("howe-moore").param("band-limit", a.band_limit).param("nmax", a.nmax),
    )?;
    let rows = coefficient_decay(a.nmax, a.band_limit)?;
    let mut table = CsvTable::new(&["n", "c_n", "bound", "leakage"])
        .comment("decay of <pi(diag(e^n, 1, e^-n)) 1, 1> in the quasi-regular representation against 4 e^(-n/2)")
        .comment(format!("graded quadrature for band limit {}; leakage = change under panel halving", a.band_limit));
    for r in &rows {
        table.push(vec![r.n.into(), r.c_n.into(), r.bound.into(), r.leakage.into()]);
    }
    if let Some(e) = empirical_exponent(&rows) {
        println!("empirical decay exponent {e:.4}");
    }
    run.csv("howe_moore.csv", &table)?;
    run.finish()
}

fn gap(dir: &Path, a: &crate::InvariantGap) -> Outcome {
    if a.jmax == 0 {
        return Err(Failure::usage("--jmax must be at least 1"));
    }
    let mut run = Run::new(
        dir,
        RunManifest::new("invariant-gap").param("jmax", a.jmax).param("seed", a.seed).seed(a.seed),
    )?;
    let mut table = CsvTable::new(&["j", "minimum", "oracle", "starts"])
        .comment("almost-invariant vectors: min over unit a in V_j of |a - P_U a| + |a - P_U' a| >= 1/3");
    let mut gaps = Vec::new();
    for j in 1..=a.jmax {
        let g = invariant_gap(j, a.seed)?;
        table.push(vec![j.into(), g.minimum.into(), g.oracle.into(), g.starts.into()]);
        println!("j = {j}: minimum {:.10}", g.minimum);
        gaps.push(g);
    }
    run.csv("invariant_gap.csv", &table)?;
    run.json("invariant_gap.json", &gaps)?;
    run.finish()
}

fn check_all(dir: &Path) -> Outcome {
    let mut run = Run::new(dir, RunManifest::new("check-all").seed(acceptance::ACCEPTANCE_SEED))?;
    let mut outcomes = Vec::new();
    for check in acceptance::CHECKS {
        let o = check();
        println!("{}", o.line());
        outcomes.push(o);
    }
    // timings vary between runs, so they are left out of the file
    let stable: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut v = serde_json::to_value(o).expect("serializable");
            v.as_object_mut().expect("object").remove("seconds");
            v
        })
        .collect();
    run.json("acceptance.json", &stable)?;
    run.finish()?;
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    if failed.is_empty() {
        println!("all {} checks passed", outcomes.len());
        Ok(())
    } else {
        Err(Failure::check(format!("failed checks: {}", failed.join(", "))))
    }
}

/// Rebuild the command line from a manifest's parameters.
fn manifest_args(m: &RunManifest, dir: &Path) -> Result<Vec<String>, Failure> {
    let mut args = vec!["sl3t".to_string(), "--out-dir".into(), dir.display().to_string(), m.command.clone()];
    for (k, v) in &m.parameters {
        let flag = format!("--{k}");
        match v {
            Value::Bool(true) => args.push(flag),
            Value::Bool(false) => {}
            Value::Array(items) => {
                if items.is_empty() {
                    continue;
                }
                args.push(flag);
                for i in items {
                    args.push(scalar(i)?);
                }
            }
            other => {
                args.push(flag);
                args.push(scalar(other)?);
            }
        }
    }
    Ok(args)
}

fn scalar(v: &Value) -> Result<String, Failure> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        other => Err(Failure::usage(format!("unsupported manifest parameter {other}"))),
    }
}

fn replay(dir: &Path, path: &Path) -> Outcome {
    let text = fs::read_to_string(path)?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("invalid manifest {}: {e}", path.display())))?;
    if m.command == "replay" {
        return Err(Failure::usage("a manifest cannot replay a replay"));
    }
    let cli = Cli::try_parse_from(manifest_args(&m, dir)?).map_err(|e| Failure::usage(e.to_string()))?;
    run(&cli)
}
