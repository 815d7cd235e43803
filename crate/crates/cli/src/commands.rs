use std::path::Path;

use anyhow::anyhow;
use ugen::bench::{
    gen_banded_quadrics, gen_cyclic, gen_katsura, gen_mle_symmetric, projectivize, random_data,
    run_dropped_equation_experiment, BenchReport, ExperimentConfig, Method,
};
use ugen::io::{check_solutions, SolutionFile, SystemFile};
use ugen::tracker::{classify_endpoint, FiniteCriterion, TrackerSettings};
use ugen::ugen::UElimination;
use ugen::witness::total_degree_solve;
use ugen::{rng, PolySystem};

use crate::output::{read_json, write_json_atomic};
use crate::{Failure, Family, FamilyArgs, SolveMethod, TrackerArgs};

type Outcome = std::result::Result<(), Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn numerical(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Numerical(e.into())
}

/// Largest entry of the random likelihood data.
const MLE_DATA_MAX: u32 = 10;

fn family_system(a: &FamilyArgs, seed: u64) -> std::result::Result<(String, PolySystem), Failure> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(anyhow!("--{flag} is required for this family")));
    let (name, f) = match a.family {
        Family::Katsura => (format!("katsura-{}", a.n), gen_katsura(a.n)),
        Family::Cyclic => (format!("cyclic-{}", a.n), gen_cyclic(a.n)),
        Family::Banded => {
            let k = need(a.k, "k")?;
            (format!("banded-{}-{k}", a.n), gen_banded_quadrics(a.n, k, seed))
        }
        Family::Mle => {
            let r = need(a.r, "r")?;
            let u = random_data(a.n, MLE_DATA_MAX, seed);
            (format!("mle-{}-{r}", a.n), gen_mle_symmetric(a.n, r, &u).map(|m| m.system))
        }
    };
    Ok((name, f.map_err(usage)?))
}

/// Tracker settings for `f`: the tighter likelihood settings on products of
/// projective spaces, the defaults otherwise, then the flag overrides.
fn experiment_config(f: &PolySystem, t: &TrackerArgs) -> std::result::Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::default();
    let mut s = if f.ring().ngroups() > 1 {
        TrackerSettings::mle()
    } else {
        TrackerSettings::default()
    };
    s.seed = t.seed;
    if let Some(m) = t.min_step {
        s.min_step = m;
        s.initial_step = s.initial_step.max(m);
    }
    if let Some(c) = t.max_corr_steps {
        s.max_corrector_iters = c;
    }
    if let Some(th) = t.infinity_threshold {
        s.infinity_threshold = th;
    }
    s.validate().map_err(usage)?;
    if let Some(e) = t.epsilon {
        if !(e > 0.0 && e < 1.0) {
            return Err(usage(anyhow!("--epsilon must lie in (0, 1)")));
        }
        cfg.epsilon = e;
    }
    if let Some(ts) = t.eliminate_after {
        if !(0.0..1.0).contains(&ts) {
            return Err(usage(anyhow!("--eliminate-after must lie in [0, 1)")));
        }
        cfg.eliminate = Some((UElimination::HomotopyEquation, ts));
    }
    cfg.curve_settings.seed = t.seed;
    cfg.settings = s;
    Ok(cfg)
}

pub fn gen(a: &FamilyArgs, seed: u64, out: &Path) -> Outcome {
    let (name, f) = family_system(a, seed)?;
    write_json_atomic(out, &SystemFile::from_system(&f)).map_err(usage)?;
    println!("{name}: {} equations in {} variables -> {}", f.len(), f.nvars(), out.display());
    Ok(())
}

pub fn solve(method: SolveMethod, system: &Path, out: &Path, drop: Option<usize>, t: &TrackerArgs) -> Outcome {
    let file: SystemFile = read_json(system).map_err(usage)?;
    let f = file.to_system().map_err(usage)?;
    let cfg = experiment_config(&f, t)?;
    let name = system
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (solved, label, points, finite, failed) = match method {
        SolveMethod::Ugen | SolveMethod::Regen => {
            let m = if method == SolveMethod::Ugen {
                Method::Ugen
            } else {
                Method::Regen
            };
            let which = drop.unwrap_or(f.len().saturating_sub(1));
            if which >= f.len() {
                return Err(usage(anyhow!("--drop {which} but the system has {} equations", f.len())));
            }
            let e = run_dropped_equation_experiment(&name, &f, which, m, &cfg).map_err(numerical)?;
            let r = &e.report;
            println!(
                "{name} ({m}): {} distinct finite solutions, {} paths ({} prep), {} at infinity, {} failed or singular",
                r.distinct_solutions,
                r.paths_prep + r.paths_main,
                r.paths_prep,
                r.at_infinity,
                r.failures
            );
            (e.system, m.to_string(), e.solutions, e.finite, e.stats.failures)
        }
        SolveMethod::TotalDegree => {
            let h = projectivize(&f).map_err(usage)?;
            let mut r = rng::stream(t.seed, 0);
            let s = total_degree_solve(&h, &cfg.settings, &mut r).map_err(numerical)?;
            let crit = FiniteCriterion::from_ring(h.ring());
            let th = cfg.settings.infinity_threshold;
            let (mut pts, inf): (Vec<_>, Vec<_>) = s
                .points
                .into_iter()
                .partition(|p| classify_endpoint(p, &crit, th).is_finite());
            let finite = pts.len();
            pts.extend(inf);
            println!(
                "{name} (total-degree): {finite} distinct finite solutions, {} paths, {} at infinity, {} failed",
                s.stats.paths, s.stats.at_infinity, s.stats.failures
            );
            (h, "total-degree".to_string(), pts, finite, s.stats.failures)
        }
    };
    let sol = SolutionFile::new(&solved, &label, t.seed, &points, finite);
    write_json_atomic(out, &sol).map_err(usage)?;
    if failed > 0 {
        return Err(numerical(anyhow!(
            "{failed} paths failed; the {} solutions found were written to {}",
            points.len(),
            out.display()
        )));
    }
    Ok(())
}

pub fn bench(a: &FamilyArgs, out: Option<&Path>, t: &TrackerArgs) -> Outcome {
    let (name, f) = family_system(a, t.seed)?;
    let cfg = experiment_config(&f, t)?;
    let which = f.len() - 1;
    let methods: &[Method] = if f.ring().ngroups() == 1 {
        &[Method::Regen, Method::Ugen]
    } else {
        &[Method::Ugen]
    };
    let mut reports: Vec<BenchReport> = Vec::new();
    let mut failure = None;
    for &m in methods {
        match run_dropped_equation_experiment(&name, &f, which, m, &cfg) {
            Ok(e) => reports.push(e.report),
            Err(e) => {
                failure = Some(anyhow!("{m}: {e}"));
                break;
            }
        }
    }
    print_table(&reports);
    if let Some(path) = out {
        write_json_atomic(path, &reports).map_err(usage)?;
    }
    match failure {
        Some(e) => Err(numerical(e)),
        None => Ok(()),
    }
}

fn print_table(reports: &[BenchReport]) {
    println!(
        "{:<14} {:>6} {:>11} {:>11} {:>9} {:>9} {:>7} {:>10}",
        "system", "method", "# solutions", "# paths", "prep", "main", "failed", "time [s]"
    );
    for r in reports {
        println!(
            "{:<14} {:>6} {:>11} {:>11} {:>9} {:>9} {:>7} {:>10.3}",
            r.system,
            r.method.to_string(),
            r.distinct_solutions,
            r.paths_prep + r.paths_main,
            r.paths_prep,
            r.paths_main,
            r.failures,
            r.wall_time
        );
    }
    if let [regen, ugen] = reports {
        if regen.wall_time > 0.0 {
            println!("t_ugen / t_regen = {:.2}", ugen.wall_time / regen.wall_time);
        }
    }
    println!("(timings are local to this machine and not comparable across hardware)");
}

pub fn verify(system: &Path, solutions: &Path, tol: f64) -> Outcome {
    let file: SystemFile = read_json(system).map_err(usage)?;
    let f = file.to_system().map_err(usage)?;
    let sols: SolutionFile = read_json(solutions).map_err(usage)?;
    let res = check_solutions(&f, &sols).map_err(usage)?;
    let bad: Vec<(usize, f64)> = res
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, r)| !(r <= tol))
        .collect();
    let worst = res.iter().copied().fold(0.0, f64::max);
    println!(
        "{} solutions ({} finite), largest relative residual {worst:.3e}",
        res.len(),
        sols.finite()
    );
    for (i, r) in &bad {
        println!("  solution {i}: residual {r:.3e} exceeds {tol:e}");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(numerical(anyhow!("{} of {} solutions fail the residual check", bad.len(), res.len())))
    }
}
