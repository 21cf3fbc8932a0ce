//! Seeded planner-versus-baseline trials.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use quadmorph_core::birrt::{birrt_plan, BirrtParams};
use quadmorph_core::plan::{plan, validate_plan, PlanParams};
use quadmorph_core::polyomino::random_nonlinear_with;
use quadmorph_core::validate::Mode;
use quadmorph_core::Configuration;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Planner,
    Birrt,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Planner => "planner",
            Algo::Birrt => "birrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub n: usize,
    pub pairs: usize,
    pub reps: usize,
    pub seed: u64,
    pub algos: Vec<Algo>,
    pub plan: PlanParams,
    pub birrt_iterations: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 7,
            pairs: 100,
            reps: 20,
            seed: 0,
            algos: vec![Algo::Planner, Algo::Birrt],
            plan: PlanParams::default(),
            birrt_iterations: 1000,
        }
    }
}

/// One CSV row: `pair,rep,algo,success,steps,ms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub pair: usize,
    pub rep: usize,
    pub algo: Algo,
    pub success: bool,
    pub steps: usize,
    pub ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub row: Row,
    /// Connects plus disconnects plus two per compensation, for planner runs.
    pub accounted_steps: Option<usize>,
    pub error: Option<String>,
}

/// Start and goal pairs, both non-linear, drawn from one seeded stream.
pub fn generate_pairs(n: usize, count: usize, seed: u64) -> Vec<(Configuration, Configuration)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (random_nonlinear_with(n, &mut rng).to_config(), random_nonlinear_with(n, &mut rng).to_config()))
        .collect()
}

pub fn trial_seed(seed: u64, pair: usize, rep: usize) -> u64 {
    // splitmix64 finalizer over the combined index
    let mut z = seed ^ ((pair as u64) << 32 | rep as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs one algorithm once; the clock covers only the search itself.
pub fn run_trial(cfg: &BenchConfig, pair: usize, rep: usize, algo: Algo, start: &Configuration, goal: &Configuration) -> Trial {
    let seed = trial_seed(cfg.seed, pair, rep);
    let mode = cfg.plan.mode;
    let (success, steps, ms, accounted, error) = match algo {
        Algo::Planner => {
            let mut params = cfg.plan;
            params.bit.seed = seed;
            let t = Instant::now();
            let r = plan(start, goal, &params);
            let ms = t.elapsed().as_secs_f64() * 1e3;
            match r {
                Ok(p) => {
                    let ok = p.report(mode).ok;
                    (ok, p.step_count(), ms, Some(p.accounted_steps()), (!ok).then(|| "validation failed".to_string()))
                }
                Err(e) => (false, 0, ms, None, Some(e.to_string())),
            }
        }
        Algo::Birrt => {
            let params = BirrtParams { seed, max_iterations: cfg.birrt_iterations };
            let t = Instant::now();
            let r = birrt_plan(start, goal, &params);
            let ms = t.elapsed().as_secs_f64() * 1e3;
            match r {
                Ok(b) => {
                    let ok = validate_plan(start, goal, &b.hops, &b.assignment, Mode::Strict).ok;
                    (ok, b.steps(), ms, None, (!ok).then(|| "validation failed".to_string()))
                }
                Err(e) => (false, 0, ms, None, Some(e.to_string())),
            }
        }
    };
    Trial { row: Row { pair, rep, algo, success, steps, ms }, accounted_steps: accounted, error }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub algo: Algo,
    pub trials: usize,
    pub successes: usize,
    pub success_ratio: f64,
    /// Mean over pairs of the fewest steps among successful repetitions.
    pub avg_min_steps: Option<f64>,
    pub mean_steps: Option<f64>,
    pub mean_ms: f64,
    /// Mean time over the (pair, rep) trials the baseline solved.
    pub mean_ms_on_birrt_solved: Option<f64>,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (s, k) = xs.into_iter().fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| s / k as f64)
}

pub fn aggregate(rows: &[Row]) -> Vec<Aggregate> {
    let solved: std::collections::BTreeSet<(usize, usize)> =
        rows.iter().filter(|r| r.algo == Algo::Birrt && r.success).map(|r| (r.pair, r.rep)).collect();
    let mut by_algo: BTreeMap<Algo, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        by_algo.entry(r.algo).or_default().push(r);
    }
    by_algo
        .into_iter()
        .map(|(algo, rs)| {
            let successes = rs.iter().filter(|r| r.success).count();
            let mut best: BTreeMap<usize, usize> = BTreeMap::new();
            for r in rs.iter().filter(|r| r.success) {
                let e = best.entry(r.pair).or_insert(r.steps);
                *e = (*e).min(r.steps);
            }
            let has_birrt = rows.iter().any(|r| r.algo == Algo::Birrt);
            Aggregate {
                algo,
                trials: rs.len(),
                successes,
                success_ratio: successes as f64 / rs.len().max(1) as f64,
                avg_min_steps: mean(best.values().map(|&s| s as f64)),
                mean_steps: mean(rs.iter().filter(|r| r.success).map(|r| r.steps as f64)),
                mean_ms: mean(rs.iter().map(|r| r.ms)).unwrap_or(0.0),
                mean_ms_on_birrt_solved: if has_birrt {
                    mean(rs.iter().filter(|r| solved.contains(&(r.pair, r.rep))).map(|r| r.ms))
                } else {
                    None
                },
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub trials: Vec<Trial>,
    pub aggregates: Vec<Aggregate>,
}

impl BenchResult {
    pub fn rows(&self) -> Vec<Row> {
        self.trials.iter().map(|t| t.row.clone()).collect()
    }

    pub fn aggregate(&self, algo: Algo) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.algo == algo)
    }
}

pub fn run(cfg: &BenchConfig) -> BenchResult {
    let pairs = generate_pairs(cfg.n, cfg.pairs, cfg.seed);
    let jobs: Vec<(usize, usize, Algo)> = (0..cfg.pairs)
        .flat_map(|p| (0..cfg.reps).flat_map(move |r| cfg.algos.iter().map(move |&a| (p, r, a))))
        .collect();
    let trials: Vec<Trial> = jobs.par_iter().map(|&(p, r, a)| run_trial(cfg, p, r, a, &pairs[p].0, &pairs[p].1)).collect();
    let rows: Vec<Row> = trials.iter().map(|t| t.row.clone()).collect();
    BenchResult { aggregates: aggregate(&rows), trials }
}

pub fn write_rows<W: Write>(rows: &[Row], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize((r.pair, r.rep, r.algo.name(), r.success, r.steps, format!("{:.3}", r.ms)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(rows: &[Row], mut w: W) -> csv::Result<()> {
    writeln!(w, "pair,rep,algo,success,steps,ms")?;
    write_rows(rows, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig { n: 5, pairs: 3, reps: 2, seed: 11, ..BenchConfig::default() }
    }

    #[test]
    fn row_count_and_order() {
        let r = run(&small());
        assert_eq!(r.trials.len(), 3 * 2 * 2);
        let keys: Vec<(usize, usize, Algo)> = r.trials.iter().map(|t| (t.row.pair, t.row.rep, t.row.algo)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn same_seed_same_rows_apart_from_time() {
        let strip = |r: BenchResult| r.rows().into_iter().map(|x| (x.pair, x.rep, x.algo, x.success, x.steps)).collect::<Vec<_>>();
        assert_eq!(strip(run(&small())), strip(run(&small())));
    }

    #[test]
    fn aggregates_from_rows() {
        let rows = vec![
            Row { pair: 0, rep: 0, algo: Algo::Planner, success: true, steps: 10, ms: 1.0 },
            Row { pair: 0, rep: 1, algo: Algo::Planner, success: true, steps: 6, ms: 3.0 },
            Row { pair: 1, rep: 0, algo: Algo::Planner, success: false, steps: 0, ms: 2.0 },
            Row { pair: 0, rep: 0, algo: Algo::Birrt, success: true, steps: 2, ms: 9.0 },
            Row { pair: 0, rep: 1, algo: Algo::Birrt, success: false, steps: 0, ms: 5.0 },
            Row { pair: 1, rep: 0, algo: Algo::Birrt, success: false, steps: 0, ms: 5.0 },
        ];
        let a = aggregate(&rows);
        let p = a.iter().find(|x| x.algo == Algo::Planner).unwrap();
        assert_eq!(p.successes, 2);
        assert_eq!(p.avg_min_steps, Some(6.0));
        assert_eq!(p.mean_steps, Some(8.0));
        assert_eq!(p.mean_ms, 2.0);
        assert_eq!(p.mean_ms_on_birrt_solved, Some(1.0));
        let b = a.iter().find(|x| x.algo == Algo::Birrt).unwrap();
        assert!((b.success_ratio - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(b.mean_ms_on_birrt_solved, Some(9.0));
    }

    #[test]
    fn csv_header() {
        let rows = vec![Row { pair: 0, rep: 1, algo: Algo::Birrt, success: true, steps: 3, ms: 1.23456 }];
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "pair,rep,algo,success,steps,ms\n0,1,birrt,true,3,1.235\n");
    }
}
