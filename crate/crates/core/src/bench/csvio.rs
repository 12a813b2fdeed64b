use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{BenchError, ExplorationReport, LearningResult, TrajectoryPoint};
use crate::ar::AcfTable;

/// First line of every CSV file written here.
pub const CSV_VERSION_LINE: &str = "# arpex-v1";

/// Destination of a CSV stream: a file, or stdout when no path is given.
pub struct CsvOut(Box<dyn Write>);

impl CsvOut {
    pub fn open(path: Option<&Path>) -> Result<Self, BenchError> {
        Ok(match path {
            Some(p) => CsvOut(Box::new(BufWriter::new(File::create(p)?))),
            None => CsvOut(Box::new(BufWriter::new(io::stdout()))),
        })
    }
}

impl Write for CsvOut {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.0.flush()
    }
}

fn write_rows<W: Write, T: Serialize>(mut w: W, rows: impl IntoIterator<Item = T>) -> Result<(), BenchError> {
    writeln!(w, "{CSV_VERSION_LINE}")?;
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct NoiseRow {
    t: usize,
    x: f64,
}

/// `t,x`
pub fn write_noise<W: Write>(w: W, xs: &[f64]) -> Result<(), BenchError> {
    write_rows(w, xs.iter().enumerate().map(|(t, &x)| NoiseRow { t, x }))
}

#[derive(Serialize)]
struct AcfRow {
    lag: usize,
    rho: f64,
}

/// `lag,rho`
pub fn write_acf<W: Write>(w: W, table: &AcfTable) -> Result<(), BenchError> {
    write_rows(w, table.rho.iter().enumerate().map(|(lag, &rho)| AcfRow { lag, rho }))
}

#[derive(Serialize)]
struct ExploreRow {
    action_rate: f64,
    policy: String,
    sigma_scale: f64,
    total_sim_seconds: f64,
    episodes_completed: usize,
    mean_time: f64,
    median_time: f64,
    censored: bool,
    seeds: String,
}

/// `action_rate,policy,sigma_scale,total_sim_seconds,episodes_completed,mean_time,median_time,censored,seeds`
/// with the seeds space separated.
pub fn write_exploration<W: Write>(w: W, reports: &[ExplorationReport]) -> Result<(), BenchError> {
    write_rows(
        w,
        reports.iter().map(|r| ExploreRow {
            action_rate: r.action_rate,
            policy: r.policy.to_string(),
            sigma_scale: r.sigma_scale,
            total_sim_seconds: r.total_sim_seconds,
            episodes_completed: r.episodes_completed,
            mean_time: r.mean_time,
            median_time: r.median_time,
            censored: r.censored,
            seeds: r.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        }),
    )
}

/// `run,t,x,y`
pub fn write_trajectories<W: Write>(w: W, points: &[TrajectoryPoint]) -> Result<(), BenchError> {
    write_rows(w, points)
}

#[derive(Serialize)]
struct SeedRow {
    seed: u64,
    sim_seconds: f64,
    mean_return: f64,
    mean_ep_len: f64,
    kl: f64,
    clipfrac: f64,
    explained_var: f64,
}

/// The seed-averaged curve as `sim_seconds,mean_return,mean_ep_len,kl,clipfrac,explained_var`,
/// or every seed's curve with a leading `seed` column when `per_seed` is set.
pub fn write_learning<W: Write>(w: W, result: &LearningResult, per_seed: bool) -> Result<(), BenchError> {
    if per_seed {
        write_rows(
            w,
            result
                .seeds
                .iter()
                .zip(&result.per_seed)
                .flat_map(|(&seed, rows)| {
                    rows.iter().map(move |r| SeedRow {
                        seed,
                        sim_seconds: r.sim_seconds,
                        mean_return: r.mean_return,
                        mean_ep_len: r.mean_ep_len,
                        kl: r.kl,
                        clipfrac: r.clipfrac,
                        explained_var: r.explained_var,
                    })
                }),
        )
    } else {
        write_rows(w, &result.mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ar::{acf, ArModel};
    use crate::trainer::ProgressRow;

    #[test]
    fn headers() {
        let mut buf = Vec::new();
        write_noise(&mut buf, &[0.5, -1.25]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# arpex-v1\nt,x\n0,0.5\n1,-1.25\n");
        let mut buf = Vec::new();
        write_acf(&mut buf, &acf(&ArModel::binomial(1, 0.5).unwrap(), 2)).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# arpex-v1\nlag,rho\n0,1.0\n1,0.5\n2,0.25\n");
        let mut buf = Vec::new();
        let p = TrajectoryPoint { run: 0, t: 0.0, x: 1.0, y: 2.0 };
        write_trajectories(&mut buf, &[p]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("# arpex-v1\nrun,t,x,y\n"));
    }

    #[test]
    fn learning_header() {
        let row = ProgressRow {
            sim_seconds: 1.0,
            mean_return: -2.0,
            mean_ep_len: 3.0,
            kl: 0.0,
            clipfrac: 0.0,
            explained_var: f64::NAN,
        };
        let res = LearningResult {
            action_rate: 10.0,
            policy: super::super::PolicySpec::Gaussian,
            seeds: vec![4],
            per_seed: vec![vec![row]],
            checkpoints: Vec::new(),
            mean: vec![row],
        };
        let mut buf = Vec::new();
        write_learning(&mut buf, &res, false).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("# arpex-v1\nsim_seconds,mean_return,mean_ep_len,kl,clipfrac,explained_var\n"));
        let mut buf = Vec::new();
        write_learning(&mut buf, &res, true).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("seed,sim_seconds,mean_return"), "{s}");
        assert!(s.contains("\n4,1.0,-2.0,3.0,0.0,0.0,NaN\n"), "{s}");
    }
}
