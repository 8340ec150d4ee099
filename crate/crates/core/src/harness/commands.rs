//! The `verify`, `count`, `equidistribute`, `cache` and `constants` commands.
//! Every file written depends only on the configuration, so reruns (with
//! or without a cache) produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::arith::count::{cusp_volume, equidistribution_normalisation, lattice_volume, perpendicular_constant};
use crate::arith::{
    bfs_orbit, counting_constant, covol_c0, equidistribution_stats, example_constant, exponent_fit, CountEstimate,
    CountingInputs, EquidistStats, Orbit, OrbitOptions, OrderSpec,
};
use crate::heis::lattice_covolume;

use super::cache::{header_for, read_cache, read_header, write_cache};
use super::config::ExperimentConfig;
use super::verify::{run_verify, VerifyOptions, VerifyReport};
use super::HarnessError;

pub const CACHE_FILE: &str = "orbit_cache.jsonl";

fn io(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| io(path, e))?;
    Ok(path.to_path_buf())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, HarnessError> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes");
    write_file(path, &(text + "\n"))
}

/// Runs the invariant suite and writes `verify_report.json`.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<(VerifyReport, PathBuf), HarnessError> {
    let report = run_verify(&VerifyOptions::new(cfg.seed, cfg.samples));
    let path = write_json(&cfg.out.join("verify_report.json"), &report)?;
    Ok((report, path))
}

/// Where an orbit came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitSource {
    Cache,
    Search,
}

fn search(cfg: &ExperimentConfig) -> Result<Orbit, HarnessError> {
    let opts = OrbitOptions {
        max_depth: cfg.depth,
        diam_min: cfg.diam_min()?,
        workers: cfg.worker_count(),
        max_classes: cfg.max_classes,
    };
    let orbit = bfs_orbit(&cfg.seed_chain.polar(), &opts)?;
    if orbit.aborted {
        return Err(HarnessError::Resource(format!(
            "orbit search stopped after {} classes (max_classes = {})",
            orbit.len(),
            cfg.max_classes
        )));
    }
    Ok(orbit)
}

/// Loads the orbit from the cache in the output directory when its
/// parameters match the configuration; otherwise searches and writes it.
pub fn load_or_search(cfg: &ExperimentConfig) -> Result<(Orbit, OrbitSource), HarnessError> {
    let path = cfg.out.join(CACHE_FILE);
    let wanted = header_for(&cfg.seed_chain.polar(), cfg.nmax()?, cfg.depth);
    if read_header(&path).is_ok_and(|h| h == wanted) {
        if let Ok((_, orbit)) = read_cache(&path) {
            return Ok((orbit, OrbitSource::Cache));
        }
    }
    let orbit = search(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| io(&cfg.out, e))?;
    write_cache(&path, &orbit, cfg.depth)?;
    Ok((orbit, OrbitSource::Search))
}

#[derive(Clone, Debug)]
pub struct CacheOutcome {
    pub path: PathBuf,
    pub classes: usize,
    pub new_per_depth: Vec<usize>,
    pub exhausted: bool,
}

/// Searches afresh and (re)writes the orbit cache.
pub fn cmd_cache(cfg: &ExperimentConfig) -> Result<CacheOutcome, HarnessError> {
    let orbit = search(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| io(&cfg.out, e))?;
    let path = cfg.out.join(CACHE_FILE);
    write_cache(&path, &orbit, cfg.depth)?;
    Ok(CacheOutcome { path, classes: orbit.len(), new_per_depth: orbit.new_per_depth.clone(), exhausted: orbit.exhausted })
}

#[derive(Clone, Debug)]
pub struct CountOutcome {
    pub estimate: CountEstimate,
    /// Slope over the saturated grid points, or why it is unavailable.
    pub slope: Result<f64, String>,
    pub classes: usize,
    pub exhausted: bool,
    pub source: OrbitSource,
    pub files: Vec<PathBuf>,
}

impl CountOutcome {
    /// Human-readable table with `ψ ε¹⁰` beside the predicted constant.
    pub fn summary(&self) -> String {
        let e = &self.estimate;
        let mut s = String::new();
        let _ = writeln!(s, "{:>10} {:>10} {:>9} {:>9} {:>12} {:>16}", "epsilon", "psi", "saturated", "slope", "psi*eps^10", "example_constant");
        for i in 0..e.epsilons.len() {
            let slope = e.slope_so_far[i].map_or("-".to_string(), |v| format!("{v:.4}"));
            let _ = writeln!(
                s,
                "{:>10.6} {:>10} {:>9} {:>9} {:>12.6} {:>16.6}",
                e.epsilons[i], e.psi[i], e.saturated[i], slope, e.prefactor[i], e.predicted_constant
            );
        }
        match &self.slope {
            Ok(v) => {
                let _ = writeln!(s, "fitted exponent over saturated points: {v:.4} (asymptotic value 10)");
            }
            Err(why) => {
                let _ = writeln!(s, "fitted exponent unavailable: {why}");
            }
        }
        let unsaturated = e.saturated.iter().filter(|x| !**x).count();
        if unsaturated > 0 {
            let _ = writeln!(s, "warning: {unsaturated} grid points are not saturated and were excluded from the fit");
        }
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.9}"))
}

fn count_csv(e: &CountEstimate) -> String {
    let mut s = String::from("epsilon,psi,saturated,slope_so_far,prefactor,example_constant\n");
    for i in 0..e.epsilons.len() {
        let _ = writeln!(
            s,
            "{:.9},{},{},{},{:.9},{:.9}",
            e.epsilons[i],
            e.psi[i],
            e.saturated[i],
            opt(e.slope_so_far[i]),
            e.prefactor[i],
            e.predicted_constant
        );
    }
    s
}

fn count_script(constant: f64) -> String {
    format!(
        "set datafile separator \",\"\n\
         set terminal pngcairo size 800,600\n\
         set output \"count.png\"\n\
         set logscale xy\n\
         set xlabel \"1/epsilon\"\n\
         set ylabel \"psi(epsilon)\"\n\
         set key left top\n\
         c = {constant:.9}\n\
         plot \"count.csv\" skip 1 using (1/$1):2 with linespoints title \"orbit count\", \\\n\
         \x20    c*x**10 with lines dashtype 2 title \"asymptotic c/eps^10\"\n"
    )
}

/// Counts `ψ(ε)` on the grid, fits the exponent, and writes `count.csv`
/// and `count.gp`.
pub fn cmd_count(cfg: &ExperimentConfig) -> Result<CountOutcome, HarnessError> {
    let (orbit, source) = load_or_search(cfg)?;
    let estimate = CountEstimate::from_orbit(&orbit, &cfg.grid()?, 2)?;
    let slope = exponent_fit(&estimate).map_err(|e| e.to_string());
    let files = vec![
        write_file(&cfg.out.join("count.csv"), &count_csv(&estimate))?,
        write_file(&cfg.out.join("count.gp"), &count_script(estimate.predicted_constant))?,
    ];
    Ok(CountOutcome { estimate, slope, classes: orbit.len(), exhausted: orbit.exhausted, source, files })
}

#[derive(Clone, Debug)]
pub struct EquidistOutcome {
    pub stats: Vec<EquidistStats>,
    pub saturated: Vec<bool>,
    pub source: OrbitSource,
    pub files: Vec<PathBuf>,
}

impl EquidistOutcome {
    /// Statistics at the saturated grid points, largest ε first.
    pub fn saturated_stats(&self) -> Vec<&EquidistStats> {
        self.stats.iter().zip(&self.saturated).filter(|(_, s)| **s).map(|(st, _)| st).collect()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>10} {:>9} {:>8} {:>10} {:>10} {:>12} {:>10}", "epsilon", "saturated", "classes", "chi2/df", "low_count", "discrepancy", "haar_mass");
        for (st, sat) in self.stats.iter().zip(&self.saturated) {
            let _ = writeln!(
                s,
                "{:>10.6} {:>9} {:>8} {:>10.4} {:>10} {:>12.6} {:>10.6}",
                st.eps,
                sat,
                st.classes,
                st.chi_square / st.df as f64,
                st.low_count,
                st.discrepancy,
                st.haar_mass
            );
        }
        s
    }
}

fn histogram_csv(st: &EquidistStats) -> String {
    let g = st.bins_per_axis;
    let total: f64 = st.histogram.iter().sum();
    let expected = total / st.histogram.len() as f64;
    let mut s = String::from("cell,b0,b1,b2,b3,b4,b5,b6,mass,expected\n");
    for (idx, m) in st.histogram.iter().enumerate() {
        let mut digits = [0usize; 7];
        let mut rest = idx;
        for d in digits.iter_mut().rev() {
            *d = rest % g;
            rest /= g;
        }
        let b: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "{idx},{},{m:.9},{expected:.9}", b.join(","));
    }
    s
}

fn trend_csv(stats: &[EquidistStats], saturated: &[bool]) -> String {
    let mut s = String::from("epsilon,saturated,classes,chains,chi_square,df,chi_square_per_df,low_count,discrepancy,haar_mass\n");
    for (st, sat) in stats.iter().zip(saturated) {
        let _ = writeln!(
            s,
            "{:.9},{sat},{},{},{:.6},{},{:.6},{},{:.9},{:.9}",
            st.eps,
            st.classes,
            st.chains,
            st.chi_square,
            st.df,
            st.chi_square / st.df as f64,
            st.low_count,
            st.discrepancy,
            st.haar_mass
        );
    }
    s
}

const EQUIDIST_SCRIPT: &str = "set datafile separator \",\"\n\
set terminal pngcairo size 800,600\n\
set output \"equidist.png\"\n\
set logscale x\n\
set xlabel \"epsilon\"\n\
set ylabel \"statistic\"\n\
set key right top\n\
plot \"equidist_trend.csv\" skip 1 using 1:9 with linespoints title \"star discrepancy\", \\\n\
     \"\" skip 1 using 1:7 with linespoints title \"chi-square / df\"\n";

/// Equidistribution statistics on the grid: one histogram CSV per ε, a
/// trend summary and a plot script.
pub fn cmd_equidistribute(cfg: &ExperimentConfig) -> Result<EquidistOutcome, HarnessError> {
    let (orbit, source) = load_or_search(cfg)?;
    let keys: Vec<_> = orbit.nodes.iter().map(|n| n.key).collect();
    let mut stats = Vec::new();
    let mut saturated = Vec::new();
    let mut files = Vec::new();
    for (i, &eps) in cfg.grid()?.iter().enumerate() {
        let st = equidistribution_stats(&keys, eps, cfg.bins)?;
        files.push(write_file(&cfg.out.join("equidist").join(format!("hist_{i:02}.csv")), &histogram_csv(&st))?);
        saturated.push(orbit.saturated(eps)?);
        stats.push(st);
    }
    files.push(write_file(&cfg.out.join("equidist_trend.csv"), &trend_csv(&stats, &saturated))?);
    files.push(write_file(&cfg.out.join("equidist.gp"), EQUIDIST_SCRIPT)?);
    Ok(EquidistOutcome { stats, saturated, source, files })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub discriminant: i64,
    pub units: usize,
    pub m_a: i64,
    pub lattice_covolume: f64,
    pub covol_c0: f64,
    pub example_constant: f64,
    pub counting_constant: f64,
    pub perpendicular_constant: f64,
    pub equidistribution_normalisation: f64,
    pub lattice_volume: f64,
    pub cusp_volume: f64,
}

/// The closed-form constants for the Hurwitz order, written to
/// `constants.json`.
pub fn cmd_constants(cfg: &ExperimentConfig) -> Result<(Constants, PathBuf), HarnessError> {
    let order = OrderSpec::hurwitz();
    let inputs = CountingInputs::full_group(2)?;
    let c = Constants {
        discriminant: order.discriminant,
        units: order.units.len(),
        m_a: order.m_a,
        lattice_covolume: crate::quat::Scalar::to_f64_lossy(&lattice_covolume()),
        covol_c0: covol_c0(2)?,
        example_constant: example_constant(2)?,
        counting_constant: counting_constant(&inputs),
        perpendicular_constant: perpendicular_constant(&inputs)?,
        equidistribution_normalisation: equidistribution_normalisation(2)?,
        lattice_volume: lattice_volume(2)?,
        cusp_volume: cusp_volume(2, 1.0)?,
    };
    let path = write_json(&cfg.out.join("constants.json"), &c)?;
    Ok((c, path))
}
