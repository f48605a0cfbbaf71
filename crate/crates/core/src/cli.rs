//! Command-line front end. Exit codes: 0 success, 1 partial report,
//! 2 usage or load error.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::correlation::{filtered_correlation, write_scatter, FilterMode, SpecialNodeRule};
use crate::distributions::{
    ccdf, crossing_point, fit_with_cutoff, write_ccdf, DegreeSequence, Direction, DEFAULT_TAU,
};
use crate::graph::{load_edge_list, write_edge_list, DirectedGraph, LoadOptions, Separator};
use crate::metrics::PathMode;
use crate::report::{analyze_graph, stats_section, write_artifacts, write_dot, write_graphml, AnalysisOptions, SourceInfo};
use crate::synth::{generate_asymmetric_network, GeneratorSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "netprofile", version, about = "Topology profiler for directed networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// N, L, <k>, clustering, path length and hierarchy degree.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        metrics: MetricArgs,
        /// Also write <stem>.stats.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full report, CCDF tables and figures for each input.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        metrics: MetricArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Writes a synthetic network as an edge list.
    Generate(GenerateArgs),
    /// Graph export with cycle members highlighted.
    Export {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        to: ExportTo,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// In- versus out-degree regression, raw and with special nodes removed.
    Correlate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        /// Directory for <stem>.scatter.tsv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-law fits, cutoffs and crossing point.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        fit: FitArgs,
        /// Directory for the CCDF tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct InputArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Lines list the target first.
    #[arg(long)]
    pub reverse_direction: bool,
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    #[arg(long, value_enum, default_value_t = PathModeArg::Undirected)]
    pub path_mode: PathModeArg,
    /// Skip nodes with fewer than two neighbours when averaging clustering.
    #[arg(long)]
    pub exclude_low_degree: bool,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Cutoff threshold in decades.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// `auto` or a fixed lower bound.
    #[arg(long, default_value = "auto", value_parser = parse_kmin)]
    pub kmin: KMin,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    /// OUTMAX,INMIN: nodes with k_out <= OUTMAX and k_in > INMIN.
    #[arg(long, default_value = "0,50", value_parser = parse_rule)]
    pub filter_special: SpecialNodeRule,
    #[arg(long, value_enum, default_value_t = FilterModeArg::Recompute)]
    pub filter_mode: FilterModeArg,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub gamma_in: f64,
    #[arg(long)]
    pub gamma_out: f64,
    /// INT or `none`; defaults to n − 1.
    #[arg(long, value_parser = parse_cutoff)]
    pub cutoff_in: Option<Cutoff>,
    #[arg(long, value_parser = parse_cutoff)]
    pub cutoff_out: Option<Cutoff>,
    /// Defaults to mean matching against the other direction.
    #[arg(long)]
    pub kmin_in: Option<u64>,
    #[arg(long)]
    pub kmin_out: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Csv,
    Ws,
}

impl From<Format> for Separator {
    fn from(f: Format) -> Self {
        match f {
            Format::Tsv => Separator::Tab,
            Format::Csv => Separator::Comma,
            Format::Ws => Separator::Whitespace,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathModeArg {
    Undirected,
    Directed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterModeArg {
    Recompute,
    Freeze,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportTo {
    Dot,
    Graphml,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum KMin {
    Auto,
    Fixed(u64),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Cutoff {
    Unbounded,
    At(u64),
}

fn parse_kmin(s: &str) -> Result<KMin, String> {
    if s == "auto" {
        return Ok(KMin::Auto);
    }
    match s.parse::<u64>() {
        Ok(k) if k >= 1 => Ok(KMin::Fixed(k)),
        _ => Err(format!("expected `auto` or an integer >= 1, got `{s}`")),
    }
}

fn parse_rule(s: &str) -> Result<SpecialNodeRule, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected OUTMAX,INMIN, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok(SpecialNodeRule {
        out_max: parse(a)?,
        in_min_exclusive: parse(b)?,
    })
}

fn parse_cutoff(s: &str) -> Result<Cutoff, String> {
    if s == "none" {
        return Ok(Cutoff::Unbounded);
    }
    s.parse::<u64>().map(Cutoff::At).map_err(|_| format!("expected an integer or `none`, got `{s}`"))
}

impl MetricArgs {
    fn apply(&self, options: &mut AnalysisOptions) {
        options.path_mode = match self.path_mode {
            PathModeArg::Undirected => PathMode::Undirected,
            PathModeArg::Directed => PathMode::Directed,
        };
        options.exclude_low_degree = self.exclude_low_degree;
    }
}

impl FitArgs {
    fn k_min(&self) -> Option<u64> {
        match self.kmin {
            KMin::Auto => None,
            KMin::Fixed(k) => Some(k),
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.tau.is_nan() || self.tau < 0.0 {
            return Err(format!("--tau must be >= 0, got {}", self.tau));
        }
        Ok(())
    }
}

impl FilterArgs {
    fn mode(&self) -> FilterMode {
        match self.filter_mode {
            FilterModeArg::Recompute => FilterMode::Recompute,
            FilterModeArg::Freeze => FilterMode::Freeze,
        }
    }
}

fn load(path: &Path, input: &InputArgs) -> Result<(DirectedGraph, SourceInfo), String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let options = LoadOptions {
        separator: input.format.into(),
        reverse: input.reverse_direction,
    };
    let (graph, load) = load_edge_list(BufReader::new(file), &options).map_err(|e| format!("{}: {e}", path.display()))?;
    let source = SourceInfo {
        path: path.display().to_string(),
        load,
        separator: options.separator,
        reversed: options.reverse,
    };
    Ok((graph, source))
}

/// File stems for `paths`, suffixed where two inputs would collide.
fn stems(paths: &[PathBuf]) -> Vec<String> {
    let base: Vec<String> = paths
        .iter()
        .map(|p| p.file_stem().map_or_else(|| "network".to_string(), |s| s.to_string_lossy().into_owned()))
        .collect();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for b in &base {
        *counts.entry(b).or_default() += 1;
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    base.iter()
        .map(|b| {
            if counts[b.as_str()] == 1 {
                return b.clone();
            }
            let i = seen.entry(b).or_default();
            *i += 1;
            format!("{b}-{i}")
        })
        .collect()
}

fn with_output<F>(path: Option<&Path>, out: &mut dyn Write, body: F) -> std::io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(p)?);
            body(&mut w)?;
            w.flush()
        }
        None => body(out),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match command {
        Command::Stats { input, metrics, out: dir } => {
            let mut options = AnalysisOptions::default();
            metrics.apply(&mut options);
            let names = stems(&input.inputs);
            let mut code = EXIT_OK;
            for (path, stem) in input.inputs.iter().zip(&names) {
                let (graph, _) = match load(path, &input) {
                    Ok(x) => x,
                    Err(e) => {
                        writeln!(err, "error: {e}").map_err(io)?;
                        code = EXIT_USAGE;
                        continue;
                    }
                };
                let (stats, errors) = stats_section(&graph, &options);
                if input.inputs.len() > 1 {
                    write!(out, "{}\t", path.display()).map_err(io)?;
                }
                writeln!(out, "{}", stats.line()).map_err(io)?;
                for e in &errors {
                    writeln!(err, "warning: {}: {}: {}", path.display(), e.stage, e.message).map_err(io)?;
                }
                if !errors.is_empty() {
                    code = code.max(EXIT_PARTIAL);
                }
                if let Some(dir) = &dir {
                    fs::create_dir_all(dir).map_err(io)?;
                    let json = serde_json::to_string_pretty(&stats).map_err(|e| e.to_string())?;
                    fs::write(dir.join(format!("{stem}.stats.json")), json + "\n").map_err(io)?;
                }
            }
            Ok(code)
        }

        Command::Analyze {
            input,
            metrics,
            fit,
            filter,
            out: dir,
        } => {
            fit.validate()?;
            let mut options = AnalysisOptions {
                tau: fit.tau,
                k_min: fit.k_min(),
                special_rule: filter.filter_special,
                filter_mode: filter.mode(),
                ..AnalysisOptions::default()
            };
            metrics.apply(&mut options);
            let names = stems(&input.inputs);
            let results: Vec<Result<(String, i32), String>> = input
                .inputs
                .par_iter()
                .zip(names.par_iter())
                .map(|(path, stem)| {
                    let (graph, source) = load(path, &input)?;
                    let report = analyze_graph(&graph, source, &options);
                    write_artifacts(&graph, &report, &dir, stem).map_err(|e| format!("{}: {e}", path.display()))?;
                    let direction = report
                        .asymmetry_direction
                        .value()
                        .map_or_else(|| "NA".to_string(), |d| format!("{d:?}"));
                    let k_star = report
                        .crossing
                        .value()
                        .and_then(|c| c.k_star)
                        .map_or_else(|| "NA".to_string(), |k| format!("{k:.2}"));
                    let mut line = format!(
                        "{}\t{} direction={direction} k*={k_star} cycle_nodes={} special={}",
                        path.display(),
                        report.stats.line(),
                        report.cycle_node_count,
                        report.special_nodes.len()
                    );
                    for e in &report.stage_errors {
                        line += &format!("\n  partial: {}: {}", e.stage, e.message);
                    }
                    let code = if report.is_partial() { EXIT_PARTIAL } else { EXIT_OK };
                    Ok((line, code))
                })
                .collect();
            let mut code = EXIT_OK;
            for r in results {
                match r {
                    Ok((line, c)) => {
                        writeln!(out, "{line}").map_err(io)?;
                        code = code.max(c);
                    }
                    Err(e) => {
                        writeln!(err, "error: {e}").map_err(io)?;
                        code = EXIT_USAGE;
                    }
                }
            }
            Ok(code)
        }

        Command::Generate(args) => {
            let mut spec = GeneratorSpec::new(args.n, args.gamma_in, args.gamma_out, args.seed);
            let cutoff = |c: Option<Cutoff>, default: Option<u64>| match c {
                None => default,
                Some(Cutoff::Unbounded) => None,
                Some(Cutoff::At(k)) => Some(k),
            };
            spec.cutoff_in = cutoff(args.cutoff_in, spec.cutoff_in);
            spec.cutoff_out = cutoff(args.cutoff_out, spec.cutoff_out);
            spec.k_min_in = args.kmin_in;
            spec.k_min_out = args.kmin_out;
            spec.validate().map_err(|e| e.to_string())?;
            let generated = generate_asymmetric_network(&spec).map_err(|e| e.to_string())?;
            let mut header = spec.describe();
            header.push(format!(
                "nodes={} edges={} erased={}",
                generated.graph.node_count(),
                generated.graph.edge_count(),
                generated.configuration.self_loops_erased + generated.configuration.duplicates_erased
            ));
            with_output(args.out.as_deref(), out, |w| {
                write_edge_list(&generated.graph, w, args.format.into(), &header)
            })
            .map_err(io)?;
            Ok(EXIT_OK)
        }

        Command::Export { input, to, out: target } => {
            if input.inputs.len() != 1 {
                return Err("export takes exactly one input".into());
            }
            let (graph, _) = load(&input.inputs[0], &input)?;
            with_output(target.as_deref(), out, |w| match to {
                ExportTo::Dot => write_dot(&graph, w),
                ExportTo::Graphml => write_graphml(&graph, w),
            })
            .map_err(io)?;
            Ok(EXIT_OK)
        }

        Command::Correlate { input, filter, out: dir } => {
            let names = stems(&input.inputs);
            let mut code = EXIT_OK;
            for (path, stem) in input.inputs.iter().zip(&names) {
                let (graph, _) = match load(path, &input) {
                    Ok(x) => x,
                    Err(e) => {
                        writeln!(err, "error: {e}").map_err(io)?;
                        code = EXIT_USAGE;
                        continue;
                    }
                };
                match filtered_correlation(&graph, &filter.filter_special, filter.mode()) {
                    Ok(fc) => {
                        let special: Vec<&str> = fc.raw.special_nodes.iter().map(|&v| graph.label(v)).collect();
                        writeln!(
                            out,
                            "{}\traw R2={:.4} slope={:.4} intercept={:.4} n={}",
                            path.display(),
                            fc.raw.r2,
                            fc.raw.slope,
                            fc.raw.intercept,
                            fc.raw.n_points
                        )
                        .map_err(io)?;
                        match &fc.filtered {
                            Ok(r) => writeln!(
                                out,
                                "{}\tfiltered R2={:.4} slope={:.4} intercept={:.4} n={} removed=[{}]",
                                path.display(),
                                r.r2,
                                r.slope,
                                r.intercept,
                                r.n_points,
                                special.join(",")
                            )
                            .map_err(io)?,
                            Err(e) => {
                                writeln!(err, "warning: {}: filtered: {e}", path.display()).map_err(io)?;
                                code = code.max(EXIT_PARTIAL);
                            }
                        }
                    }
                    Err(e) => {
                        writeln!(err, "warning: {}: correlation: {e}", path.display()).map_err(io)?;
                        code = code.max(EXIT_PARTIAL);
                    }
                }
                if let Some(dir) = &dir {
                    fs::create_dir_all(dir).map_err(io)?;
                    let f = File::create(dir.join(format!("{stem}.scatter.tsv"))).map_err(io)?;
                    write_scatter(&graph, BufWriter::new(f)).map_err(|e| e.to_string())?;
                }
            }
            Ok(code)
        }

        Command::Fit { input, fit, out: dir } => {
            fit.validate()?;
            let names = stems(&input.inputs);
            let mut code = EXIT_OK;
            for (path, stem) in input.inputs.iter().zip(&names) {
                let (graph, _) = match load(path, &input) {
                    Ok(x) => x,
                    Err(e) => {
                        writeln!(err, "error: {e}").map_err(io)?;
                        code = EXIT_USAGE;
                        continue;
                    }
                };
                let mut curves = Vec::new();
                for direction in [Direction::In, Direction::Out] {
                    let seq = DegreeSequence::from_graph(&graph, direction);
                    match fit_with_cutoff(&seq, fit.k_min(), fit.tau) {
                        Ok((f, c)) => writeln!(
                            out,
                            "{}\t{}\tgamma_mle={:.4} gamma_ols={:.4} k_min={} k_max={} n_tail={} ks={:.4} k_plus={}",
                            path.display(),
                            direction.as_str(),
                            f.gamma_mle,
                            f.gamma_ols,
                            f.k_min,
                            f.k_max.map_or_else(|| "NA".to_string(), |k| k.to_string()),
                            f.n_tail,
                            f.ks_distance,
                            c.k_plus.map_or_else(|| "NA".to_string(), |k| k.to_string())
                        )
                        .map_err(io)?,
                        Err(e) => {
                            writeln!(err, "warning: {}: fit {}: {e}", path.display(), direction.as_str()).map_err(io)?;
                            code = code.max(EXIT_PARTIAL);
                        }
                    }
                    curves.push(ccdf(&seq));
                }
                if let [Ok(a), Ok(b)] = &curves[..] {
                    let k_star = crossing_point(a, b)
                        .ok()
                        .and_then(|c| c.k_star)
                        .map_or_else(|| "NA".to_string(), |k| format!("{k:.3}"));
                    writeln!(out, "{}\tcrossing\tk*={k_star}", path.display()).map_err(io)?;
                    if let Some(dir) = &dir {
                        fs::create_dir_all(dir).map_err(io)?;
                        for (c, tag) in [(a, "in"), (b, "out")] {
                            let f = File::create(dir.join(format!("{stem}.ccdf_{tag}.tsv"))).map_err(io)?;
                            write_ccdf(c, BufWriter::new(f)).map_err(io)?;
                        }
                    }
                }
            }
            Ok(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("netprofile").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_kmin("auto"), Ok(KMin::Auto));
        assert_eq!(parse_kmin("3"), Ok(KMin::Fixed(3)));
        assert!(parse_kmin("0").is_err());
        assert_eq!(
            parse_rule("1,40"),
            Ok(SpecialNodeRule {
                out_max: 1,
                in_min_exclusive: 40
            })
        );
        assert!(parse_rule("1").is_err());
        assert_eq!(parse_cutoff("none"), Ok(Cutoff::Unbounded));
        assert_eq!(parse_cutoff("100"), Ok(Cutoff::At(100)));
    }

    #[test]
    fn stem_collisions() {
        let p = |s: &str| PathBuf::from(s);
        assert_eq!(stems(&[p("a/x.tsv"), p("b/x.tsv"), p("y.csv")]), vec!["x-1", "x-2", "y"]);
    }

    #[test]
    fn gamma_at_most_one_is_usage_error() {
        let (code, _, err) = call(&["generate", "--n", "10", "--gamma-in", "0.5", "--gamma-out", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("gamma"));
    }

    #[test]
    fn unknown_export_format_is_usage_error() {
        let (code, _, _) = call(&["export", "x.tsv", "--to", "gml"]);
        assert_eq!(code, EXIT_USAGE);
    }
}
