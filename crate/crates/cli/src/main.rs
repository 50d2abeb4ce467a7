mod output;

use clap::{Args, CommandFactory, Parser, Subcommand};
use debruijn_census::asymptotics::{level_constants, singularity_report, RadicandSystem};
use debruijn_census::oracle::verify_against_oracle;
use debruijn_census::profile::{profile_reports, NodeKind};
use debruijn_census::sampler::{batch_stats, sample_terms};
use debruijn_census::series::Census;
use debruijn_census::{Error, Family, FamilySpec, MarkSpec};
use output::{round_floats, Cell, Format, Table};
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Counting, singularity analysis and uniform sampling of closed
/// lambda-terms with bounded De Bruijn indices or levels.
#[derive(Parser, Debug)]
#[command(name = "debruijn-census", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// index: every index is at most K; levels: at most K nested abstractions.
    #[arg(long, global = true, default_value = "index")]
    family: Family,
    /// The bound K.
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// total, leaves@L, unary@L or binary@L.
    #[arg(long, global = true)]
    mark: Option<MarkSpec>,
    /// Term size; repeat or separate with commas where several are accepted.
    #[arg(long, global = true, value_delimiter = ',')]
    size: Vec<usize>,
    /// Largest term size.
    #[arg(long, global = true)]
    max_size: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Directory for counting tables, overriding DEBRUIJN_CENSUS_CACHE.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of closed terms of each size.
    Count,
    /// Exact mean and variance of the marked statistic.
    Moments,
    /// Exact distribution of the marked statistic.
    Dist,
    /// Dominant singularity and limit constants.
    Singularity {
        /// Value of the marking variable.
        #[arg(long, default_value_t = 1.0)]
        u: f64,
    },
    /// Mean and variance constants of the number of leaves for bounded levels.
    Table1 {
        #[arg(long, default_value_t = 2)]
        from: u32,
        #[arg(long, default_value_t = 12)]
        to: u32,
    },
    /// Mean node counts per level for bounded levels.
    Profile {
        /// Print (level, n, mean) triples of one node kind instead.
        #[arg(long)]
        emit_plot_data: bool,
        /// Node kind for --emit-plot-data: leaf, unary or binary.
        #[arg(long, default_value = "leaf")]
        kind: NodeKind,
    },
    /// Uniform random terms, one per line.
    Sample,
    /// Sample statistics of the marked statistic.
    Stats,
    /// Compare the counting tables with brute-force enumeration.
    Verify,
}

enum Failure {
    Usage(String),
    Domain(Error),
    Mismatch(usize),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl Common {
    fn spec(&self) -> Result<FamilySpec, Failure> {
        let k = self.bound.ok_or_else(|| usage("--bound is required"))?;
        FamilySpec::new(self.family, k).map_err(|e| usage(e.to_string()))
    }

    fn mark(&self, spec: FamilySpec, default: MarkSpec) -> Result<MarkSpec, Failure> {
        let mark = self.mark.unwrap_or(default);
        mark.validate(spec).map_err(|e| usage(e.to_string()))?;
        Ok(mark)
    }

    /// `--size` values, or `1..=--max-size`.
    fn sizes(&self) -> Result<Vec<usize>, Failure> {
        match (self.size.is_empty(), self.max_size) {
            (false, None) => Ok(self.size.clone()),
            (true, Some(m)) => Ok((1..=m).collect()),
            (false, Some(_)) => Err(usage("give either --size or --max-size, not both")),
            (true, None) => Err(usage("--size or --max-size is required")),
        }
    }

    fn one_size(&self) -> Result<usize, Failure> {
        match (self.size.as_slice(), self.max_size) {
            ([n], None) => Ok(*n),
            _ => Err(usage("exactly one --size is required")),
        }
    }

    fn census(&self) -> Census {
        let census = Census::from_env();
        match &self.cache_dir {
            Some(dir) => census.with_cache_dir(Some(dir.clone())),
            None => census,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.error(clap::error::ErrorKind::ArgumentConflict, msg).exit()
        }
        Err(Failure::Domain(e)) => {
            let mut v = serde_json::to_value(&e).unwrap_or_default();
            v["message"] = e.to_string().into();
            eprintln!("{v}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch(count)) => {
            eprintln!("{}", serde_json::json!({ "error": "mismatch", "count": count }));
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("{}", serde_json::json!({ "error": "io", "message": e.to_string() }));
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Count => count(c, out),
        Command::Moments => moments(c, out),
        Command::Dist => dist(c, out),
        Command::Singularity { u } => singularity(c, *u, out),
        Command::Table1 { from, to } => table1(*from, *to, c.format, out),
        Command::Profile { emit_plot_data, kind } => profile(c, *emit_plot_data, *kind, out),
        Command::Sample => sample(c, out),
        Command::Stats => stats(c, out),
        Command::Verify => verify(c, out),
    }
}

fn count(c: &Common, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    let sizes = c.sizes()?;
    let top = sizes.iter().copied().max().unwrap_or(0);
    let counts = c.census().counts(spec, top)?;
    let mut t = Table::new(&["n", "count"]);
    for &n in &sizes {
        let a = counts.closed(n);
        if *a != 0 || c.max_size.is_none() {
            t.push(vec![Cell::Int(n as i64), Cell::Big(a.clone())]);
        }
    }
    Ok(t.write(c.format, out)?)
}

fn moments(c: &Common, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    let mark = c.mark(spec, MarkSpec::TotalLeaves)?;
    let census = c.census();
    let sizes = c.sizes()?;
    let mut t = Table::new(&[
        "n", "count", "mean_numer", "mean_denom", "mean", "variance_numer", "variance_denom", "variance",
    ]);
    for &n in &sizes {
        match census.exact_moments(spec, mark, n) {
            Ok(m) => {
                let mut row = vec![Cell::Int(n as i64), Cell::Big(m.count)];
                row.extend(Cell::ratio(&m.mean));
                row.extend(Cell::ratio(&m.variance));
                t.push(row);
            }
            Err(Error::EmptySize { .. }) if c.max_size.is_some() => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(t.write(c.format, out)?)
}

fn dist(c: &Common, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    let mark = c.mark(spec, MarkSpec::TotalLeaves)?;
    let n = c.one_size()?;
    let d = c.census().distribution(spec, mark, n)?;
    let mut t = Table::new(&["value", "count"]);
    for (v, cnt) in d {
        t.push(vec![Cell::Int(v as i64), Cell::Big(cnt)]);
    }
    Ok(t.write(c.format, out)?)
}

fn singularity(c: &Common, u: f64, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    if !(u > 0.0 && u.is_finite()) {
        return Err(usage("--u must be positive"));
    }
    if u != 1.0 {
        let mark = c.mark(spec, MarkSpec::TotalLeaves)?;
        let system = RadicandSystem::new(spec, mark)?;
        let s = debruijn_census::asymptotics::find_dominant_singularity(&system, u)?;
        let mut t = Table::new(&["family", "k", "mark", "u", "rho", "vanishing_indices"]);
        t.push(vec![
            Cell::Text(spec.family.to_string()),
            Cell::Int(spec.k as i64),
            Cell::Text(mark.to_string()),
            Cell::float(u),
            Cell::float(s.rho),
            Cell::Text(join(&s.vanishing)),
        ]);
        return Ok(t.write(c.format, out)?);
    }
    let r = singularity_report(spec)?;
    match c.format {
        Format::Json => {
            let v = round_floats(serde_json::to_value(&r).expect("report serializes"));
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
        }
        Format::Csv => {
            let mut t =
                Table::new(&["family", "k", "u", "rho", "vanishing_indices", "j", "boundary", "B_prime_1", "sigma_sq"]);
            t.push(vec![
                Cell::Text(r.family.to_string()),
                Cell::Int(r.k as i64),
                Cell::float(r.u),
                Cell::float(r.rho),
                Cell::Text(join(&r.vanishing_indices)),
                r.j.map_or(Cell::Null, |j| Cell::Int(j as i64)),
                r.boundary.map_or(Cell::Null, |b| Cell::Text(b.to_string())),
                Cell::float(r.b_prime_1),
                Cell::float(r.sigma_sq),
            ]);
            t.write(Format::Csv, out)?;
        }
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

fn table1(from: u32, to: u32, format: Format, out: &mut impl Write) -> Outcome {
    if from == 0 || from > to {
        return Err(usage("need 1 <= --from <= --to"));
    }
    let mut t = Table::new(&["k", "j_plus_1", "sigma_sq_expr", "B_prime_1"]);
    for k in from..=to {
        let r = level_constants(k)?;
        t.push(vec![
            Cell::Int(k as i64),
            Cell::Int(r.j.expect("bounded levels report j") as i64 + 1),
            Cell::float(r.sigma_sq),
            Cell::float(r.b_prime_1),
        ]);
    }
    Ok(t.write(format, out)?)
}

fn profile(c: &Common, plot: bool, kind: NodeKind, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    if spec.family != Family::BoundedLevels {
        return Err(Error::Unsupported { what: "level profiles for bounded indices".into() }.into());
    }
    let sizes = c.sizes()?;
    let reports = profile_reports(&c.census(), spec.k, &sizes)?;
    if plot {
        let mut t = Table::new(&["level", "n", "mean"]);
        for r in &reports {
            for e in r.entries.iter().filter(|e| e.kind == kind) {
                t.push(vec![Cell::Int(e.level as i64), Cell::Int(e.n as i64), Cell::float(e.mean.to_f64())]);
            }
        }
        return Ok(t.write(c.format, out)?);
    }
    let mut t = Table::new(&["level", "kind", "n", "mean_numer", "mean_denom", "mean", "regime", "limit_constant"]);
    for r in &reports {
        for e in &r.entries {
            let mut row = vec![Cell::Int(e.level as i64), Cell::Text(e.kind.to_string()), Cell::Int(e.n as i64)];
            row.extend(Cell::ratio(&e.mean));
            row.push(Cell::Text(e.regime.to_string()));
            row.push(e.limit_constant.map_or(Cell::Null, Cell::float));
            t.push(row);
        }
    }
    Ok(t.write(c.format, out)?)
}

fn sample(c: &Common, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    let n = c.one_size()?;
    let m = c.samples.unwrap_or(1);
    let terms = sample_terms(&c.census(), spec, n, m, c.seed)?;
    match c.format {
        Format::Csv => {
            for t in &terms {
                writeln!(out, "{t}")?;
            }
        }
        Format::Json => {
            let texts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&texts).expect("json"))?;
        }
    }
    Ok(())
}

fn stats(c: &Common, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    let mark = c.mark(spec, MarkSpec::TotalLeaves)?;
    let n = c.one_size()?;
    let m = c.samples.unwrap_or(1000);
    if m == 0 {
        return Err(usage("--samples must be positive"));
    }
    let s = batch_stats(&c.census(), spec, mark, n, m, c.seed)?;
    match c.format {
        Format::Json => {
            let v = round_floats(serde_json::to_value(&s).expect("stats serialize"));
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
        }
        Format::Csv => {
            let mut t = Table::new(&[
                "family", "k", "mark", "n", "samples", "seed", "empirical_mean", "empirical_variance", "skewness",
                "excess_kurtosis", "exact_mean", "mean_z", "mean_flagged",
            ]);
            t.push(vec![
                Cell::Text(spec.family.to_string()),
                Cell::Int(spec.k as i64),
                Cell::Text(mark.to_string()),
                Cell::Int(n as i64),
                Cell::Int(m as i64),
                Cell::Text(c.seed.to_string()),
                Cell::float(s.empirical_mean),
                Cell::float(s.empirical_variance),
                Cell::float(s.skewness),
                Cell::float(s.excess_kurtosis),
                Cell::float(s.exact_mean),
                Cell::float(s.mean_z),
                Cell::Text(s.mean_flagged.to_string()),
            ]);
            t.write(Format::Csv, out)?;
        }
    }
    Ok(())
}

fn verify(c: &Common, out: &mut impl Write) -> Outcome {
    let spec = c.spec()?;
    let max = c.max_size.ok_or_else(|| usage("--max-size is required"))?;
    let v = verify_against_oracle(&c.census(), spec, max)?;
    if v.ok() {
        writeln!(out, "OK")?;
        Ok(())
    } else {
        for m in &v.mismatches {
            writeln!(out, "{m}")?;
        }
        Err(Failure::Mismatch(v.mismatches.len()))
    }
}
