//! The `khr` command line.

pub mod cache;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use khr_core::dyck::{enumerate_paths, KnotParams};
use khr_core::sweep::{self, HhhProfile, IProfile};
use khr_core::verify::{self, Suite, VerifyOptions};
use khr_core::{formula, Invariant, KhrError};

use crate::cache::{Cache, CacheKey};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LINKS: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "khr", version, about = "Triply graded homology of torus knots")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Cache directory; caching is off when neither this nor KHR_CACHE_DIR is set.
    #[arg(long, env = "KHR_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,

    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Refuse to run when the number of Dyck paths exceeds this bound.
    #[arg(long, default_value_t = 10_000_000, global = true)]
    pub max_leaves: u128,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    /// Normalized knot invariant.
    #[value(name = "P", alias = "p")]
    P,
    /// Unnormalized triply graded series.
    #[value(name = "HHH", alias = "hhh")]
    Hhh,
    /// Graded Euler characteristic of P.
    #[value(name = "euler")]
    Euler,
}

impl Form {
    fn key(&self) -> &'static str {
        match self {
            Form::P => "P",
            Form::Hhh => "HHH",
            Form::Euler => "euler",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Hhh,
    I,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the invariant of the (m, n) torus knot.
    Compute {
        m: i64,
        n: i64,
        #[arg(long, value_enum, default_value_t = Form::P)]
        form: Form,
    },
    /// List the (m, n) Dyck paths.
    Paths {
        m: i64,
        n: i64,
        #[arg(long)]
        stats: bool,
    },
    /// Leaf table of the sweep recursion.
    Leaves {
        m: i64,
        n: i64,
        #[arg(long, value_enum, default_value_t = Profile::Hhh)]
        profile: Profile,
    },
    /// Run the verification suites for one pair or a range.
    Verify {
        m: Option<i64>,
        n: Option<i64>,
        /// All coprime pairs with bounded sum, e.g. "msum<=12".
        #[arg(long)]
        range: Option<String>,
        /// Comma-separated suites (default: all).
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Report symmetry failures as warnings.
        #[arg(long)]
        symmetry_warn: bool,
    },
    /// Number of Dyck paths, via the specialization a=0, q=t=1.
    Catalan { m: i64, n: i64 },
    /// Cache maintenance.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    /// Delete every cached entry.
    Clear,
    /// Print the cache directory.
    Path,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(KhrError),
    Io(std::io::Error),
}

impl From<KhrError> for Failure {
    fn from(e: KhrError) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `msum<=K`.
pub fn parse_range(s: &str) -> Option<i64> {
    let rest = s.trim().strip_prefix("msum")?.trim_start().strip_prefix("<=")?;
    rest.trim().parse().ok().filter(|k| *k >= 2)
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn params(&self, m: i64, n: i64) -> Result<KnotParams, Failure> {
        let p = KnotParams::new(m, n)?;
        let leaves = p.rational_catalan();
        if leaves > self.cli.max_leaves {
            return Err(Failure::Usage(format!(
                "{p} has {leaves} Dyck paths, above --max-leaves {}",
                self.cli.max_leaves
            )));
        }
        Ok(p)
    }

    fn cache(&self) -> Option<Cache> {
        if self.cli.no_cache {
            return None;
        }
        self.cli.cache_dir.as_ref().map(Cache::new)
    }

    fn emit_invariant(&mut self, v: &Invariant) -> std::io::Result<()> {
        match self.cli.format {
            Format::Text => writeln!(self.out, "{v}"),
            Format::Json => writeln!(self.out, "{}", v.to_json()),
            Format::Latex => writeln!(self.out, "{}", v.to_latex()),
        }
    }

    fn compute(&mut self, m: i64, n: i64, form: Form) -> Result<i32, Failure> {
        let p = self.params(m, n)?;
        let eval = || -> Result<Invariant, KhrError> {
            match form {
                Form::P => formula::invariant_p(p),
                Form::Hhh => formula::hhh_direct(p),
                Form::Euler => formula::euler_characteristic(&formula::invariant_p(p)?),
            }
        };
        let v = match self.cache() {
            Some(cache) => cache.get_or_compute(&CacheKey::new(m, n, form.key()), self.err, eval)?,
            None => eval()?,
        };
        self.emit_invariant(&v)?;
        Ok(EXIT_OK)
    }

    fn paths(&mut self, m: i64, n: i64, with_stats: bool) -> Result<i32, Failure> {
        let p = self.params(m, n)?;
        let paths = enumerate_paths(p);
        match (self.cli.format, with_stats) {
            (Format::Json, _) => {
                let rows = paths
                    .iter()
                    .map(|path| {
                        Ok(if with_stats {
                            json!({"path": path, "stats": path.stats()?})
                        } else {
                            json!(path)
                        })
                    })
                    .collect::<Result<Vec<_>, KhrError>>()?;
                writeln!(self.out, "{}", serde_json::Value::Array(rows))?;
            }
            (_, false) => {
                for path in &paths {
                    writeln!(self.out, "{path}")?;
                }
            }
            (_, true) => {
                for path in &paths {
                    let s = path.stats()?;
                    let vstar: Vec<_> = s.vstar.iter().map(|v| format!("{v}:{}", s.kvals[v])).collect();
                    writeln!(
                        self.out,
                        "{path}  area={} hplus={} opairs={} interior={} v*=[{}]",
                        s.area,
                        s.hplus,
                        s.opairs,
                        s.interior.len(),
                        vstar.join(" ")
                    )?;
                }
            }
        }
        Ok(EXIT_OK)
    }

    fn leaves(&mut self, m: i64, n: i64, profile: Profile) -> Result<i32, Failure> {
        let p = self.params(m, n)?;
        let eval = match profile {
            Profile::Hhh => sweep::evaluate(p, &HhhProfile)?,
            Profile::I => sweep::evaluate(p, &IProfile)?,
        };
        let rows = sweep::leaf_table(&eval, p)?;
        match self.cli.format {
            Format::Json => writeln!(self.out, "{}", serde_json::to_string(&rows).expect("leaf table serializes"))?,
            Format::Text => {
                for r in &rows {
                    writeln!(self.out, "{}  {}", r.path, r.value)?;
                }
                writeln!(self.out, "total  {}", eval.total)?;
            }
            Format::Latex => {
                for r in &rows {
                    writeln!(self.out, "{} & {} \\\\", r.path, r.value.to_latex())?;
                }
            }
        }
        Ok(EXIT_OK)
    }

    fn verify(
        &mut self,
        pair: Option<(i64, i64)>,
        range: Option<&str>,
        suites: &[String],
        symmetry_warn: bool,
    ) -> Result<i32, Failure> {
        let targets = match (pair, range) {
            (Some((m, n)), None) => vec![self.params(m, n)?],
            (None, Some(r)) => {
                let k = parse_range(r).ok_or_else(|| Failure::Usage(format!("bad range '{r}', expected msum<=K")))?;
                KnotParams::coprime_pairs_up_to(k)
                    .into_iter()
                    .map(|p| self.params(p.m(), p.n()))
                    .collect::<Result<Vec<_>, _>>()?
            }
            _ => return Err(Failure::Usage("give either M N or --range".into())),
        };
        let mut opts = VerifyOptions { symmetry_as_warning: symmetry_warn, ..Default::default() };
        if !suites.is_empty() {
            opts.suites = suites
                .iter()
                .map(|s| s.parse::<Suite>().map_err(|e| Failure::Usage(e.to_string())))
                .collect::<Result<BTreeSet<_>, _>>()?;
        }
        let mut all_pass = true;
        let mut reports = Vec::new();
        for p in targets {
            let r = verify::verify(p, &opts)?;
            all_pass &= r.pass;
            if self.cli.format == Format::Json {
                reports.push(r);
            } else {
                writeln!(self.out, "{r}")?;
            }
        }
        if self.cli.format == Format::Json {
            writeln!(self.out, "{}", serde_json::to_string(&reports).expect("reports serialize"))?;
        }
        Ok(if all_pass { EXIT_OK } else { EXIT_FAILED })
    }

    fn catalan(&mut self, m: i64, n: i64) -> Result<i32, Failure> {
        let p = self.params(m, n)?;
        let c = verify::catalan_check(p)?;
        match self.cli.format {
            Format::Json => writeln!(
                self.out,
                "{}",
                json!({"m": m, "n": n, "count": c.specialized, "rational_catalan": c.expected.to_string(), "pass": c.pass})
            )?,
            _ => writeln!(self.out, "{}", c.specialized)?,
        }
        Ok(if c.pass { EXIT_OK } else { EXIT_FAILED })
    }

    fn cache_cmd(&mut self, action: &CacheAction) -> Result<i32, Failure> {
        let Some(dir) = &self.cli.cache_dir else {
            return Err(Failure::Usage("no cache directory (use --cache-dir or KHR_CACHE_DIR)".into()));
        };
        let cache = Cache::new(dir);
        match action {
            CacheAction::Clear => {
                let n = cache.clear()?;
                writeln!(self.out, "removed {n} entries from {}", cache.dir().display())?;
            }
            CacheAction::Path => writeln!(self.out, "{}", cache.dir().display())?,
        }
        Ok(EXIT_OK)
    }

    fn dispatch(&mut self) -> Result<i32, Failure> {
        match &self.cli.command {
            Command::Compute { m, n, form } => self.compute(*m, *n, *form),
            Command::Paths { m, n, stats } => self.paths(*m, *n, *stats),
            Command::Leaves { m, n, profile } => self.leaves(*m, *n, *profile),
            Command::Verify { m, n, range, suite, symmetry_warn } => {
                let pair = match (m, n) {
                    (Some(m), Some(n)) => Some((*m, *n)),
                    (None, None) => None,
                    _ => return Err(Failure::Usage("verify needs both M and N".into())),
                };
                self.verify(pair, range.as_deref(), suite, *symmetry_warn)
            }
            Command::Catalan { m, n } => self.catalan(*m, *n),
            Command::Cache { action } => self.cache_cmd(action),
        }
    }
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return e.exit_code();
        }
    };
    let mut ctx = Ctx { cli: &cli, out, err };
    match ctx.dispatch() {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Core(e @ KhrError::LinksUnsupported { .. })) => {
            let _ = writeln!(ctx.err, "error: {e}");
            let _ = writeln!(
                ctx.err,
                "note: torus links (gcd(m, n) > 1) are out of scope"
            );
            EXIT_LINKS
        }
        Err(Failure::Core(e @ KhrError::InvalidParams { .. })) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_FAILED
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_FAILED
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_syntax() {
        assert_eq!(parse_range("msum<=12"), Some(12));
        assert_eq!(parse_range(" msum <= 7 "), Some(7));
        assert_eq!(parse_range("msum<12"), None);
        assert_eq!(parse_range("msum<=1"), None);
    }
}
