//! The `gonorm` command line.
//!
//! Exit codes: 0 on success, 1 when the input violates a dependency or a
//! normal form, 2 on usage, parse and I/O errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::gofd::{applicable_deps, minimal_cover, satisfies, GnSchema, GoFd};
use crate::graph::Graph;
use crate::metrics::{per_graph_metrics, profile, report, round2, schema_counts};
use crate::normalform::{check_gn_nf, NormalForm};
use crate::normalize::{full_normalize, scoped_normalize};
use crate::parser::{format_schema, parse_pattern, parse_schema_document};
use crate::pattern::{format_tuple, GraphPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    #[value(name = "3nf")]
    Third,
    Bcnf,
}

#[derive(Debug, Parser)]
#[command(name = "gonorm", version, about = "Normalize labeled property graphs guided by graph object functional dependencies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Graph file (JSON).
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Schema file, one dependency per line.
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    /// Restrict to one scope, e.g. "(x:{Course}:{title})".
    #[arg(long, global = true)]
    pub scope: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value = "bcnf")]
    pub form: Form,
    /// With normalize: print the plans and write <out>.log.json.
    #[arg(long, global = true)]
    pub explain: bool,
    #[arg(long, global = true, default_value_t = crate::normalform::DEFAULT_MAX_ATTRS)]
    pub max_attrs: usize,
    #[arg(long, global = true, default_value_t = 5)]
    pub max_witnesses: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check that the graph satisfies every dependency.
    Check,
    /// Print the minimal cover per scope, or for --scope.
    Mincover,
    /// Graph, schema and per-dependency redundancy metrics.
    Metrics,
    /// Check the schema for GN-3NF or GN-BCNF.
    Nf,
    /// Normalize the graph; writes <out>.graph.json and <out>.schema.gofd.
    Normalize,
    /// Validate a graph file and write it back in canonical form.
    Convert,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    Violation,
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        Error::Parse {
            line,
            column,
            offset,
            message,
            expected,
        } => Error::Parse {
            line,
            column,
            offset,
            message: format!("{}: {message}", path.display()),
            expected,
        },
        other => other,
    }
}

impl Ctx<'_> {
    fn json(&self) -> bool {
        self.cli.format == Format::Json
    }

    fn emit_json(&mut self, value: &serde_json::Value) -> Result<()> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(value).expect("json values serialize"))?;
        Ok(())
    }

    fn require<'p>(&self, path: &'p Option<PathBuf>, flag: &str) -> Result<&'p PathBuf> {
        path.as_ref().ok_or_else(|| Error::Format(format!("--{flag} is required for this command")))
    }

    fn graph(&mut self) -> Result<Graph> {
        let path = self.require(&self.cli.graph, "graph")?;
        let file = File::open(path).map_err(|e| with_path(path, e.into()))?;
        Graph::load(BufReader::new(file)).map_err(|e| with_path(path, e))
    }

    fn schema(&mut self) -> Result<GnSchema> {
        let path = self.require(&self.cli.schema, "schema")?.clone();
        let text = std::fs::read_to_string(&path).map_err(|e| with_path(&path, e.into()))?;
        let doc = parse_schema_document(&text).map_err(|e| with_path(&path, e))?;
        for w in &doc.warnings {
            writeln!(self.err, "warning: {}: {w}", path.display())?;
        }
        Ok(doc.schema())
    }

    fn scope(&self) -> Result<Option<GraphPattern>> {
        self.cli.scope.as_deref().map(parse_pattern).transpose()
    }

    fn check(&mut self) -> Result<Outcome> {
        let g = self.graph()?;
        let sigma = self.schema()?;
        let mut all = true;
        let mut entries = Vec::new();
        for dep in &sigma {
            let sat = satisfies(&g, dep, self.cli.max_witnesses)?;
            all &= sat.holds;
            let witnesses: Vec<[String; 2]> = sat
                .witnesses
                .iter()
                .map(|(a, b)| [format_tuple(a), format_tuple(b)])
                .collect();
            if !self.json() {
                writeln!(self.out, "{} {dep}", if sat.holds { "ok  " } else { "FAIL" })?;
                for [a, b] in &witnesses {
                    writeln!(self.out, "     {a}\n     {b}")?;
                }
            }
            entries.push(json!({"gofd": dep.to_string(), "holds": sat.holds, "witnesses": witnesses}));
        }
        if self.json() {
            self.emit_json(&json!({"holds": all, "dependencies": entries}))?;
        }
        Ok(if all { Outcome::Ok } else { Outcome::Violation })
    }

    fn mincover(&mut self) -> Result<Outcome> {
        let sigma = self.schema()?;
        let groups: Vec<(GraphPattern, Vec<GoFd>)> = match self.scope()? {
            Some(q) => {
                let deps = applicable_deps(&sigma, &q);
                vec![(q, deps)]
            }
            None => sigma
                .scopes()
                .into_iter()
                .map(|q| {
                    let deps = sigma.iter().filter(|d| d.scope == q).cloned().collect();
                    (q, deps)
                })
                .collect(),
        };
        let mut entries = Vec::new();
        for (q, deps) in groups {
            let cover = minimal_cover(&deps)?;
            if !self.json() {
                for d in &cover {
                    writeln!(self.out, "{d}")?;
                }
            }
            entries.push(json!({
                "scope": q.to_string(),
                "cover": cover.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            }));
        }
        if self.json() {
            self.emit_json(&json!(entries))?;
        }
        Ok(Outcome::Ok)
    }

    fn metrics(&mut self) -> Result<Outcome> {
        let g = self.graph()?;
        let sigma = self.schema()?;
        if self.json() {
            let r = report(&g, &sigma)?;
            self.emit_json(&r)?;
            return Ok(Outcome::Ok);
        }
        let m = per_graph_metrics(&g);
        let c = schema_counts(&sigma);
        writeln!(
            self.out,
            "nodes {}  edges {}  avg node props {:.2}  avg edge props {:.2}",
            m.node_count,
            m.edge_count,
            round2(m.avg_node_props),
            round2(m.avg_edge_props)
        )?;
        writeln!(
            self.out,
            "dependencies {}  within-node {}  within-edge {}  between {}",
            c.total, c.within_node, c.within_edge, c.between
        )?;
        for dep in &sigma {
            let p = profile(&g, dep)?;
            let m: Vec<String> = p.potentials.iter().map(|n| n.to_string()).collect();
            writeln!(self.out, "{dep}")?;
            writeln!(
                self.out,
                "  M=[{}]  max {}  avg {:.2}  minimality {:.2}{}",
                m.join(","),
                p.max,
                round2(p.avg),
                round2(p.minimality),
                if p.empty { "  (no matches)" } else { "" }
            )?;
        }
        Ok(Outcome::Ok)
    }

    fn nf(&mut self) -> Result<Outcome> {
        let sigma = self.schema()?;
        let form = match self.cli.form {
            Form::Third => NormalForm::Gn3nf,
            Form::Bcnf => NormalForm::GnBcnf,
        };
        let r = check_gn_nf(form, &sigma, self.cli.max_attrs)?;
        if self.json() {
            let v: Vec<_> = r
                .violations
                .iter()
                .map(|v| json!({"scope": v.scope.to_string(), "dependency": v.dependency.to_string(), "reason": v.reason}))
                .collect();
            self.emit_json(&json!({"form": r.form, "holds": r.holds, "violations": v}))?;
        } else {
            writeln!(self.out, "{} {}", r.form, if r.holds { "holds" } else { "violated" })?;
            for v in &r.violations {
                writeln!(self.out, "  {}", v.dependency)?;
            }
        }
        Ok(if r.holds { Outcome::Ok } else { Outcome::Violation })
    }

    fn normalize(&mut self) -> Result<Outcome> {
        let g = self.graph()?;
        let sigma = self.schema()?;
        let out = self.require(&self.cli.out, "out")?.clone();
        let r = match self.scope()? {
            Some(q) => scoped_normalize(&q, &sigma, &g)?,
            None => full_normalize(&sigma, &g)?,
        };
        let with_suffix = |suffix: &str| {
            let mut p = out.clone().into_os_string();
            p.push(suffix);
            PathBuf::from(p)
        };
        std::fs::write(with_suffix(".graph.json"), r.graph.to_json_string())?;
        std::fs::write(with_suffix(".schema.gofd"), format_schema(&r.schema))?;
        for pass in &r.log {
            for d in &pass.skipped {
                writeln!(self.err, "warning: not strict, left as is: {d}")?;
            }
            for d in &pass.dropped {
                writeln!(self.err, "note: no longer matches, dropped: {d}")?;
            }
        }
        let passes: Vec<_> = r.log.iter().map(|p| p.to_json()).collect();
        let log = json!({"passes": passes});
        if self.cli.explain {
            std::fs::write(with_suffix(".log.json"), serde_json::to_string_pretty(&log).expect("json") + "\n")?;
        }
        if self.json() {
            let summary = json!({
                "graph": with_suffix(".graph.json").display().to_string(),
                "schema": with_suffix(".schema.gofd").display().to_string(),
                "transformations": r.log.iter().map(|p| p.transformations.len()).sum::<usize>(),
                "passes": if self.cli.explain { log["passes"].clone() } else { json!(r.log.len()) },
            });
            self.emit_json(&summary)?;
        } else {
            for pass in &r.log {
                let scope = pass.scope.as_ref().map(|q| q.to_string()).unwrap_or_default();
                writeln!(
                    self.out,
                    "{scope}: {} transformation(s), +{}/-{} nodes, +{}/-{} edges",
                    pass.transformations.len(),
                    pass.nodes_added,
                    pass.nodes_removed,
                    pass.edges_added,
                    pass.edges_removed
                )?;
                if self.cli.explain {
                    for t in &pass.transformations {
                        writeln!(self.out, "  {} for {}", t.kind, t.source)?;
                        for step in t.create.iter().chain(&t.remove) {
                            writeln!(self.out, "    {step}")?;
                        }
                    }
                }
            }
            writeln!(self.out, "wrote {} and {}", with_suffix(".graph.json").display(), with_suffix(".schema.gofd").display())?;
        }
        Ok(Outcome::Ok)
    }

    fn convert(&mut self) -> Result<Outcome> {
        let g = self.graph()?;
        let text = g.to_json_string();
        match &self.cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => self.out.write_all(text.as_bytes())?,
        }
        Ok(Outcome::Ok)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsatisfiedDependency { .. } | Error::PropertyConflict { .. } => 1,
        _ => 2,
    }
}

/// Runs the command line with explicit output streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let mut ctx = Ctx { cli: &cli, out, err };
    let result = match cli.command {
        Command::Check => ctx.check(),
        Command::Mincover => ctx.mincover(),
        Command::Metrics => ctx.metrics(),
        Command::Nf => ctx.nf(),
        Command::Normalize => ctx.normalize(),
        Command::Convert => ctx.convert(),
    };
    match result {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Violation) => 1,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            if let Error::UnsatisfiedDependency { witnesses, .. } = &e {
                for (a, b) in witnesses {
                    let _ = writeln!(ctx.err, "  {a}\n  {b}");
                }
            }
            exit_code(&e)
        }
    }
}
