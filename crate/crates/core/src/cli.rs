//! The `ifp` command-line tool.
//!
//! Exit codes: 0 for an affirmative answer, 1 for a negative answer or a
//! malformed input file, 2 for usage errors, unreadable files and inputs
//! beyond the size limits.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::calculus::{check_proof_with, CheckOptions};
use crate::cirquent::Cirquent;
use crate::prover::{decide_with, reduce_to_classical_with, Decision, ProverError};
use crate::semantics::{
    compile_classical, countermodel_with, metatrue, truth_table_with, witness_metaselection_with,
    Dnf, Limits, SemanticsError,
};
use crate::syntax::{
    parse, parse_interpretation, parse_metaselection, parse_proof, print, print_interpretation,
    print_metaselection, print_proof,
};

#[derive(Debug, Parser)]
#[command(
    name = "ifp",
    version,
    about = "Cirquents of propositional IF logic: evaluate, prove, check"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Largest number of atoms enumerated by brute force.
    #[arg(long, default_value_t = Limits::default().max_atoms)]
    max_atoms: usize,
    /// Largest number of clusters enumerated by brute force.
    #[arg(long, default_value_t = Limits::default().max_clusters)]
    max_clusters: usize,
    /// Largest cirquent, in nodes, produced while searching or checking.
    #[arg(long, default_value_t = Limits::default().max_nodes)]
    max_nodes: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_atoms: self.max_atoms,
            max_clusters: self.max_clusters,
            max_nodes: self.max_nodes,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a cirquent and print it back.
    Parse {
        /// Renumber clusters in order of first appearance.
        #[arg(long)]
        canonical: bool,
        /// Print IDs of singleton clusters too.
        #[arg(long)]
        show_ids: bool,
        /// Input file, or `-` for standard input.
        file: String,
    },
    /// Evaluate under an interpretation, optionally with a fixed metaselection.
    Eval {
        /// Interpretation such as `p=1,q=0`.
        #[arg(long)]
        model: String,
        /// Metaselection such as `1=left,2=right`.
        #[arg(long)]
        metaselection: Option<String>,
        file: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Decide validity by enumerating interpretations and metaselections.
    Valid {
        file: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Construct a proof, or report a countermodel.
    Prove {
        file: String,
        /// Write the proof here instead of standard output.
        #[arg(short, long)]
        output: Option<String>,
        /// Write the termination measure of every cluster resolution step here.
        #[arg(long)]
        trace: Option<String>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Check a proof file.
    Check {
        proof: String,
        /// Ignore rule annotations and search for each step.
        #[arg(long)]
        infer: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Print a classical DNF equivalent and compare sizes.
    Compile {
        file: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Decide validity with the proof procedure.
    Decide {
        /// Emit JSON.
        #[arg(long)]
        json: bool,
        file: String,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

/// A failed command: message and exit code.
struct Failure(i32, String);

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        Failure(2, e.to_string())
    }
}

impl From<ProverError> for Failure {
    fn from(e: ProverError) -> Self {
        let code = match e {
            ProverError::Semantics(SemanticsError::TooLarge { .. }) => 2,
            ProverError::Calculus(crate::calculus::CalculusError::Semantics(
                SemanticsError::TooLarge { .. },
            )) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(2, e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, source: &str) -> Result<String, Failure> {
        if source == "-" {
            let mut text = String::new();
            self.stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure(2, format!("standard input: {e}")))?;
            Ok(text)
        } else {
            fs::read_to_string(source).map_err(|e| Failure(2, format!("{source}: {e}")))
        }
    }

    fn cirquent(&mut self, source: &str) -> Result<Cirquent, Failure> {
        let text = self.read(source)?;
        parse(text.trim()).map_err(|e| Failure(1, format!("{source}: {e}")))
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { stdin, out };
    match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "ifp: {message}");
            code
        }
    }
}

fn execute(command: Command, io: &mut Io<'_>) -> Result<i32, Failure> {
    match command {
        Command::Parse {
            canonical,
            show_ids,
            file,
        } => {
            let mut c = io.cirquent(&file)?;
            if canonical {
                c = c.canonicalize_ids();
            }
            writeln!(io.out, "{}", print(&c, show_ids))?;
            Ok(0)
        }
        Command::Eval {
            model,
            metaselection,
            file,
            limits,
        } => {
            let c = io.cirquent(&file)?;
            let i =
                parse_interpretation(&model).map_err(|e| Failure(2, format!("--model: {e}")))?;
            let truth = match metaselection {
                Some(text) => {
                    let f = parse_metaselection(&text)
                        .map_err(|e| Failure(2, format!("--metaselection: {e}")))?;
                    let truth = metatrue(&c, &i, &f)?;
                    writeln!(
                        io.out,
                        "{}",
                        if truth { "metatrue" } else { "not metatrue" }
                    )?;
                    truth
                }
                None => match witness_metaselection_with(&c, &i, &limits.limits())? {
                    Some(f) => {
                        writeln!(io.out, "true")?;
                        writeln!(io.out, "witness: {}", print_metaselection(&f))?;
                        true
                    }
                    None => {
                        writeln!(io.out, "false")?;
                        false
                    }
                },
            };
            Ok(if truth { 0 } else { 1 })
        }
        Command::Valid { file, limits } => {
            let c = io.cirquent(&file)?;
            match countermodel_with(&c, &limits.limits())? {
                None => {
                    writeln!(io.out, "valid")?;
                    Ok(0)
                }
                Some(i) => {
                    writeln!(io.out, "invalid")?;
                    writeln!(io.out, "countermodel: {}", print_interpretation(&i))?;
                    Ok(1)
                }
            }
        }
        Command::Prove {
            file,
            output,
            trace,
            limits,
        } => {
            let c = io.cirquent(&file)?;
            let limits = limits.limits();
            if let Some(trace_path) = trace {
                let d = reduce_to_classical_with(&c, &limits)?;
                let lines: String = d
                    .runs
                    .iter()
                    .flat_map(|run| run.trace.iter())
                    .map(|state| format!("{state}\n"))
                    .collect();
                fs::write(&trace_path, lines)
                    .map_err(|e| Failure(2, format!("{trace_path}: {e}")))?;
            }
            match decide_with(&c, &limits)? {
                Decision::Valid(ps) => {
                    let text = print_proof(&ps);
                    match output {
                        Some(path) => fs::write(&path, text)
                            .map_err(|e| Failure(2, format!("{path}: {e}")))?,
                        None => io.out.write_all(text.as_bytes())?,
                    }
                    Ok(0)
                }
                Decision::Invalid(i) => {
                    writeln!(io.out, "invalid")?;
                    writeln!(io.out, "countermodel: {}", print_interpretation(&i))?;
                    Ok(1)
                }
            }
        }
        Command::Check {
            proof,
            infer,
            limits,
        } => {
            let text = io.read(&proof)?;
            let ps = parse_proof(&text).map_err(|e| Failure(1, format!("{proof}: {e}")))?;
            let options = CheckOptions {
                use_hints: !infer,
                limits: limits.limits(),
            };
            match check_proof_with(&ps, &options) {
                Ok(apps) => {
                    writeln!(io.out, "ok: {} lines", ps.len())?;
                    for (n, app) in apps.iter().enumerate() {
                        writeln!(io.out, "{}. {} path={}", n + 2, app.rule, app.hole)?;
                    }
                    Ok(0)
                }
                Err(failure) => Err(Failure(1, format!("{proof}: {failure}"))),
            }
        }
        Command::Compile { file, limits } => {
            let c = io.cirquent(&file)?;
            let table = truth_table_with(&c, &limits.limits())?;
            let dnf_size = match compile_classical(&table) {
                Dnf::Formula(f) => {
                    writeln!(io.out, "{}", print(&f, false))?;
                    f.size()
                }
                Dnf::Unsatisfiable => {
                    writeln!(io.out, "unsatisfiable")?;
                    0
                }
            };
            writeln!(io.out, "cirquent size: {}", c.size())?;
            writeln!(io.out, "dnf size: {dnf_size}")?;
            writeln!(io.out, "ratio: {:.3}", dnf_size as f64 / c.size() as f64)?;
            Ok(0)
        }
        Command::Decide { json, file, limits } => {
            let c = io.cirquent(&file)?;
            let decision = decide_with(&c, &limits.limits())?;
            if json {
                let value = match &decision {
                    Decision::Valid(ps) => json!({
                        "status": "valid",
                        "proof": print_proof(ps).lines().collect::<Vec<_>>(),
                    }),
                    Decision::Invalid(i) => {
                        let model: Map<String, Value> = i
                            .iter()
                            .map(|(atom, value)| (atom.to_string(), Value::Bool(value)))
                            .collect();
                        json!({ "status": "invalid", "countermodel": model })
                    }
                };
                writeln!(io.out, "{value}")?;
            } else {
                match &decision {
                    Decision::Valid(ps) => {
                        writeln!(io.out, "valid")?;
                        io.out.write_all(print_proof(ps).as_bytes())?;
                    }
                    Decision::Invalid(i) => {
                        writeln!(io.out, "invalid")?;
                        writeln!(io.out, "countermodel: {}", print_interpretation(i))?;
                    }
                }
            }
            Ok(match decision {
                Decision::Valid(_) => 0,
                Decision::Invalid(_) => 1,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ifp").chain(args.iter().copied());
        let code = run(argv, &mut input, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn parse_from_stdin() {
        assert_eq!(
            invoke(&["parse", "-"], "p|~p"),
            (0, "(p|~p)\n".into(), String::new())
        );
        let (code, _, err) = invoke(&["parse", "-"], "p|");
        assert_eq!(code, 1);
        assert!(err.contains("syntax error"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(invoke(&["frobnicate"], "").0, 2);
        assert_eq!(invoke(&["eval", "--model", "p=7", "-"], "p").0, 2);
        assert_eq!(invoke(&["valid", "/nonexistent/file"], "").0, 2);
    }

    #[test]
    fn eval_and_valid() {
        let (code, out, _) = invoke(&["eval", "--model", "p=1,q=0", "-"], "(p|1 q)&(~p|1 ~q)");
        assert_eq!((code, out.as_str()), (1, "false\n"));
        let (code, out, _) = invoke(&["eval", "--model", "p=1,q=0", "-"], "(p|q)&(~p|~q)");
        assert_eq!(code, 0);
        assert!(out.starts_with("true\nwitness: "));
        let (code, out, _) = invoke(
            &[
                "eval",
                "--model",
                "p=1,q=0",
                "--metaselection",
                "1=left",
                "-",
            ],
            "(p|1 q)&(~p|1 ~q)",
        );
        assert_eq!((code, out.as_str()), (1, "not metatrue\n"));
        let (code, out, _) = invoke(&["valid", "-"], "(p|1 q)&(~p|1 ~q)");
        assert_eq!(
            (code, out.as_str()),
            (1, "invalid\ncountermodel: p=0,q=0\n")
        );
    }

    #[test]
    fn decide_json() {
        let (code, out, _) = invoke(&["decide", "--json", "-"], "(p|1 q)&(~p|1 ~q)");
        assert_eq!(code, 1);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(
            value,
            json!({"status": "invalid", "countermodel": {"p": false, "q": false}})
        );
        let (code, out, _) = invoke(&["decide", "--json", "-"], "p|~p");
        assert_eq!(code, 0);
        let value: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["status"], "valid");
        assert_eq!(value["proof"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn compile_reports_sizes() {
        let (code, out, _) = invoke(&["compile", "-"], "p&~p");
        assert_eq!(code, 0);
        assert!(out.starts_with("unsatisfiable\ncirquent size: 3\n"));
    }
}
