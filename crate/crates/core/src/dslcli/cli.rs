use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use super::report::{self, Outcome};
use super::{load, Document, DslError, SCHEMA};
use crate::cdgacore::Window;
use crate::repsemi::{IrrLabel, SemisimpleObject};

#[derive(Parser, Debug)]
#[command(
    name = "dga",
    about = "Exact computations with Adams-graded cdgas and their connections"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the cdga and connection axioms of every object in the file.
    Check { file: PathBuf },
    /// Cohomology table on a window `n0:n1,r0:r1`.
    Cohomology {
        file: PathBuf,
        #[arg(long, value_parser = parse_window)]
        window: Window,
        #[arg(long)]
        cdga: Option<String>,
    },
    /// Bar slices and the Hopf algebra H^0 up to an Adams cutoff.
    Bar {
        file: PathBuf,
        #[arg(long)]
        adams_max: i64,
        #[arg(long)]
        cdga: Option<String>,
    },
    /// Indecomposables of H^0 of the bar construction and their Sullivan algebra.
    Gamma {
        file: PathBuf,
        #[arg(long)]
        adams_max: i64,
        #[arg(long)]
        cdga: Option<String>,
    },
    /// n-minimal model up to an Adams cutoff.
    Minimal {
        file: PathBuf,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        adams_max: i64,
        #[arg(long)]
        cdga: Option<String>,
    },
    /// Operations on connections.
    Module {
        #[command(subcommand)]
        op: ModuleCmd,
    },
    /// Full JSON dump of one file, or of every `.dga` file in a directory.
    Report {
        path: PathBuf,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ModuleCmd {
    Check {
        file: PathBuf,
        #[arg(long)]
        module: Option<String>,
    },
    Heart {
        file: PathBuf,
        #[arg(long)]
        module: Option<String>,
    },
    Truncate {
        file: PathBuf,
        #[arg(long)]
        module: Option<String>,
    },
    Qiso {
        file: PathBuf,
        #[arg(long)]
        map: String,
    },
    /// Ext of co-representations; V and W are comma-separated labels.
    Ext {
        file: PathBuf,
        #[arg(long, value_parser = parse_object)]
        v: SemisimpleObject,
        #[arg(long, value_parser = parse_object)]
        w: SemisimpleObject,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        adams_max: i64,
        #[arg(long)]
        cdga: Option<String>,
    },
}

fn parse_window(s: &str) -> Result<Window, String> {
    let bad = || format!("expected n0:n1,r0:r1, got `{s}`");
    let (n, r) = s.split_once(',').ok_or_else(bad)?;
    let range = |t: &str| -> Result<(i64, i64), String> {
        let (a, b) = t.split_once(':').ok_or_else(bad)?;
        Ok((
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ))
    };
    let ((n0, n1), (r0, r1)) = (range(n)?, range(r)?);
    Ok(Window::new(n0, n1, r0, r1))
}

fn parse_object(s: &str) -> Result<SemisimpleObject, String> {
    let mut labels = Vec::new();
    // split on commas outside parentheses
    let mut depth = 0;
    let mut cur = String::new();
    for c in s.chars().chain(std::iter::once(',')) {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    labels.push(cur.trim().parse::<IrrLabel>().map_err(|e| e.to_string())?);
                }
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    Ok(SemisimpleObject::from_labels(&labels))
}

fn read(path: &Path) -> Result<Document, DslError> {
    load(&std::fs::read_to_string(path)?)
}

fn wrap(command: &str, o: Outcome) -> Outcome {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    if let Value::Object(body) = o.json {
        m.extend(body);
    }
    Outcome {
        json: Value::Object(m),
        violation: o.violation,
    }
}

fn report_all(dir: &Path) -> Result<Outcome, DslError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dga"))
        .collect();
    files.sort();
    let mut out = Map::new();
    let mut violation = false;
    for f in files {
        let stem = f.file_stem().unwrap().to_string_lossy().into_owned();
        let o = report::file_report(&read(&f)?)?;
        violation |= o.violation;
        out.insert(stem, o.json);
    }
    Ok(Outcome {
        json: serde_json::json!({ "files": out }),
        violation,
    })
}

fn dispatch(cmd: Cmd) -> Result<Outcome, DslError> {
    Ok(match cmd {
        Cmd::Check { file } => wrap("check", report::check(&read(&file)?)?),
        Cmd::Cohomology { file, window, cdga } => wrap(
            "cohomology",
            report::cohomology(&read(&file)?, cdga.as_deref(), window)?,
        ),
        Cmd::Bar {
            file,
            adams_max,
            cdga,
        } => wrap(
            "bar",
            report::bar(&read(&file)?, cdga.as_deref(), adams_max)?,
        ),
        Cmd::Gamma {
            file,
            adams_max,
            cdga,
        } => wrap(
            "gamma",
            report::gamma(&read(&file)?, cdga.as_deref(), adams_max)?,
        ),
        Cmd::Minimal {
            file,
            n,
            adams_max,
            cdga,
        } => wrap(
            "minimal",
            report::minimal(&read(&file)?, cdga.as_deref(), n, adams_max)?,
        ),
        Cmd::Module { op } => match op {
            ModuleCmd::Check { file, module } => wrap(
                "module check",
                report::module_check(&read(&file)?, module.as_deref())?,
            ),
            ModuleCmd::Heart { file, module } => wrap(
                "module heart",
                report::module_heart(&read(&file)?, module.as_deref())?,
            ),
            ModuleCmd::Truncate { file, module } => wrap(
                "module truncate",
                report::module_truncate(&read(&file)?, module.as_deref())?,
            ),
            ModuleCmd::Qiso { file, map } => {
                wrap("module qiso", report::module_qiso(&read(&file)?, &map)?)
            }
            ModuleCmd::Ext {
                file,
                v,
                w,
                k,
                adams_max,
                cdga,
            } => wrap(
                "module ext",
                report::module_ext(&read(&file)?, cdga.as_deref(), &v, &w, k, adams_max)?,
            ),
        },
        Cmd::Report { path, all } => {
            if all {
                wrap("report", report_all(&path)?)
            } else {
                wrap("report", report::file_report(&read(&path)?)?)
            }
        }
    })
}

/// Runs the command line. Exit code 0 on success, 1 when a mathematical
/// violation was found, 2 on usage or input errors.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(o) => {
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&o.json).expect("serializable")
            );
            if o.violation {
                1
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
