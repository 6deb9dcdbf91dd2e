//! The `subdesign` command-line front end.
//!
//! Exit codes: 0 when the requested check holds, 1 when it is verified to
//! fail (a set that is not higgledy-piggledy, a recheck that does not
//! reproduce), 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::constructions::{
    build_design, existence_conditions, explore_omegas, CoefficientScheme, Design, Family,
};
use crate::designs::{
    dualize, lower_bound, verify, DesignReport, Scan, VerifyMode, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grassmann::{gaussian_binomial, Grassmannian};
use crate::linalg::Subspace;

/// Samples drawn when no mode is given and the Grassmannian exceeds the budget.
const AUTO_SAMPLES: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "subdesign",
    version,
    about = "Moment-curve subspace designs over finite fields"
)]
struct Cli {
    /// Field as `p`, `p^h` or `p^h:modulus=c0,...,1`
    #[arg(long, global = true)]
    field: Option<String>,
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Maximum number of candidate subspaces per scan
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a design and print its members
    Construct {
        /// Curve family: tangent, diverted or secant
        #[arg(long)]
        family: Family,
        /// Rank of each member
        #[arg(long)]
        r: usize,
        /// Codimension of each member
        #[arg(long)]
        s: usize,
        /// Canonical integer of omega; searched for when omitted
        #[arg(long)]
        omega: Option<u64>,
        /// List every omega with the first vanishing coefficient instead of building
        #[arg(long)]
        explore: bool,
    },
    /// Measure design parameters of a member set
    Verify {
        /// Design or member-set JSON file
        #[arg(long, required_unless_present = "recheck")]
        design: Option<PathBuf>,
        /// Measure the weak parameter
        #[arg(long)]
        weak: bool,
        /// Measure the strong parameter
        #[arg(long)]
        strong: bool,
        /// Check whether the members form a 1-generator set
        #[arg(long)]
        hp: bool,
        /// `exhaustive` or `sampled:N:SEED`
        #[arg(long)]
        mode: Option<String>,
        /// Re-verify the certificates of an earlier report
        #[arg(long, conflicts_with_all = ["design", "weak", "strong", "hp", "mode"])]
        recheck: Option<PathBuf>,
    },
    /// Replace every member by its orthogonal complement
    Dual {
        /// Design or member-set JSON file
        #[arg(long)]
        design: PathBuf,
    },
    /// Lower bounds on the size of higgledy-piggledy sets
    Bounds {
        /// Projective dimension of the space
        #[arg(long)]
        d: u64,
        /// Projective dimension of the generating subspaces
        #[arg(long)]
        k: u64,
        /// Field size cap, if any
        #[arg(long)]
        q: Option<u64>,
    },
    /// Stream all subspaces of a given rank
    Enumerate {
        /// Ambient dimension
        #[arg(long)]
        m: usize,
        /// Rank
        #[arg(long)]
        r: usize,
        /// Print only the number of subspaces
        #[arg(long)]
        count_only: bool,
    },
    /// Which sufficient conditions for strong designs hold
    Conditions {
        /// Rank of each member
        #[arg(long)]
        r: usize,
        /// Codimension of each member
        #[arg(long)]
        s: usize,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Construct {
            family,
            r,
            s,
            omega,
            explore,
        } => construct(cli, *family, *r, *s, *omega, *explore),
        Command::Verify {
            design,
            weak,
            strong,
            hp,
            mode,
            recheck,
        } => match recheck {
            Some(path) => recheck_report(cli, path),
            None => verify_design(
                cli,
                design.as_deref().expect("clap requires --design"),
                *weak,
                *strong,
                *hp,
                mode.as_deref(),
            ),
        },
        Command::Dual { design } => dual(cli, design),
        Command::Bounds { d, k, q } => {
            let b = lower_bound(*d, *k, *q)?;
            Ok((
                render(cli, &serde_json::to_value(b).expect("plain struct")),
                0,
            ))
        }
        Command::Enumerate { m, r, count_only } => enumerate(cli, *m, *r, *count_only),
        Command::Conditions { r, s } => {
            let c = existence_conditions(*r, *s, &required_field(cli)?)?;
            Ok((
                render(cli, &serde_json::to_value(c).expect("plain struct")),
                0,
            ))
        }
    }
}

fn required_field(cli: &Cli) -> Result<Field> {
    cli.field
        .as_deref()
        .ok_or_else(|| Error::Parse("--field is required".into()))?
        .parse()
}

fn render(cli: &Cli, value: &Value) -> String {
    match cli.format {
        Format::Json => format!("{value}\n"),
        Format::Table => table(value),
    }
}

fn table(value: &Value) -> String {
    match value {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k:<width$}  {s}\n"),
                    other => format!("{k:<width$}  {other}\n"),
                })
                .collect()
        }
        Value::Array(items) => items.iter().map(table).collect::<Vec<_>>().join("\n"),
        other => format!("{other}\n"),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// JSON form of a design: members keyed by the canonical integer of `t`.
pub fn design_json(design: &Design) -> Value {
    let sch = design.scheme();
    let mut members = Map::new();
    for m in design.members() {
        let mut entry = Map::new();
        entry.insert("rows".into(), json!(m.subspace.basis().to_ints()));
        entry.insert("pluecker".into(), m.pluecker.to_json());
        members.insert(m.t.index().to_string(), Value::Object(entry));
    }
    json!({
        "field": sch.field().to_string(),
        "family": sch.family().to_string(),
        "r": sch.r(),
        "s": sch.s(),
        "omega": sch.omega().map(|w| w.index()),
        "members": members,
    })
}

/// Reads a member set: a `field` string and `members`, either an array or an
/// object of `{"rows": [[...], ...]}` entries. `s` defaults to `m - r`.
pub fn members_from_json(
    value: &Value,
    field_override: Option<&Field>,
) -> Result<(Field, Vec<Subspace>, usize)> {
    let field: Field = match (value.get("field").and_then(Value::as_str), field_override) {
        (Some(f), None) => f.parse()?,
        (None, Some(f)) => f.clone(),
        (Some(f), Some(o)) => {
            let parsed: Field = f.parse()?;
            if &parsed != o {
                return Err(Error::Parse(format!(
                    "--field {o} disagrees with design field {parsed}"
                )));
            }
            parsed
        }
        (None, None) => return Err(Error::Parse("design has no `field`; pass --field".into())),
    };
    let entries: Vec<&Value> = match value.get("members") {
        Some(Value::Array(a)) => a.iter().collect(),
        Some(Value::Object(o)) => o.values().collect(),
        _ => {
            return Err(Error::Parse(
                "design needs a `members` array or object".into(),
            ))
        }
    };
    let members = entries
        .into_iter()
        .map(|v| Subspace::from_json(&field, v))
        .collect::<Result<Vec<_>>>()?;
    let first = members
        .first()
        .ok_or_else(|| Error::Parse("design has no members".into()))?;
    let s = match value.get("s").and_then(Value::as_u64) {
        Some(s) => s as usize,
        None => first.ambient() - first.rank(),
    };
    Ok((field, members, s))
}

fn construct(
    cli: &Cli,
    family: Family,
    r: usize,
    s: usize,
    omega: Option<u64>,
    explore: bool,
) -> Result<(String, i32)> {
    let field = required_field(cli)?;
    if explore {
        let rows: Vec<Value> = explore_omegas(&field, r, s, family)?
            .into_iter()
            .map(|(w, bad)| {
                json!({
                    "omega": w.index(),
                    "coeffs_nonzero": bad.is_none(),
                    "vanishing": bad.map(|t| t.to_string()),
                })
            })
            .collect();
        return Ok((render(cli, &Value::Array(rows)), 0));
    }
    let omega = match (family, omega) {
        (Family::Tangent, Some(_)) => {
            return Err(Error::InvalidScheme("tangent family takes no omega".into()))
        }
        (Family::Tangent, None) => None,
        (_, Some(w)) => Some(field.element(w)?),
        (_, None) => Some(
            crate::constructions::find_omega(&field, r, s, family)?.ok_or_else(|| {
                Error::InvalidScheme(format!("no omega in {field} works for the {family} family"))
            })?,
        ),
    };
    let scheme = CoefficientScheme::new(&field, family, r, s, omega)?;
    let design = build_design(&scheme)?;
    Ok((render(cli, &design_json(&design)), 0))
}

fn choose_scan(cli: &Cli, field: &Field, m: usize, s: usize, mode: Option<&str>) -> Result<Scan> {
    let mode = match mode {
        Some(text) => text.parse()?,
        None => {
            let total = gaussian_binomial(m, s, field.order())?;
            if total <= cli.budget.into() {
                VerifyMode::Exhaustive
            } else {
                VerifyMode::Sampled {
                    count: AUTO_SAMPLES.min(cli.budget),
                    seed: cli.seed,
                }
            }
        }
    };
    Ok(Scan {
        mode,
        budget: cli.budget,
    })
}

fn verify_design(
    cli: &Cli,
    path: &Path,
    weak: bool,
    strong: bool,
    hp: bool,
    mode: Option<&str>,
) -> Result<(String, i32)> {
    let override_field = cli.field.as_deref().map(str::parse::<Field>).transpose()?;
    let (field, members, s) = members_from_json(&read_json(path)?, override_field.as_ref())?;
    let (weak, strong) = if !weak && !strong && !hp {
        (true, true)
    } else {
        (weak, strong)
    };
    let scan = choose_scan(cli, &field, members[0].ambient(), s, mode)?;
    let report = verify(&members, s, &scan, weak, strong, hp)?;
    let code = match &report.hp {
        Some(v) if !v.is_generator => 1,
        _ => 0,
    };
    Ok((render(cli, &report.to_json()), code))
}

fn recheck_report(cli: &Cli, path: &Path) -> Result<(String, i32)> {
    let report = DesignReport::from_json(&read_json(path)?)?;
    let checks = report.recheck(cli.budget)?;
    let ok = checks.iter().all(|(_, ok)| *ok);
    let value = json!({
        "ok": ok,
        "checks": checks.iter().map(|(c, ok)| json!({"check": c, "ok": ok})).collect::<Vec<_>>(),
    });
    Ok((render(cli, &value), if ok { 0 } else { 1 }))
}

fn dual(cli: &Cli, path: &Path) -> Result<(String, i32)> {
    let value = read_json(path)?;
    let override_field = cli.field.as_deref().map(str::parse::<Field>).transpose()?;
    let (field, members, _) = members_from_json(&value, override_field.as_ref())?;
    let keys: Vec<String> = match value.get("members") {
        Some(Value::Object(o)) => o.keys().cloned().collect(),
        _ => (0..members.len()).map(|i| i.to_string()).collect(),
    };
    let r = members[0].rank();
    let mut out = Map::new();
    for (key, h) in keys.into_iter().zip(dualize(&members)) {
        out.insert(key, json!({ "rows": h.basis().to_ints() }));
    }
    let m = members[0].ambient();
    let value = json!({ "field": field.to_string(), "r": m - r, "s": r, "members": out });
    Ok((render(cli, &value), 0))
}

fn enumerate(cli: &Cli, m: usize, r: usize, count_only: bool) -> Result<(String, i32)> {
    let field = required_field(cli)?;
    let total = gaussian_binomial(m, r, field.order())?;
    if count_only {
        return Ok((format!("{total}\n"), 0));
    }
    if total > cli.budget.into() {
        return Err(Error::BudgetExceeded {
            needed: total.to_string(),
            budget: cli.budget,
        });
    }
    let grass = Grassmannian::new(&field, m, r)?;
    let text: Vec<String> = grass.iter().map(|s| s.to_text()).collect();
    Ok((text.join("\n"), 0))
}
