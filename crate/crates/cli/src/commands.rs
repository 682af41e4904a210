use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use segre_core::classify::{
    format_grid, perfect_check, resolve_secant, scan_rows, secant_profile, ClassifyConfig, SecantRow, Status,
};
use segre_core::ffrank::{FieldConfig, SECONDARY_PRIME};
use segre_core::induction::{verify, Certificate, Prover, SearchBudget, Verdict};
use segre_core::{Format, Statement};

use crate::cache::{sha256_hex, Cache};
use crate::{Cli, Command, RunArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    FalseOrRejected = 1,
    Usage = 2,
    Undetermined = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

/// Everything that can change a result.
#[derive(Debug, Clone, Copy, Serialize)]
struct RunConfig {
    prime: u64,
    seed: u64,
    retries: u32,
    budget_nodes: usize,
    budget_cols: u64,
    force: bool,
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Self {
        Self {
            prime: a.prime,
            seed: a.seed,
            retries: a.retries,
            budget_nodes: a.budget_nodes,
            budget_cols: a.budget_cols,
            force: a.force,
        }
    }

    fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        sha256_hex(&bytes)[..16].to_string()
    }

    fn field(&self) -> Result<FieldConfig> {
        let cfg = FieldConfig {
            prime: self.prime,
            seed: self.seed,
            retries: self.retries,
            secondary_prime: SECONDARY_PRIME,
            column_budget: self.budget_cols as u128,
            force: self.force,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: self.budget_nodes,
            oracle_cols: self.budget_cols as u128,
            ..SearchBudget::default()
        }
    }

    fn classify(&self) -> Result<ClassifyConfig> {
        Ok(ClassifyConfig {
            field: self.field()?,
            budget: SearchBudget {
                max_nodes: self.budget_nodes.min(ClassifyConfig::default().budget.max_nodes),
                ..self.budget()
            },
            induction: true,
        })
    }
}

pub fn run(cli: &Cli) -> Result<Exit> {
    let rc = RunConfig::from_args(&cli.run);
    let cache = match &cli.run.cache {
        Some(p) => Cache::open(p)?,
        None => Cache::disabled(),
    };
    let json = cli.run.json;
    match &cli.cmd {
        Command::Dim { format, s } => dim(&rc, json, format, *s),
        Command::Prove { statement, out } => prove(&rc, &cache, json, statement, out.as_deref()),
        Command::Classify { format } => classify(&rc, json, format),
        Command::Scan { k, k_max, max_n, max_r } => {
            let ks: Vec<usize> = match k {
                Some(k) => vec![*k],
                None => (3..=*k_max).collect(),
            };
            scan(&rc, &cache, json, &ks, *max_n, *max_r)
        }
        Command::Verify { path, recheck_oracle } => verify_cmd(json, path, *recheck_oracle),
    }
}

fn parse_format(text: &str) -> Result<Format> {
    text.parse::<Format>().map_err(|e| anyhow!("cannot parse format {text:?}: {e}"))
}

fn scope_note(f: &Format) -> Option<String> {
    (!f.in_classical_scope()).then(|| format!("note: k = {} is outside the classified range k >= 3", f.k()))
}

fn actual_dim(row: &SecantRow) -> Option<u64> {
    match row.status {
        Status::NonDefective => Some(row.expected),
        Status::Defective(d) | Status::EvidenceDefective(d) => Some(row.expected - d),
        Status::Unknown => None,
    }
}

fn opt(x: Option<u64>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

fn dim(rc: &RunConfig, json: bool, format: &str, s: u32) -> Result<Exit> {
    let f = parse_format(format)?;
    let row = resolve_secant(&f, s, &rc.classify()?);
    if json {
        #[derive(Serialize)]
        struct DimReport<'a> {
            #[serde(flatten)]
            row: &'a SecantRow,
            projective_expected: i64,
            actual: Option<u64>,
            in_scope: bool,
        }
        let rep = DimReport {
            row: &row,
            projective_expected: row.expected as i64 - 1,
            actual: actual_dim(&row),
            in_scope: f.in_classical_scope(),
        };
        println!("{}", serde_json::to_string(&rep)?);
    } else {
        println!("format     {} (ambient {})", row.format, f.ambient_dim());
        println!("s          {s}");
        println!("expected   affine {}, projective {}", row.expected, row.expected as i64 - 1);
        match actual_dim(&row) {
            Some(a) => println!("actual     affine {a}, projective {}", a as i64 - 1),
            None => println!("actual     unknown"),
        }
        println!("bounds     lower {}, upper {}", opt(row.lower), opt(row.upper));
        println!("status     {}", row.status);
        println!("source     {}", row.cert_ref.as_deref().unwrap_or("-"));
        if let Some(n) = scope_note(&f) {
            println!("{n}");
        }
    }
    Ok(if row.status == Status::Unknown {
        Exit::Undetermined
    } else {
        Exit::Ok
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProvePayload {
    label: String,
    detail: String,
    certificate: Option<Certificate>,
}

fn leaf_summary(c: &Certificate) -> String {
    let counts: BTreeMap<_, _> = c.node.leaf_counts();
    let mut out = String::new();
    for (k, v) in counts {
        if !out.is_empty() {
            out.push(' ');
        }
        write!(out, "{k}={v}").expect("string write");
    }
    out
}

fn prove(rc: &RunConfig, cache: &Cache, json: bool, text: &str, out: Option<&std::path::Path>) -> Result<Exit> {
    let st: Statement = text
        .parse()
        .map_err(|e| anyhow!("cannot parse statement {text:?}: {e}"))?;
    let key = st.canonical().to_string();
    let digest = rc.digest();
    let payload = match cache.lookup("prove", &key, &digest) {
        Some(rec) => {
            let mut p: ProvePayload = serde_json::from_value(rec.payload.clone()).context("cached prove record")?;
            if let Some(c) = p.certificate.as_mut() {
                c.statement = st.clone();
            }
            p
        }
        None => {
            let mut prover = Prover::new(rc.field()?, rc.budget());
            let v = prover.prove(&st);
            let p = match &v {
                Verdict::True(c) | Verdict::False(c) => ProvePayload {
                    label: v.label().into(),
                    detail: leaf_summary(c),
                    certificate: Some(c.clone()),
                },
                Verdict::Undetermined(u) => ProvePayload {
                    label: v.label().into(),
                    detail: format!(
                        "nodes={} best_rank={} target={}",
                        u.stats.nodes,
                        u.best.as_ref().map_or_else(|| "-".into(), |w| w.rank.to_string()),
                        u.target
                    ),
                    certificate: None,
                },
            };
            let cert_text = p.certificate.as_ref().map(Certificate::to_json);
            cache.append("prove", &key, &digest, &p.label, cert_text.as_deref(), serde_json::to_value(&p)?)?;
            p
        }
    };
    if let (Some(path), Some(c)) = (out, &payload.certificate) {
        std::fs::write(path, c.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        println!(
            "{}",
            serde_json::to_string(&serde_json::json!({
                "verdict": payload.label,
                "statement": st.to_string(),
                "detail": payload.detail,
                "certificate": payload.certificate,
            }))?
        );
    } else {
        println!("{} {} {}", payload.label, st, payload.detail);
    }
    Ok(match payload.label.as_str() {
        "TRUE" => Exit::Ok,
        "FALSE" => Exit::FalseOrRejected,
        _ => Exit::Undetermined,
    })
}

fn classify(rc: &RunConfig, json: bool, format: &str) -> Result<Exit> {
    let f = parse_format(format)?;
    let cfg = rc.classify()?;
    let profile = secant_profile(&f, &cfg);
    let perfect = perfect_check(&f, &cfg);
    let ambient = f.ambient_dim() as u64;
    if json {
        for r in &profile.rows {
            println!("{}", serde_json::to_string(r)?);
        }
        println!(
            "{}",
            serde_json::to_string(&serde_json::json!({
                "format": profile.format,
                "typical_rank": profile.typical_rank,
                "perfect": perfect,
            }))?
        );
    } else {
        println!("format {} (ambient {ambient})", profile.format);
        println!("{:>4} {:>9} {:>7} {:>7}  {:<22} source", "s", "expected", "lower", "upper", "status");
        for r in &profile.rows {
            println!(
                "{:>4} {:>9} {:>7} {:>7}  {:<22} {}",
                r.s,
                r.expected,
                opt(r.lower),
                opt(r.upper),
                r.status.to_string(),
                r.cert_ref.as_deref().unwrap_or("-")
            );
        }
        for r in profile.defective_rows() {
            if let Some(a) = actual_dim(r) {
                println!(
                    "defect at s={}: {} (projective dim {}, codim {})",
                    r.s,
                    r.expected - a,
                    a as i64 - 1,
                    ambient - a
                );
            }
        }
        let tr = &profile.typical_rank;
        println!(
            "typical rank {} ({:?}{})",
            opt(tr.rank),
            tr.status,
            tr.catalog.map_or_else(String::new, |c| format!(", known value {c}"))
        );
        println!("perfect {:?} via {}", perfect.verdict, perfect.source);
        if let Some(n) = scope_note(&f) {
            println!("{n}");
        }
    }
    Ok(if profile.typical_rank.rank.is_none() {
        Exit::Undetermined
    } else {
        Exit::Ok
    })
}

fn scan(rc: &RunConfig, cache: &Cache, json: bool, ks: &[usize], max_n: u32, max_r: u32) -> Result<Exit> {
    if max_n == 0 || ks.is_empty() {
        return Err(anyhow!("empty grid"));
    }
    let cfg = rc.classify()?;
    let digest = rc.digest();
    let grid: Vec<Format> = ks.iter().flat_map(|&k| format_grid(k, max_n)).collect();
    let key = |f: &Format, s: u32| format!("{f};{s}");
    let lookup = |f: &Format, s: u32| {
        cache
            .lookup("secant", &key(f, s), &digest)
            .and_then(|r| serde_json::from_value::<SecantRow>(r.payload.clone()).ok())
    };
    let fresh: Vec<bool> = grid
        .iter()
        .flat_map(|f| (1..=max_r).map(move |s| (f, s)))
        .map(|(f, s)| lookup(f, s).is_none())
        .collect();
    let rows = scan_rows(&grid, max_r, &cfg, lookup);
    for (r, new) in rows.iter().zip(&fresh) {
        if *new {
            cache.append("secant", &key(&r.format, r.s), &digest, &r.status.to_string(), None, serde_json::to_value(r)?)?;
        }
    }
    let mut bad: Vec<&SecantRow> = rows.iter().filter(|r| !r.status.is_non_defective()).collect();
    bad.sort_by_key(|r| (r.s, r.format.k(), r.format.ascending()));
    if json {
        for r in &bad {
            println!("{}", serde_json::to_string(r)?);
        }
    } else {
        println!("{:>3}  {:<16} {:<22} source", "s", "format", "status");
        for r in &bad {
            let asc: Vec<String> = r.format.ascending().iter().map(u32::to_string).collect();
            println!(
                "{:>3}  {:<16} {:<22} {}",
                r.s,
                asc.join(","),
                r.status.to_string(),
                r.cert_ref.as_deref().unwrap_or("-")
            );
        }
        println!("{} exceptions among {} secant orders on {} formats", bad.len(), rows.len(), grid.len());
    }
    Ok(Exit::Ok)
}

fn verify_cmd(json: bool, path: &std::path::Path, recheck: bool) -> Result<Exit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = match Certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            println!("REJECTED malformed certificate: {e}");
            return Ok(Exit::FalseOrRejected);
        }
    };
    match verify(&cert, recheck) {
        Ok(rep) => {
            if json {
                println!("{}", serde_json::to_string(&serde_json::json!({"ok": true, "report": rep}))?);
            } else {
                println!(
                    "OK {} {:?} nodes={} oracle_reruns={}",
                    cert.statement, cert.verdict, rep.nodes, rep.oracle_reruns
                );
            }
            Ok(Exit::Ok)
        }
        Err(e) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&serde_json::json!({"ok": false, "path": e.path, "reason": e.reason}))?
                );
            } else {
                println!("REJECTED {e}");
            }
            Ok(Exit::FalseOrRejected)
        }
    }
}
