use std::fs;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use sdgmm_core::analog::{adgmm_run, lstsq_demo, AnalogConfig};
use sdgmm_core::audit::{collusion_leakage_demo, share_uniformity_check, single_share_audit};
use sdgmm_core::cost::compare_table;
use sdgmm_core::csvio;
use sdgmm_core::degree::{difference_table, distinct_exponents, is_valid, outer_sum, ExponentVector, Validity};
use sdgmm_core::engine::{run_sdgmm, RunConfig, SchemeChoice, Transport};
use sdgmm_core::exponents::{construct_doubling, construct_trivial, search_min_max};
use sdgmm_core::matdot::{matdot_run, MatDotConfig};
use sdgmm_core::pool::{Stragglers, TaskTrace};
use sdgmm_core::wire::{RemoteConfig, WorkerServer};
use sdgmm_core::{Backend, Error, FieldMatrix, PrimeField, Result, DEFAULT_MODULUS};

use crate::{
    AdgmmArgs, AuditArgs, Cli, Command, CompareArgs, ConstructArgs, LstsqArgs, MatdotArgs, RunArgs, SearchArgs,
    ServeArgs, TableArgs,
};

const SCHEMA_VERSION: u32 = 1;

struct Ctx {
    json: bool,
    seed: u64,
    q: Option<u64>,
}

impl Ctx {
    fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.q.unwrap_or(DEFAULT_MODULUS))
    }

    fn emit(&self, value: Value, human: impl FnOnce() -> String) {
        if self.json {
            let mut value = value;
            value["schema_version"] = json!(SCHEMA_VERSION);
            println!("{}", serde_json::to_string_pretty(&value).expect("JSON value serializes"));
        } else {
            print!("{}", human());
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Ctx { json: cli.json, seed: cli.seed, q: cli.q };
    match cli.command {
        Command::Table(a) => table(&ctx, a),
        Command::Search(a) => search(&ctx, a),
        Command::Construct(a) => construct(&ctx, a),
        Command::Run(a) => run(&ctx, a),
        Command::Matdot(a) => matdot(&ctx, a),
        Command::Adgmm(a) => adgmm(&ctx, a),
        Command::Lstsq(a) => lstsq(&ctx, a),
        Command::Audit(a) => audit(&ctx, a),
        Command::Compare(a) => compare(&ctx, a),
        Command::ServeWorker(a) => serve(&ctx, a),
    }
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))
}

fn write(path: &str, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Config(format!("{path}: {e}")))
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn stragglers(drop: usize) -> Stragglers {
    if drop == 0 {
        Stragglers::None
    } else {
        Stragglers::Count(drop)
    }
}

fn field_rows(m: &FieldMatrix) -> Value {
    json!((0..m.rows()).map(|i| m.row(i).iter().map(|v| v.value()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn describe_validity(v: &Validity) -> String {
    match v {
        Validity::Valid => "valid".to_string(),
        Validity::Invalid(c) => format!(
            "invalid: diagonal {} (value {}) also appears at cell ({}, {})",
            c.diagonal, c.value, c.cell.0, c.cell.1
        ),
    }
}

fn table(ctx: &Ctx, a: TableArgs) -> Result<()> {
    if let Some(gamma) = &a.gamma {
        let t = outer_sum(&a.phi, gamma);
        ctx.emit(json!({ "rows": a.phi, "cols": gamma, "cells": t.grid() }), || t.render(&[]));
        return Ok(());
    }
    if a.diff {
        let t = difference_table(&a.phi);
        ctx.emit(json!({ "rows": a.phi, "cols": a.phi, "cells": t.grid() }), || t.render(&[]));
        return Ok(());
    }
    let p = a.p.unwrap_or(a.phi.len().saturating_sub(1));
    let validity = is_valid(&a.phi, p)?;
    let t = outer_sum(&a.phi, &a.phi);
    let h = distinct_exponents(&a.phi);
    let marked: Vec<(usize, usize)> = (0..p).map(|j| (j, j)).collect();
    ctx.emit(
        json!({
            "phi": a.phi,
            "p": p,
            "cells": t.grid(),
            "valid": validity.is_valid(),
            "collision": match validity { Validity::Invalid(c) => json!(c), Validity::Valid => Value::Null },
            "distinct_count": h.len(),
            "distinct": h.members(),
        }),
        || {
            format!(
                "{}{}\n|H| = {}\nH = {}\n",
                t.render(&marked),
                describe_validity(&validity),
                h.len(),
                join(h.members())
            )
        },
    );
    Ok(())
}

fn report_phi(ctx: &Ctx, phi: &ExponentVector, nodes: Option<u64>) -> Result<()> {
    let validity = is_valid(phi.as_slice(), phi.useful())?;
    let h = distinct_exponents(phi.as_slice());
    let mut value = json!({
        "phi": phi.as_slice(),
        "largest": phi.largest(),
        "distinct_count": h.len(),
        "valid": validity.is_valid(),
    });
    if let Some(n) = nodes {
        value["nodes_visited"] = json!(n);
    }
    ctx.emit(value, || {
        let mut s = format!(
            "phi = {}\nlargest = {}\n|H| = {}\n{}\n",
            join(phi.as_slice()),
            phi.largest(),
            h.len(),
            describe_validity(&validity)
        );
        if let Some(n) = nodes {
            s.push_str(&format!("nodes = {n}\n"));
        }
        s
    });
    Ok(())
}

fn search(ctx: &Ctx, a: SearchArgs) -> Result<()> {
    let found = search_min_max(a.p, a.budget)?;
    report_phi(ctx, &found.phi, Some(found.nodes_visited))
}

fn construct(ctx: &Ctx, a: ConstructArgs) -> Result<()> {
    let phi = match a.scheme.as_str() {
        "trivial" => construct_trivial(a.p)?,
        "doubling" => construct_doubling(a.p)?,
        other => return Err(Error::InvalidScheme(other.to_string())),
    };
    report_phi(ctx, &phi, None)
}

fn trace_json(trace: &TaskTrace, recovery_threshold: usize, wall: Duration) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "n_workers": trace.n_workers,
        "recovery_threshold": recovery_threshold,
        "upload_elems": trace.upload_elems,
        "download_elems": trace.download_elems,
        "upload_bytes": trace.upload_bytes,
        "download_bytes": trace.download_bytes,
        "dropped": trace.dropped,
        "responders": trace.responders,
        "ignored": trace.ignored,
        "wall_time_ms": wall.as_secs_f64() * 1e3,
    })
}

fn summary(trace: &TaskTrace, r: usize) -> String {
    format!(
        "workers = {}, R = {}, dropped = {:?}\nupload_elems = {}, download_elems = {}\n",
        trace.n_workers, r, trace.dropped, trace.upload_elems, trace.download_elems
    )
}

fn run(ctx: &Ctx, a: RunArgs) -> Result<()> {
    let field = ctx.field()?;
    let input = csvio::parse_field_matrix(&read(&a.input)?, &field)?;
    let scheme = match a.phi {
        Some(phi) => SchemeChoice::Explicit(phi),
        None => a.scheme.parse()?,
    };
    let mut cfg = RunConfig::new(a.p, scheme, a.workers);
    cfg.seed = ctx.seed;
    cfg.mode = a.mode.parse()?;
    cfg.stragglers = stragglers(a.drop);
    if a.distributed {
        let mut remote = RemoteConfig::new(a.endpoints.unwrap_or_default());
        remote.timeout = Duration::from_millis(a.timeout_ms);
        cfg.transport = Transport::Remote(remote);
    }
    let start = Instant::now();
    let out = run_sdgmm(field, &input, &cfg)?;
    let wall = start.elapsed();
    let r = out.instance.recovery_threshold();
    if let Some(path) = &a.trace {
        let text = serde_json::to_string_pretty(&trace_json(&out.trace, r, wall)).expect("JSON value serializes");
        write(path, &text)?;
    }
    let csv = csvio::format_field_matrix(&out.gram);
    if let Some(path) = &a.out {
        write(path, &csv)?;
    }
    let mut value = json!({
        "phi": out.instance.phi.as_slice(),
        "n_workers": out.trace.n_workers,
        "recovery_threshold": r,
        "upload_elems": out.trace.upload_elems,
        "download_elems": out.trace.download_elems,
        "dropped": out.trace.dropped,
        "responders": out.trace.responders,
    });
    if a.out.is_none() {
        value["gram"] = field_rows(&out.gram);
    }
    ctx.emit(value, || {
        let head = format!("phi = {}\n{}", join(out.instance.phi.as_slice()), summary(&out.trace, r));
        if a.out.is_some() {
            head
        } else {
            eprint!("{head}");
            csv.clone()
        }
    });
    Ok(())
}

fn matdot(ctx: &Ctx, a: MatdotArgs) -> Result<()> {
    let field = ctx.field()?;
    let ma = csvio::parse_field_matrix(&read(&a.a)?, &field)?;
    let mb = csvio::parse_field_matrix(&read(&a.b)?, &field)?;
    let mut cfg = MatDotConfig::new(a.p, a.workers, ctx.seed);
    cfg.stragglers = stragglers(a.drop);
    let out = matdot_run(field, &ma, &mb, &cfg)?;
    let r = out.instance.recovery_threshold();
    let csv = csvio::format_field_matrix(&out.product);
    if let Some(path) = &a.out {
        write(path, &csv)?;
    }
    let mut value = json!({
        "n_workers": out.trace.n_workers,
        "recovery_threshold": r,
        "upload_elems": out.trace.upload_elems,
        "download_elems": out.trace.download_elems,
        "dropped": out.trace.dropped,
    });
    if a.out.is_none() {
        value["product"] = field_rows(&out.product);
    }
    ctx.emit(value, || {
        let head = summary(&out.trace, r);
        if a.out.is_some() {
            head
        } else {
            eprint!("{head}");
            csv.clone()
        }
    });
    Ok(())
}

fn adgmm(ctx: &Ctx, a: AdgmmArgs) -> Result<()> {
    let input = csvio::parse_real_matrix(&read(&a.input)?)?;
    let mut cfg = AnalogConfig::new(a.p, a.workers);
    cfg.seed = ctx.seed;
    cfg.stragglers = stragglers(a.drop);
    let out = adgmm_run(&input, &cfg)?;
    let r = 2 * a.p - 1;
    let csv = csvio::format_real_parts(&out.gram);
    if let Some(path) = &a.out {
        write(path, &csv)?;
    }
    let mut value = json!({
        "n_workers": out.trace.n_workers,
        "recovery_threshold": r,
        "max_abs_imag": out.gram.max_abs_imag(),
        "dropped": out.trace.dropped,
    });
    if a.out.is_none() {
        let rows: Vec<Vec<f64>> =
            (0..out.gram.rows()).map(|i| out.gram.row(i).iter().map(|z| z.re).collect()).collect();
        value["gram"] = json!(rows);
    }
    ctx.emit(value, || {
        let head = format!("{}max |imag| = {:e}\n", summary(&out.trace, r), out.gram.max_abs_imag());
        if a.out.is_some() {
            head
        } else {
            eprint!("{head}");
            csv.clone()
        }
    });
    Ok(())
}

fn lstsq(ctx: &Ctx, a: LstsqArgs) -> Result<()> {
    let input = csvio::parse_real_matrix(&read(&a.input)?)?;
    let b = csvio::parse_vector(&read(&a.b)?)?;
    let mut cfg = AnalogConfig::new(a.p, a.workers);
    cfg.seed = ctx.seed;
    let beta = lstsq_demo(&input, &b, &cfg)?;
    ctx.emit(json!({ "beta": beta }), || csvio::format_vector(&beta));
    Ok(())
}

fn audit(ctx: &Ctx, a: AuditArgs) -> Result<()> {
    let field = ctx.field()?;
    let phi = match a.phi {
        Some(v) => {
            let phi = ExponentVector::for_gram(v)?;
            if phi.useful() != a.p {
                return Err(Error::InvalidExponents(format!("phi has {} entries, expected {}", phi.len(), a.p + 1)));
            }
            phi
        }
        None => search_min_max(a.p, None)?.phi,
    };
    let backend = Backend::default();
    let mut points = Vec::new();
    let mut lines =
        format!("phi = {}, q = {}, t = {}, chunk = {}\n", join(phi.as_slice()), field.modulus(), a.t, a.chunk);
    for alpha in 1..field.modulus() {
        let audit = single_share_audit(&field, a.t, a.chunk, &phi, field.elem(alpha), backend)?;
        lines.push_str(&format!(
            "alpha = {alpha}: {} over {} values of A, I(A; share) = {} bits\n",
            if audit.all_uniform { "uniform" } else { "NOT uniform" },
            audit.a_values,
            audit.mi_bits
        ));
        if a.histogram {
            let zero = FieldMatrix::zeros(a.t, a.p * a.chunk);
            let rep = share_uniformity_check(&field, a.t, a.chunk, &phi, field.elem(alpha), &zero, backend)?;
            lines.push_str(&format!("  histogram (A = 0): {}\n", join(&rep.histogram)));
        }
        points.push(audit);
    }
    let secure = points.iter().all(|p| p.all_uniform && p.mi_bits == 0.0);
    lines.push_str(if secure {
        "single share: uniform at every nonzero point, no leakage\n"
    } else {
        "single share: LEAKS\n"
    });
    let mut value = json!({
        "phi": phi.as_slice(),
        "q": field.modulus(),
        "points": points,
        "single_share_secure": secure,
    });
    if let Some(pair) = a.pair {
        let [i, j] = pair[..] else {
            return Err(Error::Config(format!("--pair takes two points, got {}", pair.len())));
        };
        let rep = collusion_leakage_demo(&field, &phi, field.elem(i), field.elem(j), backend)?;
        let coeffs: Vec<u64> = rep.coefficients.iter().map(|c| c.value()).collect();
        lines.push_str(&format!(
            "pair ({i}, {j}): {}^{top}*share_{i} - {i}^{top}*share_{j} = [{}] . A ({})\n",
            j,
            join(&coeffs),
            if rep.functional_holds { "holds for every noise value" } else { "does NOT hold" },
            top = phi.largest()
        ));
        lines.push_str(&format!(
            "pair ({i}, {j}): I(A; share) = {} bits, I(A; pair) = {} bits, {}\n",
            rep.mi_single_bits,
            rep.mi_pair_bits,
            if rep.mi_pair_bits > 0.0 { "pair LEAKS" } else { "no pair leakage" }
        ));
        value["pair"] = json!(rep);
    }
    ctx.emit(value, || lines);
    Ok(())
}

fn compare(ctx: &Ctx, a: CompareArgs) -> Result<()> {
    if a.p_min == 0 || a.p_min > a.p_max {
        return Err(Error::Config(format!("empty range {}..={}", a.p_min, a.p_max)));
    }
    let table = compare_table(a.p_min..=a.p_max, a.t, a.s, a.budget)?;
    let csv = table.to_csv();
    if let Some(path) = &a.out {
        write(path, &csv)?;
    }
    let mut value = json!({ "crossovers": table.crossovers });
    if a.out.is_none() {
        value["rows"] = json!(table.rows);
    }
    ctx.emit(value, || {
        if a.out.is_some() {
            table.summary()
        } else {
            eprint!("{}", table.summary());
            csv.clone()
        }
    });
    Ok(())
}

fn serve(ctx: &Ctx, a: ServeArgs) -> Result<()> {
    let server = WorkerServer::bind((a.host.as_str(), a.port), ctx.q)?;
    println!("listening on {}", server.local_addr()?);
    server.run()
}
