use std::path::Path;

use hardy_chain::chain::{ChainMember, MemberKind};
use hardy_chain::hardy::{
    check_hardy, golden_optimum, maximize_violation, premises_force_conclusion, scan_stationary_surface_n3, HardyKind,
    HardyVariant, OptimizerConfig,
};
use hardy_chain::lhv::{lhv_bounds_with_cap, master_identity_check_with_cap, pointwise_chain_check_with_cap};
use hardy_chain::operators::{
    build_member_operator, build_x_operator, cubic_eigenvalues_x, default_frame, eigen_residual, eigenstate_x,
    format_table, spectrum_report, verify_invariant_subspace, MAX_SPECTRUM_QUBITS,
};
use hardy_chain::quantum::{expectation, term_probability, MeasurementFrame, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{Report, Table};
use crate::CliError;

pub struct Outcome {
    pub report: Report,
    pub ok: bool,
    pub summary: String,
}

type Reference = &'static [(usize, &'static [f64])];

/// Eigenvalues as tabulated for `X` (n = 2..6) and `X_ij` (n = 3..7).
const TABLE_ONE: Reference = &[
    (2, &[1.20711, -0.20711, 0.5]),
    (3, &[1.4501, -0.223046, 0.77294]),
    (4, &[1.80652, -0.210496, 0.903973]),
    (5, &[2.23266, -0.190055, 0.957394]),
    (6, &[2.688752, -0.1689639, 0.9802124]),
];
const TABLE_TWO: Reference = &[
    (3, &[1.183013, 0.6830127, -0.1830127, 0.3169873]),
    (4, &[1.4667, 0.91912, -0.19033, 0.30448]),
    (5, &[1.911717, 0.9524242, -0.1734191, 0.3092781]),
    (6, &[2.37600, 0.978917, -0.156122, 0.301206]),
    (7, &[2.8549439, 0.9847124, -0.1447244, 0.3050681]),
];
const SPECTRUM_TOL: f64 = 1e-8;
const EXACT_TOL: f64 = 1e-12;

pub fn member_for(kind: MemberKind, n: usize, indices: &[usize]) -> Result<ChainMember, CliError> {
    Ok(ChainMember::new(kind, n, indices)?)
}

pub fn lhv_bounds(
    kind: MemberKind,
    ns: impl Iterator<Item = usize>,
    indices: &[usize],
    cap: usize,
) -> Result<Outcome, CliError> {
    let mut table =
        Table::new(&["member", "n", "min", "max", "expected_min", "expected_max", "min_witness", "max_witness", "ok"]);
    let mut records = Vec::new();
    let mut all_ok = true;
    let mut lines = Vec::new();
    for n in ns {
        let m = member_for(kind, n, indices)?;
        let b = lhv_bounds_with_cap(&m, cap)?;
        let upper = m.upper_bound().expect("named member");
        let ok = b.min == 0 && b.max == upper;
        all_ok &= ok;
        lines.push(format!("{m}: {} <= {} <= {}", b.min, kind.name(), b.max));
        table.push(vec![
            json!(m.to_string()),
            json!(n),
            json!(b.min),
            json!(b.max),
            json!(0),
            json!(upper),
            json!(b.min_witness.to_string()),
            json!(b.max_witness.to_string()),
            json!(ok),
        ]);
        let mut rec = serde_json::to_value(&b).expect("bounds serialize");
        rec["expected"] = json!([0, upper]);
        rec["ok"] = json!(ok);
        records.push(rec);
    }
    let summary = format!("lhv-bounds: {} member(s), {}", records.len(), if all_ok { "all match" } else { "MISMATCH" });
    let text = Some(format!("{}\n", lines.join("\n")));
    Ok(Outcome {
        report: Report { json: json!({ "command": "lhv-bounds", "ok": all_ok, "results": records }), table, text },
        ok: all_ok,
        summary,
    })
}

fn closed_forms(which: u8, n: usize) -> Option<Vec<f64>> {
    match (which, n) {
        (1, 2) => Some(vec![(1.0 - 2f64.sqrt()) / 2.0, 0.5, (1.0 + 2f64.sqrt()) / 2.0]),
        (2, 3) => {
            let h = 3f64.sqrt() / 2.0;
            let mut v = vec![
                (1.0 - (1.0 + h).sqrt()) / 2.0,
                (1.0 - (1.0 - h).sqrt()) / 2.0,
                (1.0 + (1.0 - h).sqrt()) / 2.0,
                (1.0 + (1.0 + h).sqrt()) / 2.0,
            ];
            v.sort_by(f64::total_cmp);
            Some(v)
        }
        _ => None,
    }
}

pub fn tables(which: u8, ns: impl Iterator<Item = usize>, exact: bool, tol: f64) -> Result<Outcome, CliError> {
    let (kind, reference, indices): (MemberKind, Reference, &[usize]) = match which {
        1 => (MemberKind::X, TABLE_ONE, &[]),
        2 => (MemberKind::Xij, TABLE_TWO, &[1, 2]),
        other => return Err(CliError::Usage(format!("--which must be 1 or 2, got {other}"))),
    };
    let mut table = Table::new(&["member", "n", "root", "nearest_eigenvalue", "distance", "reference", "deviation"]);
    let mut reports = Vec::new();
    let mut records = Vec::new();
    let mut mismatches = Vec::new();
    for n in ns {
        if n > MAX_SPECTRUM_QUBITS {
            return Err(CliError::Resource(format!("n = {n} exceeds the diagonalization cap {MAX_SPECTRUM_QUBITS}")));
        }
        let m = member_for(kind, n, indices)?;
        let r = spectrum_report(&m)?;
        let tabulated = reference.iter().find(|(k, _)| *k == n).map(|(_, v)| *v);
        let forms = if exact {
            Some(closed_forms(which, n).ok_or_else(|| {
                CliError::Usage(format!("closed forms are known only for n = {}", if which == 1 { 2 } else { 3 }))
            })?)
        } else {
            None
        };
        for mt in &r.matched {
            if mt.distance >= SPECTRUM_TOL {
                mismatches.push(format!("{m}: root {} is {:.3e} from the spectrum", mt.root, mt.distance));
            }
        }
        // Each tabulated value must sit within `tol` of a computed root.
        let mut refs: Vec<(f64, Option<f64>)> = r.polynomial_roots.iter().map(|&x| (x, None)).collect();
        if let Some(vals) = tabulated {
            for &v in vals {
                let (k, d) = r
                    .polynomial_roots
                    .iter()
                    .enumerate()
                    .map(|(k, x)| (k, (x - v).abs()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("roots");
                refs[k].1 = Some(v);
                if d > tol {
                    mismatches
                        .push(format!("{m}: tabulated {v} vs computed {} (off by {d:.3e})", r.polynomial_roots[k]));
                }
            }
        }
        if let Some(forms) = &forms {
            for (x, f) in r.polynomial_roots.iter().zip(forms) {
                if (x - f).abs() > EXACT_TOL {
                    mismatches.push(format!("{m}: closed form {f} vs computed {x}"));
                }
            }
        }
        for (mt, (_, reference)) in r.matched.iter().zip(&refs) {
            table.push(vec![
                json!(m.to_string()),
                json!(n),
                json!(mt.root),
                json!(mt.nearest),
                json!(mt.distance),
                reference.map_or(Value::Null, |v| json!(v)),
                reference.map_or(Value::Null, |v| json!((mt.root - v).abs())),
            ]);
        }
        records.push(json!({
            "member": m.to_string(),
            "n": n,
            "roots": r.polynomial_roots,
            "matched": r.matched,
            "reference": tabulated,
            "closed_forms": forms,
            "lhv_bounds": [r.lhv_bounds.0, r.lhv_bounds.1],
            "violates_upper": r.violates_upper(),
            "violates_lower": r.violates_lower(),
        }));
        reports.push(r);
    }
    let ok = mismatches.is_empty();
    let mut text = format_table(&reports, 7);
    for line in &mismatches {
        text.push_str(&format!("mismatch: {line}\n"));
    }
    let summary = if ok {
        format!("tables: {} row(s) match", reports.len())
    } else {
        let mut members: Vec<&str> = mismatches.iter().filter_map(|m| m.split(':').next()).collect();
        members.dedup();
        format!("tables: {} mismatch(es) in {}", mismatches.len(), members.join(", "))
    };
    let json = json!({ "command": "tables", "which": which, "ok": ok, "results": records, "mismatches": mismatches });
    Ok(Outcome { report: Report { json, table, text: Some(text) }, ok, summary })
}

pub fn hardy_max(variant: &HardyVariant, config: &OptimizerConfig) -> Result<Outcome, CliError> {
    let r = maximize_violation(variant, config)?;
    let mut table = Table::new(&[
        "variant",
        "best_value",
        "constraint_residual",
        "best_start",
        "feasible_starts",
        "evaluations",
        "iterations",
    ]);
    table.push(vec![
        json!(r.variant.to_string()),
        json!(r.best_value),
        json!(r.constraint_residual),
        json!(r.best_start),
        json!(r.feasible_starts),
        json!(r.evaluations),
        json!(r.iterations),
    ]);
    let summary = format!(
        "hardy max {}: target {:.9} constraint residual {:.3e}",
        r.variant, r.best_value, r.constraint_residual
    );
    let json = json!({ "command": "hardy-max", "ok": true, "config": config, "result": r });
    Ok(Outcome { report: Report { json, table, text: None }, ok: true, summary })
}

pub fn load_state_and_frame(state: &Path, frame: &Path) -> Result<(StateVector, MeasurementFrame), CliError> {
    let read =
        |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())));
    let state: StateVector =
        serde_json::from_str(&read(state)?).map_err(|e| CliError::Usage(format!("state file: {e}")))?;
    let frame: MeasurementFrame =
        serde_json::from_str(&read(frame)?).map_err(|e| CliError::Usage(format!("frame file: {e}")))?;
    Ok((state, frame))
}

pub fn hardy_check(
    variant: &HardyVariant,
    state: &StateVector,
    frame: &MeasurementFrame,
    tau: f64,
) -> Result<Outcome, CliError> {
    let r = check_hardy(state, frame, variant, tau)?;
    let mut table = Table::new(&["quantity", "probability"]);
    table.push(vec![json!("target P(e'=1 all)"), json!(r.target)]);
    for z in &r.zero_terms {
        table.push(vec![json!(z.event), json!(z.probability)]);
    }
    table.push(vec![json!("conclusion P(e=0 all)"), json!(r.conclusion)]);
    let summary = format!(
        "hardy check {}: target {:.9} constraint residual {:.3e} premises_hold={} lhv_violated={}",
        r.variant,
        r.target,
        r.constraint_residual(),
        r.premises_hold,
        r.lhv_violated
    );
    let ok = r.lhv_violated;
    let json = json!({ "command": "hardy-check", "ok": ok, "result": r });
    Ok(Outcome { report: Report { json, table, text: None }, ok, summary })
}

pub fn hardy_scan(resolution: usize) -> Result<Outcome, CliError> {
    let s = scan_stationary_surface_n3(resolution)?;
    let arg = (3.0 - 5f64.sqrt()) / 2.0;
    let ok = (s.value - golden_optimum()).abs() <= 1e-8 && (s.u - arg).abs() <= 1e-6 && (s.v - arg).abs() <= 1e-6;
    let mut table = Table::new(&["u", "v", "value", "grid_value"]);
    table.push(vec![json!(s.u), json!(s.v), json!(s.value), json!(s.grid_value)]);
    let summary = format!("hardy scan-n3: max {:.9} at u = {:.9}, v = {:.9}", s.value, s.u, s.v);
    let json = json!({ "command": "hardy-scan-n3", "ok": ok, "resolution": resolution, "result": s, "expected": golden_optimum() });
    Ok(Outcome { report: Report { json, table, text: None }, ok, summary })
}

pub const PROPERTIES: &[&str] = &[
    "master-identity",
    "lhv-bounds",
    "pointwise-bounds",
    "op-prob-consistency",
    "invariant-subspace",
    "spectrum-containment",
    "eigenstates",
    "hardy-soundness",
];

fn named_members(n: usize) -> Vec<ChainMember> {
    let mut out = Vec::new();
    if n >= 2 {
        out.push(ChainMember::x(n).expect("n >= 2"));
    }
    for i in 1..n {
        for j in i + 1..n {
            out.push(ChainMember::xij(n, i, j).expect("valid"));
            for k in j + 1..n {
                out.push(ChainMember::xijk(n, i, j, k).expect("valid"));
                for l in k + 1..n {
                    out.push(ChainMember::xijkl(n, i, j, k, l).expect("valid"));
                }
            }
        }
    }
    out
}

struct Check {
    property: &'static str,
    n: usize,
    passed: bool,
    detail: String,
}

fn random_axis(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let t: f64 = rng.gen_range(-1.0..1.0f64).acos();
    let p: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

fn run_property(name: &str, n: usize, samples: usize, seed: u64, cap: usize) -> Result<Option<Check>, CliError> {
    let check = |property, passed, detail: String| Some(Check { property, n, passed, detail });
    Ok(match name {
        "master-identity" => {
            let c = master_identity_check_with_cap(n, cap)?;
            check("master-identity", c.holds, c.counterexample.map(|a| format!("fails at {a}")).unwrap_or_default())
        }
        "lhv-bounds" | "pointwise-bounds" => {
            let members = named_members(n);
            if members.is_empty() {
                return Ok(None);
            }
            let mut bad = Vec::new();
            for m in &members {
                if name == "lhv-bounds" {
                    let b = lhv_bounds_with_cap(m, cap)?;
                    if b.min != 0 || Some(b.max) != m.upper_bound() {
                        bad.push(format!("{m}: [{}, {}]", b.min, b.max));
                    }
                } else {
                    let c = pointwise_chain_check_with_cap(m, cap)?;
                    if let Some(a) = c.counterexample {
                        bad.push(format!("{m} at {a}"));
                    }
                }
            }
            let prop = if name == "lhv-bounds" { "lhv-bounds" } else { "pointwise-bounds" };
            let detail = if bad.is_empty() { format!("{} member(s)", members.len()) } else { bad.join("; ") };
            check(prop, bad.is_empty(), detail)
        }
        "op-prob-consistency" => {
            let members = named_members(n);
            if members.is_empty() {
                return Ok(None);
            }
            if n > MAX_SPECTRUM_QUBITS {
                return Err(CliError::Resource(format!("n = {n} exceeds the operator cap {MAX_SPECTRUM_QUBITS}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
            let mut worst = 0.0f64;
            for m in &members {
                let frame = MeasurementFrame::new(
                    (0..n).map(|_| random_axis(&mut rng)).collect(),
                    (0..n).map(|_| random_axis(&mut rng)).collect(),
                )?;
                let ops = [
                    (default_frame(n), build_member_operator(m, &default_frame(n))?),
                    (frame.clone(), build_member_operator(m, &frame)?),
                ];
                for _ in 0..samples {
                    let amps: Vec<C64> =
                        (0..1 << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                    let s = StateVector::new(amps)?;
                    for (f, op) in &ops {
                        let mut sum = 0.0;
                        for t in m.terms() {
                            sum += t.sign as f64 * term_probability(&s, f, &t)?;
                        }
                        worst = worst.max((expectation(&s, op)? - sum).abs());
                    }
                }
            }
            check("op-prob-consistency", worst <= 1e-10, format!("max gap {worst:.3e}"))
        }
        "invariant-subspace" => {
            let mut worst = 0.0f64;
            if n >= 2 {
                worst = worst.max(verify_invariant_subspace(n, MemberKind::X, &[])?.residual);
            }
            if n >= 3 {
                worst = worst.max(verify_invariant_subspace(n, MemberKind::Xij, &[1, 2])?.residual);
            }
            if n < 2 {
                return Ok(None);
            }
            check("invariant-subspace", worst < 1e-10, format!("max residual {worst:.3e}"))
        }
        "spectrum-containment" => {
            if n < 2 {
                return Ok(None);
            }
            if n > MAX_SPECTRUM_QUBITS {
                return Err(CliError::Resource(format!(
                    "n = {n} exceeds the diagonalization cap {MAX_SPECTRUM_QUBITS}"
                )));
            }
            let mut worst = spectrum_report(&ChainMember::x(n)?)?.max_distance();
            if n >= 3 {
                worst = worst.max(spectrum_report(&ChainMember::xij(n, 1, 2)?)?.max_distance());
            }
            check("spectrum-containment", worst < SPECTRUM_TOL, format!("max distance {worst:.3e}"))
        }
        "eigenstates" => {
            if n < 2 {
                return Ok(None);
            }
            let op = build_x_operator(n, &default_frame(n))?;
            let mut worst = 0.0f64;
            for mu in cubic_eigenvalues_x(n)? {
                if (2.0 * mu - n as f64 - 1.0).abs() > 1e-9 {
                    worst = worst.max(eigen_residual(&op, &eigenstate_x(n, mu)?, mu)?);
                }
            }
            check("eigenstates", worst < 1e-8, format!("max residual {worst:.3e}"))
        }
        "hardy-soundness" => {
            if n < 2 {
                return Ok(None);
            }
            let mut bad = Vec::new();
            let mut count = 0;
            for m in named_members(n) {
                let kind = match m.kind() {
                    MemberKind::X => HardyKind::Standard,
                    MemberKind::Xij => HardyKind::VariantI,
                    MemberKind::Xijk => HardyKind::VariantII,
                    _ => HardyKind::VariantIII,
                };
                let v = HardyVariant::new(kind, n, m.indices())?;
                count += 1;
                if let Some(a) = premises_force_conclusion(&v)?.counterexample {
                    bad.push(format!("{m} at {a}"));
                }
            }
            let detail = if bad.is_empty() { format!("{count} variant(s)") } else { bad.join("; ") };
            check("hardy-soundness", bad.is_empty(), detail)
        }
        other => return Err(CliError::Usage(format!("unknown property `{other}` (one of {})", PROPERTIES.join(", ")))),
    })
}

pub fn verify(only: Option<&str>, n_max: usize, samples: usize, seed: u64, cap: usize) -> Result<Outcome, CliError> {
    if let Some(name) = only {
        if !PROPERTIES.contains(&name) {
            return Err(CliError::Usage(format!("unknown property `{name}` (one of {})", PROPERTIES.join(", "))));
        }
    }
    if n_max > cap {
        return Err(CliError::Resource(format!("--n-max {n_max} exceeds the enumeration cap {cap}")));
    }
    let selected: Vec<&str> = match only {
        Some(name) => vec![name],
        None => PROPERTIES.to_vec(),
    };
    let mut checks = Vec::new();
    for name in selected {
        for n in 1..=n_max {
            if let Some(c) = run_property(name, n, samples, seed, cap)? {
                checks.push(c);
            }
        }
    }
    let ok = checks.iter().all(|c| c.passed);
    let mut table = Table::new(&["property", "n", "passed", "detail"]);
    for c in &checks {
        table.push(vec![json!(c.property), json!(c.n), json!(c.passed), json!(c.detail)]);
    }
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.passed).map(|c| format!("{} n={}: {}", c.property, c.n, c.detail)).collect();
    let summary = if ok {
        format!("verify: {} check(s) passed", checks.len())
    } else {
        format!("verify: {} failed: {}", failed.len(), failed.join("; "))
    };
    let records: Vec<Value> = checks
        .iter()
        .map(|c| json!({ "property": c.property, "n": c.n, "passed": c.passed, "detail": c.detail }))
        .collect();
    let json =
        json!({ "command": "verify", "ok": ok, "n_max": n_max, "samples": samples, "seed": seed, "results": records });
    Ok(Outcome { report: Report { json, table, text: None }, ok, summary })
}
