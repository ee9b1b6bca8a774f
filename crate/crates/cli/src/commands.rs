use std::fs::File;
use std::io::{BufWriter, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rod_flat::numeric::{format_ratio, format_sig};
use rod_flat::planning::{energy, max_deviation, uniform_state};
use rod_flat::{
    bezout_arrays, bezout_cosh, controllability_rank, expand, flat_output_with_pairing, fold_tape,
    gcd_oracle, identity_residual, is_flat_output, normalize_pair, run_experiment_jobs, simulate,
    synthesize_control, to_monomial, transfer_error, verify_identity, BezoutWalk, ControlProfile,
    ExperimentReport, GevreySpec, MonomialPoly, NumericMode, Pairing, RodModel, StencilSign,
};
use serde_json::{json, Value};

use crate::bench::{bench, BenchConfig};
use crate::format::{csv_writer, series_cell, series_json, write_array_json, write_json};
use crate::{
    ApproxArgs, BenchArgs, BezoutArgs, CliError, CliResult, Command, FlatArgs, FoldArgs, PairArgs,
    PairingArg, PlanArgs, RankArgs, SeriesArgs, SignArg, TableArgs,
};

/// Largest `a+b` checked against extended Euclid by `verify`.
pub const ORACLE_LIMIT: u64 = 120;

pub fn run(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Bezout(a) => bezout(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Series(a) => series(a, out),
        Command::Approx(a) => approx(a, out, err),
        Command::Table(a) => table(a, out),
        Command::FlatOutput(a) => flat_output(a, out),
        Command::Fold(a) => fold(a, out),
        Command::Rank(a) => rank(a, out),
        Command::Plan(a) => plan(a, out, err),
        Command::Bench(a) => bench_cmd(a, out, err),
    }
}

fn create(path: &std::path::Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn bezout(args: BezoutArgs, out: &mut dyn Write) -> CliResult {
    let arrays = bezout_arrays(args.a, args.b)?;
    let mut file;
    let mut buffered;
    let w: &mut dyn Write = match &args.out {
        Some(p) => {
            file = create(p)?;
            &mut file
        }
        None => {
            buffered = BufWriter::new(out);
            &mut buffered
        }
    };
    let problem = arrays.problem;
    if args.json {
        write!(w, "{{\"a\":{},\"b\":{},\"L1\":", problem.a(), problem.b())?;
        write_array_json(w, &arrays.l1)?;
        write!(w, ",\"L2\":")?;
        write_array_json(w, &arrays.l2)?;
        write!(w, ",\"steps\":[")?;
        for (n, step) in BezoutWalk::new(&problem).enumerate() {
            if n > 0 {
                write!(w, ",")?;
            }
            serde_json::to_writer(&mut *w, &step)?;
        }
        writeln!(w, "]}}")?;
    } else if args.csv {
        {
            let mut c = csv_writer(w);
            c.write_record(["side", "frequency", "coeff"])?;
            for (side, coeffs) in [("L1", &arrays.l1), ("L2", &arrays.l2)] {
                for (k, v) in coeffs.iter().enumerate().filter(|(_, v)| **v != 0) {
                    c.write_record([side.to_string(), k.to_string(), v.to_string()])?;
                }
            }
            c.flush()?;
        }
        if args.trace {
            writeln!(w)?;
            let mut c = csv_writer(&mut *w);
            c.write_record(["i", "alpha", "k", "f", "c", "d"])?;
            for s in BezoutWalk::new(&problem) {
                c.write_record([
                    s.index.to_string(),
                    format!("{:?}", s.alpha),
                    s.k.to_string(),
                    s.f.to_string(),
                    s.c.to_string(),
                    s.d.to_string(),
                ])?;
            }
            c.flush()?;
        }
    } else {
        let pair = arrays.to_pair();
        writeln!(w, "a = {}, b = {}", problem.a(), problem.b())?;
        writeln!(w, "L1 = {}", pair.l1)?;
        writeln!(w, "L2 = {}", pair.l2)?;
        writeln!(w, "{pair}")?;
        if args.trace {
            writeln!(
                w,
                "{:>6} {:>5} {:>8} {:>8} {:>3} {:>3}",
                "i", "alpha", "k", "f", "c", "d"
            )?;
            for s in BezoutWalk::new(&problem) {
                writeln!(
                    w,
                    "{:>6} {:>5} {:>8} {:>8} {:>3} {:>3}",
                    s.index,
                    format!("{:?}", s.alpha),
                    s.k,
                    s.f,
                    s.c,
                    s.d
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn verify(args: PairArgs, out: &mut dyn Write) -> CliResult {
    let (pair, trace) = bezout_cosh(args.a, args.b)?;
    let residual = verify_identity(&pair);
    let (a, b) = (pair.problem.a(), pair.problem.b());
    let oracle = if a + b <= ORACLE_LIMIT {
        let (g, u, v) = gcd_oracle(a, b);
        Some(g == MonomialPoly::one() && to_monomial(&pair.l1) == u && to_monomial(&pair.l2) == v)
    } else {
        None
    };
    let ok = residual.is_zero() && oracle != Some(false);
    if args.json {
        write_json(
            out,
            &json!({
                "a": a,
                "b": b,
                "steps": trace.steps.len(),
                "residual_zero": residual.is_zero(),
                "oracle": oracle,
                "ok": ok,
            }),
        )?;
    } else {
        writeln!(out, "a = {a}, b = {b}, steps = {}", trace.steps.len())?;
        writeln!(out, "residual: {residual}")?;
        match oracle {
            Some(true) => writeln!(out, "extended Euclid: agrees")?,
            Some(false) => writeln!(out, "extended Euclid: DISAGREES")?,
            None => writeln!(out, "extended Euclid: skipped (a+b > {ORACLE_LIMIT})")?,
        }
        writeln!(out, "{}", if ok { "ok" } else { "FAILED" })?;
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "identity check failed for ({a}, {b})"
        )))
    }
}

fn series(args: SeriesArgs, out: &mut dyn Write) -> CliResult {
    let mode = args.precision.mode()?;
    if args.order == 0 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    let (pair, _) = bezout_cosh(args.a, args.b)?;
    let (a, b) = (pair.problem.a(), pair.problem.b());
    let scale = BigRational::new(BigInt::one(), BigInt::from(a));
    let ratio = BigRational::new(BigInt::from(b), BigInt::from(a));
    let mut s1 = expand(&pair.l1, &scale, args.order, mode);
    let mut s2 = expand(&pair.l2, &scale, args.order, mode);
    if args.normalize {
        (s1, s2) = normalize_pair(&s1, &s2, &ratio)?;
    }
    if args.json {
        let residual = identity_residual(&s1, &s2, &ratio)?;
        write_json(
            out,
            &json!({
                "a": a,
                "b": b,
                "mode": mode.to_string(),
                "normalized": args.normalize,
                "L1": series_json(&s1),
                "L2": series_json(&s2),
                "residual_zero": residual.is_zero(),
            }),
        )?;
    } else if args.csv {
        let mut c = csv_writer(out);
        c.write_record(["power", "L1_coeff", "L2_coeff"])?;
        for j in 0..=args.order {
            c.write_record([
                (2 * j).to_string(),
                series_cell(&s1, j),
                series_cell(&s2, j),
            ])?;
        }
        c.flush()?;
    } else {
        writeln!(out, "a = {a}, b = {b}, x -> x/{a}, mode = {mode}")?;
        writeln!(out, "{:>5}  {:>28}  {:>28}", "power", "L1", "L2")?;
        for j in 0..=args.order {
            writeln!(
                out,
                "{:>5}  {:>28}  {:>28}",
                2 * j,
                series_cell(&s1, j),
                series_cell(&s2, j)
            )?;
        }
    }
    Ok(())
}

fn experiment(
    target: &crate::TargetArgs,
    count: usize,
    order: usize,
    mode: NumericMode,
    jobs: usize,
) -> CliResult<ExperimentReport> {
    let target = target.target()?;
    Ok(run_experiment_jobs(
        &target,
        count,
        order,
        mode,
        jobs.max(1),
    )?)
}

fn approx(args: ApproxArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mode = args.precision.mode()?;
    let report = experiment(&args.target, args.count, args.order, mode, args.jobs)?;
    for row in &report.rows {
        writeln!(
            err,
            "{}: {:.3} s",
            row.fraction(),
            row.wall_time.as_secs_f64()
        )?;
    }
    let pick = |row: &rod_flat::ExperimentRow| {
        if args.raw {
            (row.raw_l1.clone(), row.raw_l2.clone())
        } else {
            (row.l1.clone(), row.l2.clone())
        }
    };
    let write_csv = |w: &mut dyn Write| -> CliResult {
        let mut c = csv_writer(w);
        c.write_record(["a", "b", "power", "L1_coeff", "L2_coeff"])?;
        for row in &report.rows {
            let (s1, s2) = pick(row);
            for j in 0..=report.order {
                c.write_record([
                    row.a.to_string(),
                    row.b.to_string(),
                    (2 * j).to_string(),
                    series_cell(&s1, j),
                    series_cell(&s2, j),
                ])?;
            }
        }
        c.flush()?;
        Ok(())
    };
    if let Some(path) = &args.csv {
        let mut f = create(path)?;
        write_csv(&mut f)?;
        f.flush()?;
    }
    if args.json {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|row| {
                let (s1, s2) = pick(row);
                json!({
                    "fraction": row.fraction(),
                    "a": row.a,
                    "b": row.b,
                    "L1": series_json(&s1),
                    "L2": series_json(&s2),
                })
            })
            .collect();
        write_json(
            out,
            &json!({
                "target": report.target.to_string(),
                "order": report.order,
                "mode": report.mode.to_string(),
                "normalized": !args.raw,
                "rows": rows,
            }),
        )?;
    } else if args.csv.is_none() {
        write_csv(out)?;
    }
    Ok(())
}

fn table(args: TableArgs, out: &mut dyn Write) -> CliResult {
    let mode = args.precision.mode()?;
    let report = experiment(&args.target, args.count, args.order, mode, args.jobs)?;
    let exact = mode == NumericMode::Exact;
    if args.json {
        let v: Vec<Value> = report
            .rows
            .iter()
            .map(|r| {
                let top = r.top_l1();
                let mut row = json!({
                    "fraction": r.fraction(),
                    "a": r.a,
                    "b": r.b,
                    "coeff": format_sig(&top, mode.display_digits()),
                });
                if exact {
                    row["exact"] = json!(format_ratio(&top));
                }
                row
            })
            .collect();
        write_json(out, &json!({ "power": 2 * report.order, "rows": v }))?;
    } else {
        let mut c = csv_writer(out);
        let mut header = vec!["fraction", "a", "b", "coeff"];
        if exact {
            header.push("exact");
        }
        c.write_record(&header)?;
        for r in &report.rows {
            let top = r.top_l1();
            let mut rec = vec![
                r.fraction(),
                r.a.to_string(),
                r.b.to_string(),
                format_sig(&top, mode.display_digits()),
            ];
            if exact {
                rec.push(format_ratio(&top));
            }
            c.write_record(&rec)?;
        }
        c.flush()?;
    }
    Ok(())
}

fn pairing(p: PairingArg) -> Pairing {
    match p {
        PairingArg::Derived => Pairing::Derived,
        PairingArg::Printed => Pairing::Printed,
    }
}

fn flat_output(args: FlatArgs, out: &mut dyn Write) -> CliResult {
    if args.q == 0 {
        return Err(CliError::Usage("--q must be at least 1".into()));
    }
    let (pair, _) = bezout_cosh(args.a, args.b)?;
    let w = flat_output_with_pairing(&pair, args.q, pairing(args.pairing));
    let weights: Vec<Value> = w
        .weights
        .iter()
        .map(|(k, c)| json!([k, format_ratio(c)]))
        .collect();
    let checks = if args.check {
        let model = RodModel::new(
            pair.problem.a(),
            pair.problem.b(),
            args.q,
            StencilSign::Laplacian,
        )?;
        let minus = model.with_a_scaled(&-BigRational::one());
        let q2 = model.with_a_scaled(&BigRational::from_integer(BigInt::from(args.q * args.q)));
        let paper = RodModel::new(
            pair.problem.a(),
            pair.problem.b(),
            args.q,
            StencilSign::Paper,
        )?;
        Some([
            ("laplacian", is_flat_output(&model, &w)),
            ("negated", is_flat_output(&minus, &w)),
            ("q2_scaled", is_flat_output(&q2, &w)),
            ("paper_sign", is_flat_output(&paper, &w)),
        ])
    } else {
        None
    };
    if args.json {
        let mut v = json!({
            "a": pair.problem.a(),
            "b": pair.problem.b(),
            "q": args.q,
            "pairing": pairing(args.pairing),
            "weights": weights,
        });
        if let Some(checks) = &checks {
            v["checks"] = checks
                .iter()
                .map(|(k, ok)| (k.to_string(), json!(ok)))
                .collect();
        }
        write_json(out, &v)?;
    } else {
        writeln!(out, "y = {w}")?;
        if let Some(checks) = &checks {
            for (name, ok) in checks {
                writeln!(out, "{name}: {}", if *ok { "flat" } else { "NOT flat" })?;
            }
        }
    }
    if let Some(checks) = checks {
        if checks.iter().any(|(_, ok)| !ok) {
            return Err(CliError::CheckFailed("flat-output test failed".into()));
        }
    }
    Ok(())
}

fn fold(args: FoldArgs, out: &mut dyn Write) -> CliResult {
    let r = fold_tape(args.a, args.b)?;
    if args.json {
        let counts: Vec<Value> = r.counts.iter().map(|(k, c)| json!([k, c])).collect();
        let mut v = json!({ "a": args.a.min(args.b), "b": args.a.max(args.b), "counts": counts });
        if args.trace {
            v["events"] = serde_json::to_value(&r.events)?;
        }
        write_json(out, &v)?;
        return Ok(());
    }
    if args.trace {
        for e in &r.events {
            match e {
                rod_flat::FoldEvent::Fold { a, b } => writeln!(out, "fold {a} {b}")?,
                rod_flat::FoldEvent::CutRotate { length, overhang } => {
                    writeln!(out, "cut-rotate {length} {overhang}")?
                }
                rod_flat::FoldEvent::Done { end } => writeln!(out, "done {end}")?,
            }
        }
    }
    writeln!(out, "y = {}", r.as_flat_output())?;
    Ok(())
}

fn rank(args: RankArgs, out: &mut dyn Write) -> CliResult {
    if args.q == 0 {
        return Err(CliError::Usage("--q must be at least 1".into()));
    }
    let sign = match args.sign {
        SignArg::Laplacian => StencilSign::Laplacian,
        SignArg::Paper => StencilSign::Paper,
    };
    let model = RodModel::new(args.a, args.b, args.q, sign)?;
    let r = controllability_rank(&model);
    let n = model.dim();
    if args.json {
        write_json(
            out,
            &json!({"a": args.a, "b": args.b, "q": args.q, "n": n, "rank": r}),
        )?;
    } else {
        writeln!(out, "n = {n}, rank = {r}, deficiency = {}", n - r)?;
    }
    Ok(())
}

fn plan(args: PlanArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if args.q == 0 || args.points < 2 {
        return Err(CliError::Usage("--q must be >= 1 and --points >= 2".into()));
    }
    let spec = GevreySpec::new(args.sigma, args.time, args.theta_start, args.theta_end)?;
    let model = match args.b {
        Some(b) => RodModel::new(args.a, b, args.q, StencilSign::Laplacian)?,
        None => RodModel::one_sided(args.a, args.q)?,
    };
    let dt = args
        .dt
        .unwrap_or(rod_flat::planning::RK4_STABILITY / (args.q * args.q) as f64);
    let grid = ControlProfile::uniform_grid(args.time, args.points);
    let profile = synthesize_control(args.a, args.b, &spec, args.order, &grid)?;
    let init = uniform_state(&model, args.theta_start);
    let traj = simulate(&model, &profile, &init, dt)?;
    let err_final = transfer_error(&traj, &spec);
    if let Some(path) = &args.csv {
        let mut f = create(path)?;
        {
            let mut c = csv_writer(&mut f);
            let mut header = vec!["t".to_string(), "u".to_string()];
            header.extend((0..traj.nodes[0].len()).map(|i| format!("theta_{i}")));
            c.write_record(&header)?;
            for (k, t) in traj.times.iter().enumerate() {
                let mut rec = vec![t.to_string(), profile.eval(*t).to_string()];
                rec.extend(traj.nodes[k].iter().map(|v| v.to_string()));
                c.write_record(&rec)?;
            }
            c.flush()?;
        }
        f.flush()?;
    }
    let last = traj.final_nodes();
    let u_max = profile.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    writeln!(err, "transfer error {err_final:.3e}")?;
    write_json(
        out,
        &json!({
            "a": args.a,
            "b": args.b,
            "q": args.q,
            "sigma": args.sigma,
            "order": args.order,
            "time": args.time,
            "dt": dt,
            "points": args.points,
            "transfer_error": err_final,
            "final_energy": energy(last, args.theta_end),
            "final_max_deviation": max_deviation(last, args.theta_end),
            "max_abs_u": u_max,
            "gevrey_order": spec.gevrey_order(),
        }),
    )?;
    Ok(())
}

fn bench_cmd(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let cfg = BenchConfig {
        min_size: args.min_size,
        max_size: args.max_size,
        modes: args.modes.clone(),
        order: args.order,
        reps: args.reps,
    };
    let report = bench(&cfg)?;
    let write_csv = |w: &mut dyn Write| -> CliResult {
        let mut c = csv_writer(w);
        for r in &report.rows {
            c.serialize(r)?;
        }
        c.flush()?;
        Ok(())
    };
    match &args.csv {
        Some(p) => {
            let mut f = create(p)?;
            write_csv(&mut f)?;
            f.flush()?;
        }
        None => write_csv(out)?,
    }
    for &m in &args.modes {
        if let Some(s) = report.slope(m) {
            writeln!(err, "{m}: log-log slope {s:.3}")?;
        }
    }
    Ok(())
}
