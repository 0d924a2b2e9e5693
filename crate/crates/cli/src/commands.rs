//! The four run commands. Each writes its tables and a manifest into the
//! output directory and prints a short summary.

use anyhow::Context as _;

use tdvmm::device::{error_contour, mean_error};
use tdvmm::metrics::{
    design_for_precision, evaluate_design_point, performance_estimate, run_design_point, sweep, trial_traces,
    SweepReport, SweepVar,
};
use tdvmm::par::Execution;
use tdvmm::presets;

use crate::config::RunConfig;
use crate::output::{num, opt_num, OutDir, Table};
use crate::Failure;

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub out: &'a OutDir,
    pub exec: Execution,
    pub strict: bool,
}

const REPORT_COLUMNS: [&str; 26] = [
    "m_rows",
    "n_cols",
    "v_gate_on_V",
    "t_window_s",
    "l_gate_m",
    "beta",
    "r_on_ohm",
    "r_off_ohm",
    "swing_V",
    "max_current_scale",
    "topology",
    "n_trials",
    "e_out_max",
    "e_out_p99",
    "e_out_mean",
    "p_out",
    "e_single_max",
    "i_min_A",
    "i_max_A",
    "dynamic_range_A",
    "capacitance_F",
    "e_cl_total_J",
    "throughput_ops_per_s",
    "energy_efficiency_ops_per_J",
    "overflow_count",
    "underflow_count",
];

fn report_values(r: &SweepReport) -> Vec<String> {
    vec![
        r.m_rows.to_string(),
        r.n_cols.to_string(),
        num(r.v_gate_on),
        num(r.t_window),
        num(r.l_gate),
        num(r.beta),
        num(r.r_on),
        num(r.r_off),
        num(r.swing),
        num(r.max_current_scale),
        r.topology.clone(),
        r.n_trials.to_string(),
        num(r.e_out_max),
        num(r.e_out_p99),
        num(r.e_out_mean),
        r.p_out.to_string(),
        num(r.e_single_max),
        num(r.i_min),
        num(r.i_max),
        num(r.dynamic_range),
        num(r.capacitance),
        num(r.e_cl_total),
        num(r.throughput),
        num(r.energy_efficiency),
        r.overflow_count.to_string(),
        r.underflow_count.to_string(),
    ]
}

/// Metrics repeated per sweep axis in the long-format plot table.
const PLOT_METRICS: [&str; 6] = [
    "e_out_max",
    "e_out_mean",
    "p_out",
    "e_cl_total_J",
    "energy_efficiency_ops_per_J",
    "throughput_ops_per_s",
];

fn plot_values(r: &SweepReport) -> [f64; 6] {
    [
        r.e_out_max,
        r.e_out_mean,
        f64::from(r.p_out),
        r.e_cl_total,
        r.energy_efficiency,
        r.throughput,
    ]
}

fn print_report(r: &SweepReport) {
    println!("array          {} x {} ({})", r.m_rows, r.n_cols, r.topology);
    println!("trials         {}", r.n_trials);
    println!("e_out max      {:.4}%  (mean {:.4}%)", 100.0 * r.e_out_max, 100.0 * r.e_out_mean);
    println!("precision      {} bit", r.p_out);
    println!("capacitor      {:.4e} F", r.capacitance);
    println!("E_Cl           {:.4e} J", r.e_cl_total);
    println!("efficiency     {:.4e} ops/J", r.energy_efficiency);
    println!("throughput     {:.4e} ops/s", r.throughput);
    println!("overflow       {}  underflow {}", r.overflow_count, r.underflow_count);
}

pub fn simulate(ctx: &Context) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    let dp = cfg.design();
    let result = evaluate_design_point(&dp, &cfg.batch, &cfg.perf, ctx.exec)?;

    let mut rows = Table::new(&[
        "trial",
        "column",
        "t_out_sim_s",
        "t_out_ideal_s",
        "err",
        "code",
        "overflow",
        "underflow",
    ]);
    for r in &result.records {
        rows.push(vec![
            r.trial.to_string(),
            r.column.to_string(),
            num(r.t_out_sim),
            num(r.t_out_ideal),
            num(r.err),
            r.code.to_string(),
            r.overflow.to_string(),
            r.underflow.to_string(),
        ]);
    }
    ctx.out.write_table("result.csv", &rows)?;

    let mut summary = Table::new(&REPORT_COLUMNS);
    summary.push(report_values(&result.report));
    ctx.out.write_table("summary.csv", &summary)?;

    if cfg.output.trace {
        let traces = trial_traces(&dp, &cfg.batch, cfg.output.trace_trial)?;
        let mut t = Table::new(&["trial", "column", "side", "time_s", "v_cap_V"]);
        for (k, trace) in traces.iter().enumerate() {
            let side = if k % 2 == 0 { "pos" } else { "neg" };
            for &(time, v) in &trace.samples {
                t.push(vec![
                    cfg.output.trace_trial.to_string(),
                    (k / 2).to_string(),
                    side.into(),
                    num(time),
                    num(v),
                ]);
            }
        }
        ctx.out.write_table("trace.csv", &t)?;
    }
    ctx.out.write_manifest(cfg, "simulate")?;

    print_report(&result.report);
    println!("output         {}", ctx.out.path().display());

    let r = &result.report;
    if ctx.strict && (r.overflow_count > 0 || r.underflow_count > 0) {
        return Err(Failure::Strict(format!(
            "{} overflowing and {} underflowing columns",
            r.overflow_count, r.underflow_count
        )));
    }
    Ok(())
}

pub fn sweep_cmd(ctx: &Context) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    if cfg.grid.is_empty() {
        return Err(Failure::Config("sweep grid is empty; add a [sweep] section or use a preset".into()));
    }
    let outcomes = sweep(&cfg.design(), &cfg.grid, &cfg.batch, &cfg.perf, ctx.exec)?;
    let axes: Vec<SweepVar> = cfg.grid.axes.iter().map(|(v, _)| *v).collect();

    let mut header: Vec<String> = vec!["point".into(), "status".into(), "message".into()];
    header.extend(axes.iter().map(|v| v.name().to_string()));
    header.extend(REPORT_COLUMNS.iter().map(|s| s.to_string()));
    let mut table = Table::new(&header);
    let mut plot = Table::new(&["point", "sweep_var", "value", "metric", "metric_value"]);
    let mut failures = 0;

    for (i, o) in outcomes.iter().enumerate() {
        let mut row = vec![i.to_string()];
        match &o.result {
            Ok(_) => row.extend(["ok".to_string(), String::new()]),
            Err(e) => {
                failures += 1;
                log::warn!("point {i} failed: {e}");
                row.extend(["failed".to_string(), e.clone()]);
            }
        }
        row.extend(o.assignments.iter().map(|(_, v)| num(*v)));
        match &o.result {
            Ok(r) => {
                row.extend(report_values(r));
                for (var, value) in &o.assignments {
                    for (metric, mv) in PLOT_METRICS.iter().zip(plot_values(r)) {
                        plot.push(vec![i.to_string(), var.name().into(), num(*value), metric.to_string(), num(mv)]);
                    }
                }
            }
            Err(_) => row.extend(std::iter::repeat_n(String::new(), REPORT_COLUMNS.len())),
        }
        table.push(row);
    }
    ctx.out.write_table("sweep.csv", &table)?;
    ctx.out.write_table("plot.csv", &plot)?;
    ctx.out.write_manifest(cfg, "sweep")?;

    println!("{} points, {} failed", outcomes.len(), failures);
    println!("output         {}", ctx.out.path().display());
    if ctx.strict && failures > 0 {
        return Err(Failure::Strict(format!("{failures} sweep points failed")));
    }
    Ok(())
}

pub fn contour(ctx: &Context) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    let base = cfg.design();
    let points = if cfg.grid.is_empty() { vec![vec![]] } else { cfg.grid.points() };

    let mut table = Table::new(&[
        "point", "v_gate_V", "l_gate_m", "beta", "v_node_V", "weight", "r0_ohm", "error", "in_region",
    ]);
    let mut plot = Table::new(&["point", "sweep_var", "value", "metric", "metric_value"]);
    for (i, assignments) in points.iter().enumerate() {
        let mut dp = base;
        for &(var, value) in assignments {
            var.apply(&mut dp, value);
        }
        let mut spec = presets::contour_spec(&dp);
        spec.delta_v = cfg.contour.delta_v;
        let map = error_contour(&dp.cell, &spec, &cfg.contour.v_nodes, &cfg.contour.weights)
            .with_context(|| format!("contour point {i}"))?;
        for p in &map {
            table.push(vec![
                i.to_string(),
                num(dp.v_gate_on),
                num(dp.cell.mosfet.l_gate),
                num(dp.cell.rram.beta),
                num(p.v_node),
                num(p.weight),
                num(p.r0),
                opt_num(p.error),
                p.in_region.to_string(),
            ]);
        }
        let mean = mean_error(&map);
        if assignments.is_empty() {
            plot.push(vec![i.to_string(), String::new(), String::new(), "mean_error".into(), opt_num(mean)]);
        }
        for (var, value) in assignments {
            plot.push(vec![i.to_string(), var.name().into(), num(*value), "mean_error".into(), opt_num(mean)]);
        }
        match mean {
            Some(m) => println!("point {i}: mean in-region error {:.4e}", m),
            None => println!("point {i}: no defined in-region points"),
        }
    }
    ctx.out.write_table("contour.csv", &table)?;
    ctx.out.write_table("plot.csv", &plot)?;
    ctx.out.write_manifest(cfg, "contour")?;
    println!("output         {}", ctx.out.path().display());
    Ok(())
}

pub fn estimate(ctx: &Context) -> Result<(), Failure> {
    let cfg = ctx.cfg;
    let base = cfg.design();
    let designs: Vec<_> = if cfg.precision_bits.is_empty() {
        vec![base]
    } else {
        cfg.precision_bits
            .iter()
            .map(|&b| design_for_precision(&base, &cfg.perf, b))
            .collect()
    };

    let mut summary = Table::new(&[
        "bits",
        "m_rows",
        "n_cols",
        "t_window_s",
        "e_out_max",
        "p_out",
        "area_m2",
        "energy_J",
        "energy_efficiency_ops_per_J",
        "throughput_ops_per_s",
    ]);
    let mut breakdown = Table::new(&["bits", "component", "area_m2", "energy_J", "area_share", "energy_share"]);
    for dp in &designs {
        let sim = run_design_point(dp, &cfg.batch, &cfg.perf, ctx.exec)?;
        let est = performance_estimate(dp, &cfg.perf, &sim)?;
        println!(
            "{} bit, {} x {}, T = {:.3e} s, e_out max {:.4}% (p_out {})",
            dp.output_bits,
            dp.m_rows,
            dp.n_cols,
            dp.t_window,
            100.0 * sim.e_out_max,
            sim.p_out
        );
        println!("  {:<16} {:>12} {:>8} {:>12} {:>8}", "component", "area (m2)", "share", "energy (J)", "share");
        for c in &est.breakdown {
            let (sa, se) = est.share(&c.name).unwrap_or((0.0, 0.0));
            println!(
                "  {:<16} {:>12.4e} {:>7.2}% {:>12.4e} {:>7.2}%",
                c.name,
                c.area,
                100.0 * sa,
                c.energy,
                100.0 * se
            );
            breakdown.push(vec![
                dp.output_bits.to_string(),
                c.name.clone(),
                num(c.area),
                num(c.energy),
                num(sa),
                num(se),
            ]);
        }
        println!("  efficiency {:.4e} ops/J, throughput {:.4e} ops/s", est.energy_efficiency, est.throughput);
        summary.push(vec![
            dp.output_bits.to_string(),
            dp.m_rows.to_string(),
            dp.n_cols.to_string(),
            num(dp.t_window),
            num(sim.e_out_max),
            sim.p_out.to_string(),
            num(est.area),
            num(est.energy),
            num(est.energy_efficiency),
            num(est.throughput),
        ]);
    }
    ctx.out.write_table("estimate.csv", &summary)?;
    ctx.out.write_table("breakdown.csv", &breakdown)?;
    ctx.out.write_manifest(cfg, "estimate")?;
    println!("output         {}", ctx.out.path().display());
    Ok(())
}
