//! Subcommand implementations: compute, serialize, report file paths.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use mimo_dof::{
    active_case, baseline_region, corner_points, inner_region, outer_region,
    sufficient_delayed_threshold, BaselineMode, DofRegion, PhasePlan, SchemeError,
    SimError, SimOptions,
};

use crate::opts::RunConfig;
use crate::CliError;

fn ensure_out_dir(rc: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&rc.out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", rc.out_dir.display())))
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialization: {e}")))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn csv_writer(path: &PathBuf) -> Result<csv::Writer<fs::File>, CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(file))
}

fn halfplane_rows(region: &DofRegion) -> Vec<serde_json::Value> {
    region
        .halfplanes()
        .iter()
        .map(|hp| json!({"a": hp.a, "b": hp.b, "c": hp.c, "redundant": hp.redundant}))
        .collect()
}

pub fn cmd_region(rc: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(rc)?;
    let outer = outer_region(&rc.cfg, &rc.q).map_err(|e| CliError::Validation(e.to_string()))?;
    let inner = inner_region(&rc.cfg, &rc.q).map_err(|e| CliError::Validation(e.to_string()))?;
    let full = baseline_region(&rc.cfg, BaselineMode::FullCsit)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let none = baseline_region(&rc.cfg, BaselineMode::NoCsit)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let csv_path = rc.out_dir.join("regions.csv");
    let mut w = csv_writer(&csv_path)?;
    w.write_record(["region", "vertex_index", "d1", "d2"])
        .and_then(|()| {
            for (name, region) in [
                ("outer", &outer),
                ("inner", &inner),
                ("full_csit", &full),
                ("no_csit", &none),
            ] {
                for (i, v) in region.vertices().iter().enumerate() {
                    w.write_record([
                        name.to_string(),
                        i.to_string(),
                        format!("{}", v.0),
                        format!("{}", v.1),
                    ])?;
                }
            }
            w.flush()?;
            Ok(())
        })
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", csv_path.display())))?;

    let corners: Vec<_> = if rc.cfg.scheme_regime() {
        corner_points(&rc.cfg, &rc.q)
    } else {
        Vec::new()
    };
    let summary = json!({
        "cfg": rc.cfg,
        "alpha": rc.q.alpha_avg(),
        "beta": rc.q.beta_avg(),
        "case": active_case(&rc.cfg, &rc.q).to_string(),
        "sufficient_delayed_threshold": sufficient_delayed_threshold(&rc.cfg, &rc.q),
        "corner_points": corners,
        "halfplanes": {
            "outer": halfplane_rows(&outer),
            "inner": halfplane_rows(&inner),
        },
    });
    write_json(&rc.out_dir.join("region_summary.json"), &summary)?;
    println!(
        "wrote {} and {}",
        csv_path.display(),
        rc.out_dir.join("region_summary.json").display()
    );
    Ok(())
}

fn build_plan(rc: &RunConfig) -> Result<PhasePlan, CliError> {
    let target = rc
        .target
        .ok_or_else(|| CliError::Validation("missing --target (corner label)".into()))?;
    mimo_dof::build_phase_plan(&rc.cfg, &rc.q, target, rc.t_slots, rc.s_phases).map_err(|e| {
        match e {
            SchemeError::TargetInactive { .. }
            | SchemeError::Infeasible { .. }
            | SchemeError::OutsideSchemeRegime { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    })
}

pub fn cmd_plan(rc: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(rc)?;
    let plan = build_plan(rc)?;

    let csv_path = rc.out_dir.join("plan.csv");
    let mut w = csv_writer(&csv_path)?;
    let header = [
        "slot",
        "delta_1",
        "delta_2",
        "pow_common",
        "pow_a",
        "pow_a_prime",
        "pow_b",
        "pow_b_prime",
        "rate_a",
        "rate_a_prime",
        "rate_b",
        "rate_b_prime",
        "rate_common",
        "ic_common_split_1",
        "ic_common_split_2",
    ];
    let split = plan
        .ic_common_split
        .map(|(c1, c2)| (c1.to_string(), c2.to_string()))
        .unwrap_or_default();
    w.write_record(header)
        .and_then(|()| {
            for t in 0..plan.t_slots {
                let p = &plan.power_table[t];
                let r = &plan.rate_table[t];
                w.write_record([
                    t.to_string(),
                    plan.delta_seq[0][t].to_string(),
                    plan.delta_seq[1][t].to_string(),
                    p.common.to_string(),
                    p.a.to_string(),
                    p.a_prime.to_string(),
                    p.b.to_string(),
                    p.b_prime.to_string(),
                    r.a.to_string(),
                    r.a_prime.to_string(),
                    r.b.to_string(),
                    r.b_prime.to_string(),
                    r.common.to_string(),
                    split.0.clone(),
                    split.1.clone(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", csv_path.display())))?;

    write_json(&rc.out_dir.join("plan.json"), &plan)?;
    println!(
        "wrote {} and {}",
        csv_path.display(),
        rc.out_dir.join("plan.json").display()
    );
    Ok(())
}

pub fn cmd_simulate(rc: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(rc)?;
    let target = rc
        .target
        .ok_or_else(|| CliError::Validation("missing --target (corner label)".into()))?;
    let opts = SimOptions {
        t_slots: rc.t_slots,
        s_phases: rc.s_phases,
        eta: rc.eta,
        backoff_bits: rc.backoff_bits,
    };
    let report = mimo_dof::simulate_dof(
        &rc.cfg,
        &rc.q,
        target,
        &rc.snr_ladder,
        rc.trials,
        rc.seed,
        &opts,
    )
    .map_err(|e| match e {
        SimError::Scheme(inner) => CliError::Infeasible(inner.to_string()),
        SimError::InsufficientLadder { .. }
        | SimError::TooFewTrials(_)
        | SimError::EtaTooLarge { .. } => CliError::Validation(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;

    let csv_path = rc.out_dir.join("sim.csv");
    let mut w = csv_writer(&csv_path)?;
    w.write_record([
        "P",
        "user",
        "designed_rate",
        "achieved_rate",
        "margin_min",
        "distortion",
    ])
    .and_then(|()| {
        for point in &report.points {
            for user in 0..2 {
                w.write_record([
                    format!("{}", point.snr),
                    (user + 1).to_string(),
                    format!("{}", point.designed_rate[user]),
                    format!("{}", point.achieved_rate[user]),
                    format!("{}", point.margin_min[user]),
                    format!("{}", point.distortion_mean),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    })
    .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", csv_path.display())))?;

    let summary = json!({
        "d1_hat": report.d_hat[0],
        "d2_hat": report.d_hat[1],
        "d1_stderr": report.d_stderr[0],
        "d2_stderr": report.d_stderr[1],
        "designed_dof": report.designed_dof,
        "margins_min": report.points.iter().map(|p| p.margin_min).collect::<Vec<_>>(),
        "report": report,
    });
    write_json(&rc.out_dir.join("sim.json"), &summary)?;
    println!(
        "d1_hat = {:.4}, d2_hat = {:.4} (designed {:.4}, {:.4})",
        report.d_hat[0], report.d_hat[1], report.designed_dof.0, report.designed_dof.1
    );
    println!(
        "wrote {} and {}",
        csv_path.display(),
        rc.out_dir.join("sim.json").display()
    );
    Ok(())
}
