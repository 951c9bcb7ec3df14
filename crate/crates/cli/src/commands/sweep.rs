//! `sweep`: Cartesian parameter sweep with per-cell completion markers,
//! deterministic row order and bounded parallelism.
//!
//! With both `--a` and `--b` present the sweep runs the constant estimator
//! per (a, b) cell; otherwise it solves the ground-state problem over the
//! (alpha, beta, lambda, q) grid. A cell whose marker file already parses is
//! skipped, so interrupted sweeps resume with only the incomplete cells.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::output::{ensure_dir, write_atomic, write_json};
use crate::settings::Settings;
use crate::{CliError, EXIT_OK};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CknCell {
    idx: usize,
    a: f64,
    b: f64,
    status: String,
    p: Option<f64>,
    optimizer_estimate: Option<f64>,
    optimizer_converged: Option<bool>,
    hardy_floor: Option<f64>,
    sample_quotient_min: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SolveCell {
    idx: usize,
    alpha: f64,
    beta: f64,
    lambda: f64,
    q: f64,
    status: String,
    quotient: Option<f64>,
    residual: Option<f64>,
    nehari_gap: Option<f64>,
    converged: Option<bool>,
    positivity_ok: Option<bool>,
}

pub fn run(settings: &Settings) -> Result<u8, CliError> {
    let out = settings.out_dir();
    ensure_dir(&out.join("cells"))?;
    let jobs = settings.usize_or("jobs", 1)?.max(1);

    let a_vals = settings.values("a")?;
    let b_vals = settings.values("b")?;
    if let (Some(a_vals), Some(b_vals)) = (a_vals, b_vals) {
        sweep_ckn(settings, &a_vals, &b_vals, jobs)
    } else {
        let alpha = settings.values("alpha")?.unwrap_or_else(|| vec![0.0]);
        let beta = settings.values("beta")?.unwrap_or_else(|| vec![0.0]);
        let lambda = settings.values("lambda")?.unwrap_or_else(|| vec![0.0]);
        let q = settings
            .values("q")?
            .ok_or_else(|| CliError::usage("sweep needs --a/--b or --q (values or ranges)".into()))?;
        sweep_solve(settings, &alpha, &beta, &lambda, &q, jobs)
    }
}

fn run_cells<C, F>(cells: Vec<C>, jobs: usize, work: F) -> Vec<C>
where
    C: Clone + Send + Sync,
    F: Fn(&C) -> C + Sync,
{
    let results: Mutex<Vec<Option<C>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let done = work(&cells[i]);
                results.lock().unwrap()[i] = Some(done);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|c| c.expect("all cells processed"))
        .collect()
}

fn sweep_ckn(settings: &Settings, a_vals: &[f64], b_vals: &[f64], jobs: usize) -> Result<u8, CliError> {
    let out = settings.out_dir();
    let mut cells = Vec::new();
    let mut idx = 0;
    for &a in a_vals {
        for &b in b_vals {
            cells.push(CknCell {
                idx,
                a,
                b,
                status: "pending".into(),
                p: None,
                optimizer_estimate: None,
                optimizer_converged: None,
                hardy_floor: None,
                sample_quotient_min: None,
            });
            idx += 1;
        }
    }

    let done = run_cells(cells, jobs, |cell| {
        let marker = out.join("cells").join(format!("cell_{:06}.json", cell.idx));
        if let Ok(text) = std::fs::read_to_string(&marker) {
            if let Ok(prev) = serde_json::from_str::<CknCell>(&text) {
                return prev; // resume: completed cell
            }
        }
        let mut cell = cell.clone();
        match super::constant::compute(settings, cell.a, cell.b) {
            Ok((rep, _)) => {
                cell.status = "ok".into();
                cell.p = Some(rep.p);
                cell.optimizer_estimate = Some(rep.optimizer_estimate);
                cell.optimizer_converged = Some(rep.optimizer_converged);
                cell.hardy_floor = Some(rep.hardy_floor);
                cell.sample_quotient_min = Some(rep.sample_quotient_min);
            }
            Err(e) => {
                cell.status = format!("error: {}", e.message.replace(',', ";"));
            }
        }
        let _ = write_json(&marker, &cell);
        cell
    });

    let mut csv = String::from(
        "# schema=1\nidx,a,b,p,optimizer_estimate,optimizer_converged,hardy_floor,sample_quotient_min,status\n",
    );
    for c in &done {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.idx,
            c.a,
            c.b,
            opt(c.p),
            opt(c.optimizer_estimate),
            c.optimizer_converged.map(|b| b.to_string()).unwrap_or_default(),
            opt(c.hardy_floor),
            opt(c.sample_quotient_min),
            c.status
        ));
    }
    write_atomic(&out.join("sweep.csv"), csv.as_bytes())?;
    println!("sweep: {} cells -> {}", done.len(), out.join("sweep.csv").display());
    Ok(EXIT_OK)
}

fn sweep_solve(
    settings: &Settings,
    alpha: &[f64],
    beta: &[f64],
    lambda: &[f64],
    q: &[f64],
    jobs: usize,
) -> Result<u8, CliError> {
    let out = settings.out_dir();
    let mut cells = Vec::new();
    let mut idx = 0;
    for &al in alpha {
        for &be in beta {
            for &la in lambda {
                for &qq in q {
                    cells.push(SolveCell {
                        idx,
                        alpha: al,
                        beta: be,
                        lambda: la,
                        q: qq,
                        status: "pending".into(),
                        quotient: None,
                        residual: None,
                        nehari_gap: None,
                        converged: None,
                        positivity_ok: None,
                    });
                    idx += 1;
                }
            }
        }
    }

    let done = run_cells(cells, jobs, |cell| {
        let marker = out.join("cells").join(format!("cell_{:06}.json", cell.idx));
        if let Ok(text) = std::fs::read_to_string(&marker) {
            if let Ok(prev) = serde_json::from_str::<SolveCell>(&text) {
                return prev;
            }
        }
        let mut cell = cell.clone();
        match super::solve::compute(settings, cell.alpha, cell.beta, cell.lambda, cell.q) {
            Ok((rep, _, _)) => {
                cell.status = "ok".into();
                cell.quotient = Some(rep.quotient);
                cell.residual = Some(rep.residual);
                cell.nehari_gap = Some(rep.nehari_gap);
                cell.converged = Some(rep.converged);
                cell.positivity_ok = Some(rep.positivity_ok);
            }
            Err(e) => {
                cell.status = format!("error: {}", e.message.replace(',', ";"));
            }
        }
        let _ = write_json(&marker, &cell);
        cell
    });

    let mut csv = String::from(
        "# schema=1\nidx,alpha,beta,lambda,q,quotient,residual,nehari_gap,converged,positivity_ok,status\n",
    );
    for c in &done {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.idx,
            c.alpha,
            c.beta,
            c.lambda,
            c.q,
            opt(c.quotient),
            opt(c.residual),
            opt(c.nehari_gap),
            c.converged.map(|b| b.to_string()).unwrap_or_default(),
            c.positivity_ok.map(|b| b.to_string()).unwrap_or_default(),
            c.status
        ));
    }
    write_atomic(&out.join("sweep.csv"), csv.as_bytes())?;
    println!("sweep: {} cells -> {}", done.len(), out.join("sweep.csv").display());
    Ok(EXIT_OK)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
