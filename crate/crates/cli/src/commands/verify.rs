//! `verify`: runs the named check suite and emits the pass/fail table.

use cknball::{run_checks, CheckOpts};

use crate::output::write_atomic;
use crate::settings::Settings;
use crate::{CliError, EXIT_OK, EXIT_VERIFICATION};

pub fn run(settings: &Settings) -> Result<u8, CliError> {
    let mut opts = CheckOpts {
        grid_n: settings.usize_or("grid-n", 512)?,
        t_max: settings.f64_or("tmax", 40.0)?,
        ..CheckOpts::default()
    };
    if let Some(list) = settings.raw("checks") {
        opts.filter = list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
    }
    if let Some(spec) = settings.raw("inject-fault") {
        let (i, f) = spec.split_once(':').ok_or_else(|| {
            CliError::usage(format!("--inject-fault '{spec}': expected INDEX:FACTOR"))
        })?;
        let idx: usize = i
            .parse()
            .map_err(|e| CliError::usage(format!("fault index '{i}': {e}")))?;
        let factor: f64 = f
            .parse()
            .map_err(|e| CliError::usage(format!("fault factor '{f}': {e}")))?;
        opts.fault = Some((idx, factor));
    }

    let results = run_checks(&opts).map_err(CliError::from_core)?;
    if results.is_empty() {
        return Err(CliError::usage(
            "no checks matched the --checks filter".into(),
        ));
    }

    let mut csv = String::from("# schema=1\ncheck,worst,tol,pass\n");
    let mut all_pass = true;
    for r in &results {
        println!(
            "{} {:<28} worst {:>12.3e}  tol {:>9.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.worst,
            r.tol
        );
        csv.push_str(&format!("{},{},{},{}\n", r.name, r.worst, r.tol, r.pass));
        all_pass &= r.pass;
    }
    write_atomic(&settings.out_dir().join("verify.csv"), csv.as_bytes())?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFICATION })
}
