use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mmwave::engine::{SummaryRow, TraceEvent};

use crate::error::CliError;

pub const CSV_HEADER: &str =
    "speed_kmh,scheme,seeds,success_rate_mean,success_rate_stderr,handovers_mean,cluster_size_mean";

/// Results table with fixed column order, `.` decimals and LF endings.
pub fn results_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:.3},{},{},{:.6},{:.6},{:.4},{:.4}\n",
            r.speed_kmh,
            r.scheme,
            r.seeds,
            r.success_rate_mean,
            r.success_rate_stderr,
            r.handovers_mean,
            r.cluster_size_mean
        ));
    }
    out
}

/// One JSON object per line.
pub fn events_jsonl(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("trace events always serialize"));
        out.push('\n');
    }
    out
}

/// Writes every file or none: contents go to hidden temporaries in `dir`
/// first and are renamed into place only after all writes succeeded.
pub fn write_all_atomic(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, contents) in files {
        let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
        let result = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        });
        staged.push((tmp.clone(), dir.join(name)));
        if let Err(e) = result {
            cleanup(&staged);
            return Err(CliError::io(&tmp, e));
        }
    }
    let mut done = Vec::new();
    for (tmp, target) in &staged {
        if let Err(e) = fs::rename(tmp, target) {
            cleanup(&staged);
            return Err(CliError::io(target, e));
        }
        done.push(target.clone());
    }
    Ok(done)
}
