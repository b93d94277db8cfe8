//! CSV artifacts. All files are UTF-8 with `,` separators, `.` decimals and
//! LF line endings.

use std::io::Write;

use bri_core::analysis::ErrorReport;
use bri_core::codec::Scheme;
use bri_core::lr::LogRow;
use bri_core::sim::{waiting_time_cdf, TrialRecord};

pub type CsvResult = Result<(), csv::Error>;

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_trials<W: Write>(out: W, records: &[TrialRecord]) -> CsvResult {
    let mut w = writer(out);
    w.write_record(["scheme", "trial", "waiting_time_s", "k_used", "decode_error"])?;
    for r in records {
        w.write_record([
            r.scheme.name().to_string(),
            r.trial.to_string(),
            num(r.waiting_time),
            r.k_used.to_string(),
            r.decode_error.map(num).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One block of CDF steps per scheme, in the order given.
pub fn write_cdf<W: Write>(out: W, records: &[TrialRecord], schemes: &[Scheme]) -> CsvResult {
    let mut w = writer(out);
    w.write_record(["scheme", "time_s", "cdf"])?;
    for &s in schemes {
        let Ok(steps) = waiting_time_cdf(records, s) else {
            continue;
        };
        for (t, p) in steps {
            w.write_record([s.name().to_string(), num(t), num(p)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_mse_table<W: Write>(out: W, reports: &[ErrorReport]) -> CsvResult {
    let mut w = writer(out);
    w.write_record(["n", "d", "mse", "max_abs", "node_scheme"])?;
    for r in reports {
        w.write_record([
            r.n.to_string(),
            r.d.to_string(),
            num(r.mse),
            num(r.max_abs),
            r.node_scheme.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_training_log<W: Write>(out: W, rows: &[LogRow]) -> CsvResult {
    let mut w = writer(out);
    w.write_record([
        "iteration",
        "loss",
        "grad_error_rel",
        "k_used",
        "wall_or_virtual_time_s",
    ])?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            num(r.loss),
            num(r.grad_error_rel),
            r.k_used.to_string(),
            num(r.time),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The MSE grid laid out with one row per `d` and one column per `n`.
pub fn format_mse_grid(reports: &[ErrorReport]) -> String {
    let mut ns: Vec<usize> = reports.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut ds: Vec<usize> = reports.iter().map(|r| r.d).collect();
    ds.sort_unstable();
    ds.dedup();
    let mut s = format!("{:>4}", "d");
    for n in &ns {
        s.push_str(&format!(" {:>14}", format!("n={n}")));
    }
    s.push('\n');
    for d in &ds {
        s.push_str(&format!("{d:>4}"));
        for n in &ns {
            match reports.iter().find(|r| r.n == *n && r.d == *d) {
                Some(r) => s.push_str(&format!(" {:>14.6e}", r.mse)),
                None => s.push_str(&format!(" {:>14}", "-")),
            }
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_layout() {
        let recs = vec![
            TrialRecord {
                scheme: Scheme::Bri,
                trial: 0,
                waiting_time: 0.5,
                decode_error: Some(0.25),
                k_used: 11,
                failed: false,
            },
            TrialRecord {
                scheme: Scheme::Ep,
                trial: 0,
                waiting_time: f64::INFINITY,
                decode_error: None,
                k_used: 100,
                failed: true,
            },
        ];
        let mut buf = Vec::new();
        write_trials(&mut buf, &recs).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scheme,trial,waiting_time_s,k_used,decode_error\nBRI,0,5e-1,11,2.5e-1\nEP,0,inf,100,\n"
        );
    }

    #[test]
    fn cdf_layout() {
        let recs: Vec<TrialRecord> = [2.0, 1.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| TrialRecord {
                scheme: Scheme::Lcc,
                trial: i,
                waiting_time: t,
                decode_error: None,
                k_used: 19,
                failed: false,
            })
            .collect();
        let mut buf = Vec::new();
        write_cdf(&mut buf, &recs, &[Scheme::Lcc, Scheme::Bri]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scheme,time_s,cdf\nLCC,1e0,5e-1\nLCC,2e0,1e0\n"
        );
    }
}
