//! CSV tables. Floats are written with 17 significant digits so every value
//! reads back as the same `f64`.

use std::io::{self, Write};

use moebius_flux::experiments::{RecordStatus, SweepRecord};

pub const SWEEP_HEADER: &str = "f,e0_full,e0_even,e0_odd,gap,node_amp,current,status";
pub const SPECTRUM_HEADER: &str = "index,eigenvalue,residual";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn status_token(s: &RecordStatus) -> &'static str {
    match s {
        RecordStatus::Ok => "ok",
        RecordStatus::Failed(_) => "failed",
    }
}

pub fn write_sweep<W: Write>(mut w: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.f),
            opt(r.e0_full),
            opt(r.e0_even),
            opt(r.e0_odd),
            opt(r.gap),
            opt(r.node_amp),
            opt(r.current),
            status_token(&r.status)
        )?;
    }
    Ok(())
}

pub fn write_spectrum<W: Write>(mut w: W, values: &[f64], residuals: &[f64]) -> io::Result<()> {
    writeln!(w, "{SPECTRUM_HEADER}")?;
    for (i, (v, r)) in values.iter().zip(residuals).enumerate() {
        writeln!(w, "{i},{},{}", fmt_f64(*v), fmt_f64(*r))?;
    }
    Ok(())
}

#[cfg(test)]
fn parse_opt(field: &str, line: usize) -> Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|e| format!("line {line}: bad number `{field}`: {e}"))
}

/// Reads a table written by [`write_sweep`]. Failure messages are not
/// stored in the file, so failed rows come back with an empty message.
#[cfg(test)]
pub fn parse_sweep(text: &str) -> Result<Vec<SweepRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SWEEP_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let n = n + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(format!("line {n}: expected 8 fields, got {}", fields.len()));
        }
        let status = match fields[7] {
            "ok" => RecordStatus::Ok,
            "failed" => RecordStatus::Failed(String::new()),
            s => return Err(format!("line {n}: unknown status `{s}`")),
        };
        out.push(SweepRecord {
            f: parse_opt(fields[0], n)?.ok_or_else(|| format!("line {n}: missing f"))?,
            e0_full: parse_opt(fields[1], n)?,
            e0_even: parse_opt(fields[2], n)?,
            e0_odd: parse_opt(fields[3], n)?,
            gap: parse_opt(fields[4], n)?,
            node_amp: parse_opt(fields[5], n)?,
            current: parse_opt(fields[6], n)?,
            status,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.0, -0.0, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn sweep_table_round_trips() {
        let recs = vec![
            SweepRecord {
                f: -0.25,
                e0_full: Some(0.1),
                e0_even: None,
                e0_odd: Some(0.7),
                gap: Some(1e-3),
                node_amp: Some(0.0),
                current: None,
                status: RecordStatus::Ok,
            },
            SweepRecord {
                f: 0.0,
                e0_full: None,
                e0_even: None,
                e0_odd: None,
                gap: None,
                node_amp: None,
                current: None,
                status: RecordStatus::Failed("boom".into()),
            },
        ];
        let mut buf = Vec::new();
        write_sweep(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(2).unwrap().ends_with(",,,,,,failed"));
        let back = parse_sweep(&text).unwrap();
        assert_eq!(back[0], recs[0]);
        let mut again = Vec::new();
        write_sweep(&mut again, &back).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), text);

        assert!(parse_sweep("f,e0\n").is_err());
        assert!(parse_sweep(&format!("{SWEEP_HEADER}\n1,2\n")).is_err());
        assert!(parse_sweep(&format!("{SWEEP_HEADER}\nx,,,,,,,ok\n")).is_err());
    }
}
