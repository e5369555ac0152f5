//! Standalone SVG line chart of sweep energies, written as plain text.

use std::fmt::Write;

use moebius_flux::experiments::{Sector, SweepRecord};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const SERIES: [(Sector, &str, &str); 3] = [
    (Sector::Full, "E0 full", "#1f77b4"),
    (Sector::Even, "E0 even", "#2ca02c"),
    (Sector::Odd, "E0 odd", "#d62728"),
];

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Energy columns vs flux. Missing values split a curve into pieces.
pub fn sweep_chart(records: &[SweepRecord], title: &str) -> String {
    let energies = records
        .iter()
        .flat_map(|r| SERIES.iter().filter_map(move |(s, ..)| r.energy(*s)));
    let (e_lo, e_hi) = energies.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
    let (e_lo, e_hi) = if e_lo.is_finite() { span(e_lo, e_hi) } else { (0.0, 1.0) };
    let f_lo = records.first().map_or(0.0, |r| r.f);
    let f_hi = records.last().map_or(1.0, |r| r.f);
    let (f_lo, f_hi) = if f_hi > f_lo { (f_lo, f_hi) } else { span(f_lo, f_hi) };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let x = |f: f64| LEFT + (f - f_lo) / (f_hi - f_lo) * pw;
    let y = |e: f64| TOP + (e_hi - e) / (e_hi - e_lo) * ph;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    );

    for t in 0..=TICKS {
        let frac = t as f64 / TICKS as f64;
        let fv = f_lo + frac * (f_hi - f_lo);
        let ev = e_lo + frac * (e_hi - e_lo);
        let (xt, yt) = (x(fv), y(ev));
        let _ = writeln!(
            s,
            "<line x1=\"{xt:.2}\" y1=\"{b:.2}\" x2=\"{xt:.2}\" y2=\"{b2:.2}\" stroke=\"black\"/>\
             <text x=\"{xt:.2}\" y=\"{ty:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{fv:.3}</text>",
            b = TOP + ph,
            b2 = TOP + ph + 5.0,
            ty = TOP + ph + 18.0
        );
        let _ = writeln!(
            s,
            "<line x1=\"{l2:.2}\" y1=\"{yt:.2}\" x2=\"{LEFT:.2}\" y2=\"{yt:.2}\" stroke=\"black\"/>\
             <text x=\"{tx:.2}\" y=\"{yl:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{ev:.4}</text>",
            l2 = LEFT - 5.0,
            tx = LEFT - 8.0,
            yl = yt + 4.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">flux f (flux quanta)</text>",
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{yc}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {yc})\">ground energy E0</text>",
        yc = TOP + ph / 2.0
    );

    let mut legend_row = 0;
    for (sector, label, color) in SERIES {
        if records.iter().all(|r| r.energy(sector).is_none()) {
            continue;
        }
        let mut piece: Vec<String> = Vec::new();
        let flush = |piece: &mut Vec<String>, s: &mut String| {
            if piece.len() > 1 {
                let _ = writeln!(
                    s,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    piece.join(" ")
                );
            }
            piece.clear();
        };
        for r in records {
            match r.energy(sector) {
                Some(e) => piece.push(format!("{:.2},{:.2}", x(r.f), y(e))),
                None => flush(&mut piece, &mut s),
            }
        }
        flush(&mut piece, &mut s);
        let ly = TOP + 10.0 + 20.0 * legend_row as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>",
            lx + 25.0,
            lx + 32.0,
            ly + 4.0
        );
        legend_row += 1;
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
