//! Report files: CSV and JSON summaries, histograms and the DOT graph.

use crate::metagame::{BootstrapReport, Statistic};
use std::fmt::Write;

/// `mean±halfwidth` with three decimals.
pub fn format_pm(mean: f64, halfwidth: f64) -> String {
    format!("{mean:.3}±{halfwidth:.3}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn stats_of(r: &BootstrapReport) -> Vec<Statistic> {
    Statistic::ALL.into_iter().filter(|s| r.statistics.contains_key(s.key())).collect()
}

/// One row per statistic and strategy.
pub fn summary_csv(r: &BootstrapReport) -> String {
    let mut out = String::from("statistic,strategy,mean,std,ci_lo,ci_hi,halfwidth,summary,full_sample,n_replicates,failures\n");
    for stat in stats_of(r) {
        for name in &r.strategies {
            let s = r.get(stat, name).expect("every strategy has every statistic");
            let full = s.full_sample.map_or(String::new(), |v| v.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                stat.key(),
                csv_field(name),
                s.mean,
                s.std,
                s.ci_lo,
                s.ci_hi,
                s.halfwidth(),
                format_pm(s.mean, s.halfwidth()),
                full,
                s.n_replicates,
                s.failures
            )
            .unwrap();
        }
    }
    out
}

/// Strategies down, statistics across, cells `mean±halfwidth`.
pub fn table_csv(r: &BootstrapReport) -> String {
    let stats = stats_of(r);
    let mut out = String::from("strategy");
    for s in &stats {
        out.push(',');
        out.push_str(s.key());
    }
    out.push('\n');
    for name in &r.strategies {
        out.push_str(&csv_field(name));
        for &stat in &stats {
            let s = r.get(stat, name).expect("every strategy has every statistic");
            out.push(',');
            out.push_str(&format_pm(s.mean, s.halfwidth()));
        }
        out.push('\n');
    }
    out
}

/// `(file stem, csv)` per histogram: bin edges and counts.
pub fn histogram_csvs(r: &BootstrapReport) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let Some(hists) = &r.histograms else { return out };
    for (stat, per) in hists {
        for (i, name) in r.strategies.iter().enumerate() {
            let Some(h) = per.get(name) else { continue };
            let edges = h.edges();
            let mut csv = String::from("bin_lo,bin_hi,count\n");
            for (k, c) in h.counts.iter().enumerate() {
                writeln!(csv, "{},{},{}", edges[k], edges[k + 1], c).unwrap();
            }
            out.push((format!("{stat}_{i:02}_{}", file_safe(name)), csv));
        }
    }
    out
}

/// Per-replicate values; failed values are empty cells.
pub fn replicates_csv(r: &BootstrapReport) -> Option<String> {
    let rows = r.values.as_ref()?;
    let mut out = String::from("replicate");
    for stat in stats_of(r) {
        for name in &r.strategies {
            write!(out, ",{}", csv_field(&format!("{}:{name}", stat.key()))).unwrap();
        }
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    Some(out)
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_minus_layout() {
        assert_eq!(format_pm(0.0021, 0.0199), "0.002±0.020");
        assert_eq!(format_pm(-1.5, 0.0), "-1.500±0.000");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(file_safe("g/search x"), "g_search_x");
    }
}
