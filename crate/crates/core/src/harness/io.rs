//! CSV and JSON exports for run artifacts.

use std::fmt::Write as _;
use std::path::Path;

use crate::sim::{MetricsLog, TrafficGroup};

/// Per-TTI throughput log: `tti,dl_bits,ul_bits,n_scheduled`.
pub fn tti_csv(metrics: &MetricsLog) -> String {
    let mut s = String::from("tti,dl_bits,ul_bits,n_scheduled\n");
    for r in &metrics.ttis {
        let _ = writeln!(s, "{},{},{},{}", r.tti, r.dl_bits, r.ul_bits, r.n_scheduled);
    }
    s
}

/// Per-packet delay log: `group,created_tti,delivered_tti,delay_s`.
/// Undelivered packets leave `delivered_tti` empty.
pub fn delay_csv(metrics: &MetricsLog) -> String {
    let mut s = String::from("group,created_tti,delivered_tti,delay_s\n");
    for d in &metrics.delays {
        let delivered = d
            .delivered_at
            .map(|t| t.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{}",
            d.group.name(),
            d.created_at,
            delivered,
            d.delay_s
        );
    }
    s
}

/// Recompute the delayed-packet fraction from delay CSV text; used to check
/// summary consistency against the exported artifact.
pub fn delayed_fraction_from_csv(csv: &str, group: TrafficGroup, bound_s: f64) -> f64 {
    let mut total = 0u64;
    let mut late = 0u64;
    for line in csv.lines().skip(1) {
        let mut fields = line.split(',');
        let g = fields.next().unwrap_or("");
        if g != group.name() {
            continue;
        }
        let delay: f64 = fields.nth(2).and_then(|v| v.parse().ok()).unwrap_or(0.0);
        total += 1;
        if delay > bound_s {
            late += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        late as f64 / total as f64
    }
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{DelayRecord, TtiRecord};

    #[test]
    fn csv_round_trip_of_delayed_fraction() {
        let mut m = MetricsLog::default();
        m.ttis.push(TtiRecord {
            tti: 1,
            dl_bits: 100,
            ul_bits: 0,
            n_scheduled: 1,
        });
        for (delay, delivered) in [(0.05, Some(3)), (0.15, Some(7)), (0.25, None)] {
            m.delays.push(DelayRecord {
                group: TrafficGroup::Voip,
                created_at: 1,
                delivered_at: delivered,
                delay_s: delay,
            });
        }
        let direct = m.delayed_fraction(TrafficGroup::Voip, 0.1);
        let via_csv = delayed_fraction_from_csv(&delay_csv(&m), TrafficGroup::Voip, 0.1);
        assert_eq!(direct, via_csv);
        assert!((direct - 2.0 / 3.0).abs() < 1e-12);
    }
}
