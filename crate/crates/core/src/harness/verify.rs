use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::fixtures::FixtureEntry;
use crate::curves::{Curve, COUNT_LIMIT};
use crate::zeta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub kind: String,
    pub q: u64,
    pub curve: Option<String>,
    pub claimed_genus: u32,
    pub computed_genus: Option<u32>,
    /// Present for plane quartics.
    pub smooth: Option<bool>,
    /// N_1, N_2, ... as computed.
    pub counts: Vec<u64>,
    pub real_weil: Option<String>,
    pub verdict: Verdict,
    pub failures: Vec<String>,
    pub time_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub version: String,
    pub depth: u32,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<EntryReport>,
    pub exit_status: i32,
}

/// Rebuilds every entry, recounts it over F_{q^i} for i <= depth and
/// compares with its claims. Entries are checked in parallel; the report
/// keeps input order.
pub fn verify(entries: &[FixtureEntry], depth: u32) -> VerificationReport {
    let depth = depth.max(1);
    let reports: Vec<EntryReport> = entries.par_iter().map(|e| verify_entry(e, depth)).collect();
    let passed = reports.iter().filter(|r| r.verdict == Verdict::Pass).count();
    VerificationReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        depth,
        total: reports.len(),
        passed,
        failed: reports.len() - passed,
        exit_status: i32::from(passed != reports.len()),
        entries: reports,
    }
}

fn verify_entry(entry: &FixtureEntry, depth: u32) -> EntryReport {
    let start = Instant::now();
    let q = entry.p.checked_pow(entry.n as u32).unwrap_or(u64::MAX);
    let mut report = EntryReport {
        id: entry.id.clone(),
        kind: format!("{:?}", entry.kind),
        q,
        curve: None,
        claimed_genus: entry.genus,
        computed_genus: None,
        smooth: None,
        counts: Vec::new(),
        real_weil: None,
        verdict: Verdict::Fail,
        failures: Vec::new(),
        time_ms: 0,
    };
    if let Err(e) = check(entry, depth, &mut report) {
        report.failures.push(e.to_string());
    }
    if report.failures.is_empty() {
        report.verdict = Verdict::Pass;
    }
    report.time_ms = start.elapsed().as_millis();
    report
}

fn check(entry: &FixtureEntry, depth: u32, report: &mut EntryReport) -> crate::Result<()> {
    let curve = entry.curve()?;
    report.curve = Some(curve.describe());
    let genus = curve.genus()?;
    report.computed_genus = Some(genus);
    if genus != entry.genus {
        report.failures.push(format!("genus {genus}, claimed {}", entry.genus));
    }
    if let Curve::Quartic(c) = &curve {
        let smooth = c.is_smooth()?;
        report.smooth = Some(smooth);
        if !smooth {
            report.failures.push("quartic is singular".into());
        }
    }
    let q = curve.base().q();
    for i in 1..=depth {
        match (q as u128).checked_pow(i) {
            Some(size) if size <= COUNT_LIMIT as u128 => report.counts.push(curve.count(i)?),
            _ => break,
        }
    }
    let n1 = report.counts[0];
    if entry.pointless != (n1 == 0) {
        report.failures.push(format!("N_1 = {n1}, claimed pointless = {}", entry.pointless));
    }
    if let Some(claimed) = &entry.counts {
        for (i, (&got, &want)) in report.counts.iter().zip(claimed).enumerate() {
            if got != want {
                report.failures.push(format!("N_{} = {got}, claimed {want}", i + 1));
            }
        }
    }
    if report.counts.len() >= genus as usize {
        let g = genus as usize;
        let h = zeta::l_from_counts(q, g, &report.counts[..g]).and_then(|l| zeta::real_weil_from_l(&l, q, g))?;
        if !zeta::validate_weil(&h, q) {
            report.failures.push("counts do not give a Weil polynomial".into());
        }
        let shown = zeta::format_factored(&h);
        if let Some(claimed) = &entry.real_weil {
            if &shown != claimed {
                report.failures.push(format!("real Weil polynomial {shown}, claimed {claimed}"));
            }
        }
        report.real_weil = Some(shown);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{parse_fixtures, TABLES};
    use super::*;

    #[test]
    fn shipped_tables_verify() {
        let entries = parse_fixtures(TABLES).unwrap();
        assert_eq!(entries.len(), 65);
        let r = verify(&entries, 1);
        let failed: Vec<_> = r.entries.iter().filter(|e| e.verdict == Verdict::Fail).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(r.exit_status, 0);
    }

    #[test]
    fn false_pointless_claim_fails() {
        let text = "[[curve]]\nid = \"e27\"\ntable = \"t\"\np = 3\nn = 3\ndefining_poly = \"a^3 - a + 1\"\n\
                    kind = \"hyperelliptic\"\nf = \"x^3 + 2x^2 + 1\"\ngenus = 1\npointless = true\n";
        let r = verify(&parse_fixtures(text).unwrap(), 1);
        assert_eq!(r.entries[0].counts, vec![20]);
        assert_eq!(r.entries[0].verdict, Verdict::Fail);
        assert_eq!(r.exit_status, 1);
    }
}
