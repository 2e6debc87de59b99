use serde_json::json;

use super::{ChunkResult, Engine, Family, Survivor};
use crate::algebra::{Fe, FiniteField};
use crate::elliptic::{cover_count, CoverSearch, CoverTask, EllipticFunction, EllipticPoint};
use crate::error::Result;

/// Double covers z^2 = f of an elliptic curve, one chunk per cover task.
///
/// Functions passing both tests are counted over the base field and kept
/// only when the cover is pointless.
pub struct DoubleCoverEngine {
    search: CoverSearch,
    reps: Vec<EllipticPoint>,
    tasks: Vec<CoverTask>,
}

impl DoubleCoverEngine {
    pub fn new(search: CoverSearch) -> Result<Self> {
        let reps = search.reps()?;
        let tasks = search.tasks()?;
        Ok(DoubleCoverEngine { search, reps, tasks })
    }

    pub fn search(&self) -> &CoverSearch {
        &self.search
    }
}

impl Engine for DoubleCoverEngine {
    fn family(&self) -> Family {
        Family::DoubleCovers
    }

    fn field(&self) -> &FiniteField {
        self.search.curve().base()
    }

    fn parameters(&self) -> serde_json::Value {
        json!({
            "curve": self.search.curve().to_string(),
            "genus": self.search.genus(),
            "torsion": self.search.torsion(),
            "reps": self.reps,
        })
    }

    fn chunk_count(&self) -> u64 {
        self.tasks.len() as u64
    }

    fn order_spec(&self) -> String {
        "chunk = (rep, leading kernel position, leading value, second value); rest odometer".into()
    }

    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult> {
        let e = self.search.curve();
        let part = self.search.run_task(&self.tasks[chunk as usize])?;
        let mut out = ChunkResult { examined: part.examined, ..Default::default() };
        *out.stats.entry("killed_test1".into()).or_default() += part.killed_test1;
        *out.stats.entry("killed_test2".into()).or_default() += part.killed_test2;
        for (rep, coeffs) in part.passed {
            out.bump("passed_tests");
            let f = EllipticFunction::new(self.search.k(), coeffs.clone())?;
            if cover_count(e, &f, 1)? != 0 {
                out.bump("not_pointless");
                continue;
            }
            let mut key = vec![rep as u64];
            key.extend(coeffs.iter().map(|c| c.0));
            out.keys.push(key);
            if first_only {
                break;
            }
        }
        Ok(out)
    }

    fn survivor(&self, key: &[u64]) -> Result<Survivor> {
        let coeffs: Vec<Fe> = key[1..].iter().map(|&c| Fe(c)).collect();
        let s = self.search.survivor(self.reps[key[0] as usize], &coeffs)?;
        if !s.pointless {
            return Err(crate::Error::InvalidCurve(format!("{} has rational points", s.function)));
        }
        Ok(Survivor {
            key: key.to_vec(),
            curve: s.function.clone(),
            kind: "double_cover".into(),
            genus: self.search.genus(),
            counts: s.counts.clone(),
            zeta: None,
            detail: json!({ "q_point": s.q_point, "shape": s.shape, "real_weil": s.real_weil }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run, SearchConfig};
    use super::*;
    use crate::elliptic::{EllipticCurve, TorsionRule};

    #[test]
    fn f25_twenty_point_curve() {
        let k = FiniteField::new(5, 2, Some(&[2, 4, 1])).unwrap();
        let e = EllipticCurve::new(&k, Fe::ZERO, k.from_int(2), Fe::ZERO).unwrap();
        let search = CoverSearch::new(e, 3, TorsionRule::ExcludeWithFallback).unwrap().with_depth(3);
        let r = run(&DoubleCoverEngine::new(search).unwrap(), &SearchConfig::census()).unwrap();
        assert_eq!(r.survivors.len(), 1);
        assert_eq!(r.survivors[0].counts, vec![0, 540, 15360]);
    }
}
