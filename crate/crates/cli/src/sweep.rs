//! Classification over a rectangular parameter grid.

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use ssys_core::{classify, classify_s_system, Classification, Verdict};

use crate::input::{Model, Reduced};
use crate::UsageError;

/// Largest grid accepted by a sweep.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// `NAME=START:STOP:N`, `N` equally spaced values including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Range {
    pub fn parse(s: &str) -> Result<Range> {
        let bad = || UsageError(format!("invalid range {s:?}: expected NAME=START:STOP:N"));
        let (name, spec) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, n] = parts[..] else { bail!(bad()) };
        let range = Range {
            name: name.trim().to_string(),
            start: start.trim().parse().map_err(|_| bad())?,
            stop: stop.trim().parse().map_err(|_| bad())?,
            n: n.trim().parse().map_err(|_| bad())?,
        };
        if range.name.is_empty() || !range.start.is_finite() || !range.stop.is_finite() {
            bail!(bad());
        }
        Ok(range)
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.n <= 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.n - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub index: usize,
    pub point: serde_json::Map<String, serde_json::Value>,
    #[serde(flatten)]
    pub classification: Classification,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub points: usize,
    pub permanent: usize,
    pub not_permanent: usize,
    pub undetermined: usize,
    pub degenerate: usize,
}

impl Summary {
    fn add(&mut self, v: Verdict) {
        self.points += 1;
        match v {
            Verdict::Permanent => self.permanent += 1,
            Verdict::NotPermanent => self.not_permanent += 1,
            Verdict::Undetermined => self.undetermined += 1,
            Verdict::Degenerate => self.degenerate += 1,
        }
    }
}

fn classify_model(model: &Model) -> Result<Classification> {
    Ok(match model.reduce()? {
        Reduced::Params(p) => classify(&p)?,
        Reduced::NoEquilibrium => match model {
            Model::SSystem(spec, _) => classify_s_system(spec)?,
            _ => unreachable!("only S-systems can lack an equilibrium"),
        },
    })
}

/// Rows in grid order (last range varies fastest) and the verdict counts.
pub fn run(template: &Model, ranges: &[Range]) -> Result<(Vec<Row>, Summary)> {
    let total = ranges
        .iter()
        .try_fold(1usize, |acc, r| acc.checked_mul(r.n))
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| UsageError(format!("grid larger than {MAX_GRID_POINTS} points")))?;
    if ranges.is_empty() {
        bail!(UsageError("a sweep needs at least one --param range".into()));
    }
    // validate names once
    let mut probe = template.clone();
    for r in ranges {
        probe.set(&r.name, r.start)?;
    }
    let rows: Vec<Result<Row>> = (0..total)
        .into_par_iter()
        .map(|index| {
            let mut model = template.clone();
            let mut point = serde_json::Map::new();
            let mut rest = index;
            let mut coords = vec![0usize; ranges.len()];
            for (slot, r) in coords.iter_mut().zip(ranges).rev() {
                *slot = rest % r.n;
                rest /= r.n;
            }
            for (r, &i) in ranges.iter().zip(&coords) {
                let v = r.value(i);
                model.set(&r.name, v)?;
                point.insert(r.name.clone(), serde_json::Value::from(v));
            }
            Ok(Row {
                index,
                point,
                classification: classify_model(&model)?,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut summary = Summary::default();
    for row in &rows {
        summary.add(row.classification.verdict);
    }
    Ok((rows, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_and_include_both_ends() {
        let r = Range::parse("alpha=-1:3:5").unwrap();
        assert_eq!((r.name.as_str(), r.n), ("alpha", 5));
        assert_eq!((r.value(0), r.value(4)), (-1.0, 3.0));
        assert_eq!(Range::parse("beta=2:9:1").unwrap().value(0), 2.0);
        for bad in ["alpha", "alpha=1:2", "=1:2:3", "a=x:1:2", "a=1:2:-1"] {
            assert!(Range::parse(bad).is_err(), "{bad}");
        }
    }
}
