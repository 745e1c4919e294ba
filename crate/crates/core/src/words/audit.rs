use std::collections::HashMap;

use rand::seq::IndexedRandom;
use serde::Serialize;

use super::Word;
use crate::error::{Error, Result};
use crate::rng;

/// Result of checking whether `psi_l` vanishes on every `2^l`-tuple from a
/// word set.
#[derive(Clone, Debug, Serialize)]
pub struct TupleAudit {
    pub depth: u32,
    pub set_size: usize,
    /// Longest word in the set.
    pub radius: usize,
    pub vanishes: bool,
    pub violating_tuple: Option<Vec<Word>>,
    /// `|S| / L^(2l)`.
    pub ratio_to_power: f64,
    /// `5^(2l) 4^(l^2) L^(2l)`, the recursion's explicit factor (without the
    /// base case).
    pub recursion_factor: f64,
    /// True when tuples were sampled rather than covered exhaustively.
    pub sampled: bool,
}

const LEVEL_CAP: usize = 1 << 22;
const SAMPLE_BUDGET: usize = 200_000;

/// Decides whether `psi_l((s_w))` freely reduces to the identity for every
/// `2^l`-tuple over `set`.
///
/// The values of `psi_l` over all tuples are exactly the commutators of pairs
/// of values of `psi_{l-1}`, so the audit walks the value sets level by level
/// and keeps one witness tuple per distinct value. If a level grows past
/// `2^22` pairs the remaining check falls back to `seed`-driven sampling and
/// the report is flagged.
pub fn tuple_vanishing_audit(set: &[Word], depth: u32, seed: u64) -> Result<TupleAudit> {
    if depth > 4 {
        return Err(Error::InvalidParameter(format!(
            "commutator depth {depth} exceeds 4"
        )));
    }
    let radius = set.iter().map(Word::len).max().unwrap_or(0);
    let l = depth as i32;
    let radius_f = (radius.max(1)) as f64;
    let mut report = TupleAudit {
        depth,
        set_size: set.len(),
        radius,
        vanishes: true,
        violating_tuple: None,
        ratio_to_power: set.len() as f64 / radius_f.powi(2 * l),
        recursion_factor: 5f64.powi(2 * l) * 4f64.powi(l * l) * radius_f.powi(2 * l),
        sampled: false,
    };
    if set.is_empty() {
        return Ok(report);
    }

    // value -> one tuple producing it
    let mut level: HashMap<Word, Vec<Word>> = HashMap::new();
    for s in set {
        level.entry(s.clone()).or_insert_with(|| vec![s.clone()]);
    }
    for _ in 0..depth {
        let values: Vec<(&Word, &Vec<Word>)> = level.iter().collect();
        if values.len().saturating_mul(values.len()) > LEVEL_CAP {
            report.sampled = true;
            return Ok(sample_rest(report, set, depth, seed));
        }
        let mut next: HashMap<Word, Vec<Word>> = HashMap::new();
        for (x, tx) in &values {
            for (y, ty) in &values {
                let c = x.commutator(y);
                next.entry(c).or_insert_with(|| {
                    let mut t = (*tx).clone();
                    t.extend(ty.iter().cloned());
                    t
                });
            }
        }
        level = next;
    }
    let mut offenders: Vec<(&Word, &Vec<Word>)> =
        level.iter().filter(|(v, _)| !v.is_identity()).collect();
    offenders.sort();
    if let Some((_, tuple)) = offenders.first() {
        report.vanishes = false;
        report.violating_tuple = Some((*tuple).clone());
    }
    Ok(report)
}

fn sample_rest(mut report: TupleAudit, set: &[Word], depth: u32, seed: u64) -> TupleAudit {
    let mut rng = rng::stream(seed, "tuple-audit", depth as u64);
    let g = super::FreeGroup;
    let width = 1usize << depth;
    for _ in 0..SAMPLE_BUDGET {
        let tuple: Vec<Word> = (0..width)
            .map(|_| set.choose(&mut rng).expect("nonempty").clone())
            .collect();
        let v = super::psi(&g, depth, &tuple).expect("arity matches");
        if !v.is_identity() {
            report.vanishes = false;
            report.violating_tuple = Some(tuple);
            break;
        }
    }
    report
}
