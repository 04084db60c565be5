//! Kripke semantics for S5: model evaluation, sequent satisfaction and a
//! brute-force validity oracle with countermodels.
//!
//! For S5 validity it suffices to range over models whose accessibility is
//! universal (one equivalence class): restricting any falsifying S5 model
//! to the equivalence class of the falsifying world gives such a model.
//! Worlds are identified with their valuations, so the oracle enumerates
//! nonempty sets of valuations over the atoms of the formula, up to one
//! world per distinct modal subformula plus one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::Proof;
use crate::formula::Formula;
use crate::hypersequent::RootedHypersequent;

/// A finite S5 model: a nonempty world set with a valuation per world.
/// Accessibility is implicitly universal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    worlds: Vec<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("model must have at least one world")]
    EmptyModel,
    #[error("world index {0} out of range")]
    UnknownWorld(usize),
    #[error("enumeration too large: {atoms} atoms with world bound {bound}")]
    ResourceGuard { atoms: usize, bound: usize },
}

impl KripkeModel {
    pub fn new(worlds: Vec<BTreeSet<String>>) -> Result<KripkeModel, SemanticsError> {
        if worlds.is_empty() {
            return Err(SemanticsError::EmptyModel);
        }
        Ok(KripkeModel { worlds })
    }

    pub fn worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn valuation(&self, w: usize) -> Result<&BTreeSet<String>, SemanticsError> {
        self.worlds.get(w).ok_or(SemanticsError::UnknownWorld(w))
    }
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.worlds.iter().enumerate() {
            let atoms: Vec<&str> = v.iter().map(String::as_str).collect();
            writeln!(f, "  w{i}: {{{}}}", atoms.join(", "))?;
        }
        Ok(())
    }
}

/// The satisfaction relation at a world of the model.
pub fn eval(m: &KripkeModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
    m.valuation(w)?;
    Ok(eval_unchecked(m, w, f))
}

fn eval_unchecked(m: &KripkeModel, w: usize, f: &Formula) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Top => true,
        Formula::Atom(p) => m.worlds[w].contains(p),
        Formula::Neg(a) => !eval_unchecked(m, w, a),
        Formula::And(a, b) => eval_unchecked(m, w, a) && eval_unchecked(m, w, b),
        Formula::Or(a, b) => eval_unchecked(m, w, a) || eval_unchecked(m, w, b),
        Formula::Imp(a, b) => !eval_unchecked(m, w, a) || eval_unchecked(m, w, b),
        Formula::Dia(a) => (0..m.worlds.len()).any(|v| eval_unchecked(m, v, a)),
        Formula::Box(a) => (0..m.worlds.len()).all(|v| eval_unchecked(m, v, a)),
    }
}

/// Satisfaction of a rooted hypersequent via its formula interpretation.
pub fn eval_sequent(
    m: &KripkeModel,
    w: usize,
    s: &RootedHypersequent,
) -> Result<bool, SemanticsError> {
    eval(m, w, &s.interpretation())
}

/// Oracle verdict: either valid in every model within the finite bound, or
/// a falsifying model and world. The countermodel is re-evaluated on
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Valid,
    Countermodel { model: KripkeModel, world: usize },
}

impl OracleVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, OracleVerdict::Valid)
    }
}

/// Machine-readable countermodel record emitted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountermodelRecord {
    pub formula: String,
    pub worlds: Vec<Vec<String>>,
    pub world: usize,
    pub subformula_truth: Vec<(String, Vec<bool>)>,
}

impl CountermodelRecord {
    pub fn new(f: &Formula, model: &KripkeModel, world: usize) -> CountermodelRecord {
        let subformula_truth = f
            .subformulas()
            .into_iter()
            .map(|sub| {
                let row = (0..model.worlds())
                    .map(|w| eval_unchecked(model, w, &sub))
                    .collect();
                (sub.to_string(), row)
            })
            .collect();
        CountermodelRecord {
            formula: f.to_string(),
            worlds: model
                .worlds
                .iter()
                .map(|v| v.iter().cloned().collect())
                .collect(),
            world,
            subformula_truth,
        }
    }
}

impl fmt::Display for CountermodelRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "countermodel for {} at world w{}", self.formula, self.world)?;
        for (i, v) in self.worlds.iter().enumerate() {
            writeln!(f, "  w{i}: {{{}}}", v.join(", "))?;
        }
        writeln!(f, "  truth table (worlds left to right):")?;
        for (sub, row) in &self.subformula_truth {
            let bits: Vec<&str> = row.iter().map(|b| if *b { "1" } else { "0" }).collect();
            writeln!(f, "    {:<30} {}", sub, bits.join(" "))?;
        }
        Ok(())
    }
}

/// Upper bound on the valuation-set enumeration; beyond this the oracle
/// refuses rather than grind.
const ENUMERATION_CEILING: usize = 2_000_000;

/// Brute-force S5 validity over universal-relation models with at most
/// `(#distinct modal subformulas of f) + 1` worlds, valuations ranging
/// over the atoms of `f`. Countermodels are world-minimal among those the
/// enumeration can see.
pub fn oracle_validity(f: &Formula) -> Result<OracleVerdict, SemanticsError> {
    let atoms: Vec<String> = f.atom_names().into_iter().collect();
    let modal_count = f
        .subformulas()
        .iter()
        .filter(|g| g.is_modal())
        .count();
    let bound = modal_count + 1;
    let valuations: usize = 1usize
        .checked_shl(atoms.len() as u32)
        .ok_or(SemanticsError::ResourceGuard {
            atoms: atoms.len(),
            bound,
        })?;
    let bound = bound.min(valuations);
    // rough count of candidate world sets
    let mut estimate: usize = 0;
    for k in 1..=bound {
        estimate = estimate.saturating_add(binomial(valuations, k));
        if estimate > ENUMERATION_CEILING {
            return Err(SemanticsError::ResourceGuard {
                atoms: atoms.len(),
                bound,
            });
        }
    }

    let all_valuations: Vec<BTreeSet<String>> = (0..valuations)
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect();

    // sizes ascending, so the first hit is world-minimal
    for k in 1..=bound {
        let mut chosen = Vec::with_capacity(k);
        if let Some(v) =
            search_subsets(&all_valuations, 0, k, &mut chosen, &mut |worlds| {
                let m = KripkeModel {
                    worlds: worlds.to_vec(),
                };
                (0..k).find(|&w| !eval_unchecked(&m, w, f)).map(|w| (m, w))
            })
        {
            return Ok(OracleVerdict::Countermodel {
                model: v.0,
                world: v.1,
            });
        }
    }
    Ok(OracleVerdict::Valid)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn search_subsets<T: Clone, R>(
    pool: &[T],
    start: usize,
    k: usize,
    chosen: &mut Vec<T>,
    f: &mut impl FnMut(&[T]) -> Option<R>,
) -> Option<R> {
    if k == 0 {
        return f(chosen);
    }
    for i in start..pool.len() {
        chosen.push(pool[i].clone());
        if let Some(r) = search_subsets(pool, i + 1, k - 1, chosen, f) {
            chosen.pop();
            return Some(r);
        }
        chosen.pop();
    }
    None
}

/// Validity oracle with a per-formula memo, for bulk runs.
#[derive(Default)]
pub struct OracleCache {
    memo: HashMap<Formula, bool>,
}

impl OracleCache {
    pub fn new() -> OracleCache {
        OracleCache::default()
    }

    pub fn is_valid(&mut self, f: &Formula) -> Result<bool, SemanticsError> {
        if let Some(v) = self.memo.get(f) {
            return Ok(*v);
        }
        let v = oracle_validity(f)?.is_valid();
        self.memo.insert(f.clone(), v);
        Ok(v)
    }
}

/// Where a soundness check failed, as a child-index path from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoundnessVerdict {
    Ok,
    Failing(Vec<usize>),
}

/// Checks that the interpretation of every node of the proof is valid per
/// the oracle. A failure indicates a bug in the calculus or the oracle.
pub fn check_soundness(pf: &Proof) -> Result<SoundnessVerdict, SemanticsError> {
    let mut cache = OracleCache::new();
    check_soundness_cached(pf, &mut cache)
}

pub fn check_soundness_cached(
    pf: &Proof,
    cache: &mut OracleCache,
) -> Result<SoundnessVerdict, SemanticsError> {
    let mut stack = vec![(pf, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        if !cache.is_valid(&node.conclusion.interpretation())? {
            return Ok(SoundnessVerdict::Failing(path));
        }
        for (i, child) in node.premises.iter().enumerate() {
            let mut p = path.clone();
            p.push(i);
            stack.push((child, p));
        }
    }
    Ok(SoundnessVerdict::Ok)
}
