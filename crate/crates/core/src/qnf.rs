//! Quasi-normal forms: conjunctive/disjunctive normal forms whose literals
//! are atoms, modal formulas, and their negations. Modal subformulas are
//! opaque: conversion never rewrites below a `[]` or `<>`.
//!
//! Conversion pushes negations down to quasi-literals (stopping at the
//! modalities), eliminates implications, and distributes, with constants
//! propagated on the way: a quasi-tautologous CQNF comes out as the empty
//! clause list, and dually an unsatisfiable DQNF — degenerate cases the
//! callers of the normal-form lemmas must treat as `k = 0`.

use std::collections::BTreeSet;
use std::fmt;

use crate::formula::{Formula, FormulaClass};
use crate::hypersequent::FMultiset;

/// Sequent-oriented clause: the premise sequent of the normal-form lemmas
/// gains `la`/`lm` on the left and `ra`/`rm` on the right. Multisets, so
/// the transformation machinery stays height-exact; the public
/// [`QuasiClause`] collapses duplicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SeqClause {
    pub la: FMultiset,
    pub ra: FMultiset,
    pub lm: FMultiset,
    pub rm: FMultiset,
}

impl SeqClause {
    fn literal(f: &Formula, side: Side) -> SeqClause {
        let mut c = SeqClause::default();
        match (side, f.classify()) {
            (Side::Left, FormulaClass::Atomic) => c.la.insert(f.clone()),
            (Side::Right, FormulaClass::Atomic) => c.ra.insert(f.clone()),
            (Side::Left, FormulaClass::Modal) => c.lm.insert(f.clone()),
            (Side::Right, FormulaClass::Modal) => c.rm.insert(f.clone()),
            _ => panic!("not a quasi-literal: {f}"),
        }
        c
    }

    pub fn union(&self, other: &SeqClause) -> SeqClause {
        SeqClause {
            la: self.la.union(&other.la),
            ra: self.ra.union(&other.ra),
            lm: self.lm.union(&other.lm),
            rm: self.rm.union(&other.rm),
        }
    }

    pub fn left(&self) -> FMultiset {
        self.la.union(&self.lm)
    }

    pub fn right(&self) -> FMultiset {
        self.ra.union(&self.rm)
    }
}

/// Which side of a sequent the formula being decomposed sits on. `Right`
/// decomposition yields the CQNF clause contexts, `Left` the DQNF phrase
/// contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

fn pairwise(xs: &[SeqClause], ys: &[SeqClause]) -> Vec<SeqClause> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in xs {
        for y in ys {
            out.push(x.union(y));
        }
    }
    out
}

/// Clause contexts of `f` decomposed on `side`. The clause list mirrors
/// the backward propositional decomposition of `f` exactly, which is what
/// lets the proof transformations invert to and rebuild from these
/// clauses.
pub fn decompose(f: &Formula, side: Side) -> Vec<SeqClause> {
    match (f, side) {
        (Formula::Top, Side::Right) | (Formula::Bottom, Side::Left) => Vec::new(),
        (Formula::Bottom, Side::Right) | (Formula::Top, Side::Left) => {
            vec![SeqClause::default()]
        }
        (Formula::Atom(_), _) | (Formula::Dia(_), _) | (Formula::Box(_), _) => {
            vec![SeqClause::literal(f, side)]
        }
        (Formula::Neg(a), _) => decompose(a, side.flip()),
        (Formula::And(a, b), Side::Right) | (Formula::Or(a, b), Side::Left) => {
            let mut out = decompose(a, side);
            out.extend(decompose(b, side));
            out
        }
        (Formula::And(a, b), Side::Left) | (Formula::Or(a, b), Side::Right) => {
            pairwise(&decompose(a, side), &decompose(b, side))
        }
        (Formula::Imp(a, b), Side::Right) => {
            pairwise(&decompose(a, Side::Left), &decompose(b, Side::Right))
        }
        (Formula::Imp(a, b), Side::Left) => {
            let mut out = decompose(a, Side::Right);
            out.extend(decompose(b, Side::Left));
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Public normal-form types

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Pos,
    Neg,
}

/// An atom or modal formula, possibly negated, treated as an indivisible
/// propositional unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuasiLiteral {
    pub polarity: Polarity,
    pub core: Formula,
}

impl QuasiLiteral {
    pub fn new(polarity: Polarity, core: Formula) -> QuasiLiteral {
        debug_assert!(
            matches!(core.classify(), FormulaClass::Atomic | FormulaClass::Modal),
            "quasi-literal core must be atomic or modal: {core}"
        );
        QuasiLiteral { polarity, core }
    }

    pub fn formula(&self) -> Formula {
        match self.polarity {
            Polarity::Pos => self.core.clone(),
            Polarity::Neg => Formula::neg(self.core.clone()),
        }
    }
}

impl fmt::Display for QuasiLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseKind {
    Conjunctive,
    Disjunctive,
}

/// A quasi-clause: literals joined disjunctively (CQNF clauses) or
/// conjunctively (DQNF clauses). Duplicates are collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiClause {
    pub literals: BTreeSet<QuasiLiteral>,
    pub kind: ClauseKind,
}

/// Per-clause canonical partition: positive atoms `P`, negated atoms `Q`,
/// positive modals `M`, negated modals `N`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClausePartition {
    pub pos_atoms: BTreeSet<Formula>,
    pub neg_atoms: BTreeSet<Formula>,
    pub pos_modals: BTreeSet<Formula>,
    pub neg_modals: BTreeSet<Formula>,
}

impl QuasiClause {
    pub fn partition(&self) -> ClausePartition {
        let mut p = ClausePartition::default();
        for lit in &self.literals {
            let bucket = match (lit.polarity, lit.core.classify()) {
                (Polarity::Pos, FormulaClass::Atomic) => &mut p.pos_atoms,
                (Polarity::Neg, FormulaClass::Atomic) => &mut p.neg_atoms,
                (Polarity::Pos, FormulaClass::Modal) => &mut p.pos_modals,
                (Polarity::Neg, FormulaClass::Modal) => &mut p.neg_modals,
                _ => unreachable!("invalid quasi-literal"),
            };
            bucket.insert(lit.core.clone());
        }
        p
    }

    pub fn formula(&self) -> Formula {
        let mut it = self.literals.iter().map(QuasiLiteral::formula);
        let join: fn(Formula, Formula) -> Formula = match self.kind {
            ClauseKind::Disjunctive => Formula::or,
            ClauseKind::Conjunctive => Formula::and,
        };
        match it.next() {
            None => match self.kind {
                ClauseKind::Disjunctive => Formula::Bottom,
                ClauseKind::Conjunctive => Formula::Top,
            },
            Some(first) => it.fold(first, join),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QnfKind {
    Cqnf,
    Dqnf,
}

/// A formula in conjunctive or disjunctive quasi-normal form. An empty
/// CQNF clause list is the degenerate quasi-tautology; an empty DQNF is
/// quasi-unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiNormalForm {
    pub kind: QnfKind,
    pub clauses: Vec<QuasiClause>,
}

impl QuasiNormalForm {
    /// True in every (resp. no) quasi-literal assignment by shape alone.
    pub fn is_degenerate(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn formula(&self) -> Formula {
        let mut it = self.clauses.iter().map(QuasiClause::formula);
        match self.kind {
            QnfKind::Cqnf => match it.next() {
                None => Formula::Top,
                Some(first) => it.fold(first, Formula::and),
            },
            QnfKind::Dqnf => match it.next() {
                None => Formula::Bottom,
                Some(first) => it.fold(first, Formula::or),
            },
        }
    }
}

impl fmt::Display for QuasiNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula())
    }
}

fn clause_from_seq(c: &SeqClause, kind: QnfKind) -> QuasiClause {
    // On the right (CQNF) antecedent material is negated; on the left
    // (DQNF) succedent material is.
    let (neg_sides, pos_sides, ck) = match kind {
        QnfKind::Cqnf => (
            [&c.la, &c.lm],
            [&c.ra, &c.rm],
            ClauseKind::Disjunctive,
        ),
        QnfKind::Dqnf => (
            [&c.ra, &c.rm],
            [&c.la, &c.lm],
            ClauseKind::Conjunctive,
        ),
    };
    let mut literals = BTreeSet::new();
    for side in neg_sides {
        for f in side.distinct() {
            literals.insert(QuasiLiteral::new(Polarity::Neg, f.clone()));
        }
    }
    for side in pos_sides {
        for f in side.distinct() {
            literals.insert(QuasiLiteral::new(Polarity::Pos, f.clone()));
        }
    }
    QuasiClause {
        literals,
        kind: ck,
    }
}

/// Conjunctive quasi-normal form of `f`, equivalent to `f` over all
/// boolean assignments to its quasi-literals.
pub fn to_cqnf(f: &Formula) -> QuasiNormalForm {
    QuasiNormalForm {
        kind: QnfKind::Cqnf,
        clauses: decompose(f, Side::Right)
            .iter()
            .map(|c| clause_from_seq(c, QnfKind::Cqnf))
            .collect(),
    }
}

/// Disjunctive quasi-normal form of `f`.
pub fn to_dqnf(f: &Formula) -> QuasiNormalForm {
    QuasiNormalForm {
        kind: QnfKind::Dqnf,
        clauses: decompose(f, Side::Left)
            .iter()
            .map(|c| clause_from_seq(c, QnfKind::Dqnf))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Quasi-propositional equivalence

fn quasi_cores(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f.classify() {
        FormulaClass::Atomic | FormulaClass::Modal => {
            out.insert(f.clone());
        }
        FormulaClass::Constant => {}
        FormulaClass::Compound => match f {
            Formula::Neg(a) => quasi_cores(a, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                quasi_cores(a, out);
                quasi_cores(b, out);
            }
            _ => unreachable!(),
        },
    }
}

fn eval_quasi(f: &Formula, assignment: &dyn Fn(&Formula) -> bool) -> bool {
    match f.classify() {
        FormulaClass::Atomic | FormulaClass::Modal => assignment(f),
        _ => match f {
            Formula::Bottom => false,
            Formula::Top => true,
            Formula::Neg(a) => !eval_quasi(a, assignment),
            Formula::And(a, b) => eval_quasi(a, assignment) && eval_quasi(b, assignment),
            Formula::Or(a, b) => eval_quasi(a, assignment) || eval_quasi(b, assignment),
            Formula::Imp(a, b) => !eval_quasi(a, assignment) || eval_quasi(b, assignment),
            _ => unreachable!(),
        },
    }
}

/// Do `f` and the formula reading of `n` agree under every boolean
/// assignment to their quasi-literals (each distinct atomic or modal core
/// an independent variable)?
pub fn qnf_equivalent(f: &Formula, n: &QuasiNormalForm) -> bool {
    quasi_tt_equivalent(f, &n.formula())
}

/// Truth-table equivalence at the quasi-literal level.
pub fn quasi_tt_equivalent(f: &Formula, g: &Formula) -> bool {
    let mut cores = BTreeSet::new();
    quasi_cores(f, &mut cores);
    quasi_cores(g, &mut cores);
    let cores: Vec<Formula> = cores.into_iter().collect();
    let n = cores.len();
    assert!(n < usize::BITS as usize, "too many quasi-literals");
    for mask in 0u64..(1u64 << n) {
        let assignment = |x: &Formula| {
            let i = cores.iter().position(|c| c == x).unwrap();
            mask & (1 << i) != 0
        };
        if eval_quasi(f, &assignment) != eval_quasi(g, &assignment) {
            return false;
        }
    }
    true
}

/// Is `f` true under every boolean assignment to its quasi-literals?
pub fn quasi_tautology(f: &Formula) -> bool {
    quasi_tt_equivalent(f, &Formula::Top)
}
