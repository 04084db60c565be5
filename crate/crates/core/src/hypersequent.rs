//! Rooted hypersequents as data: formula multisets, crown components, the
//! root/crown structure, the single-formula interpretation, and the
//! set-projection used for loop checking.
//!
//! A rooted hypersequent `Γ => Δ || P1 => Q1 | ... | Pn => Qn` has a root
//! of arbitrary formulas and a crown whose components hold atomic formulas
//! only. The crown is kept in insertion order for stable printing, but
//! equality treats it as a multiset of components.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::formula::{parse_imp, Formula, ParseError, Tok, TokStream};

/// A finite multiset of formulas. Iteration is in the canonical formula
/// order; equality respects multiplicities and ignores insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FMultiset(BTreeMap<Formula, usize>);

impl FMultiset {
    pub fn new() -> FMultiset {
        FMultiset::default()
    }

    pub fn singleton(f: Formula) -> FMultiset {
        let mut m = FMultiset::new();
        m.insert(f);
        m
    }

    pub fn insert(&mut self, f: Formula) {
        *self.0.entry(f).or_insert(0) += 1;
    }

    pub fn insert_n(&mut self, f: Formula, n: usize) {
        if n > 0 {
            *self.0.entry(f).or_insert(0) += n;
        }
    }

    /// Removes one occurrence; returns false if `f` is absent.
    pub fn remove_one(&mut self, f: &Formula) -> bool {
        match self.0.get_mut(f) {
            Some(n) if *n > 1 => {
                *n -= 1;
                true
            }
            Some(_) => {
                self.0.remove(f);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains_key(f)
    }

    pub fn count(&self, f: &Formula) -> usize {
        self.0.get(f).copied().unwrap_or(0)
    }

    /// Total number of occurrences.
    pub fn len(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct formulas with their multiplicities, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Formula, usize)> {
        self.0.iter().map(|(f, n)| (f, *n))
    }

    /// Every occurrence, with repetitions, in canonical order.
    pub fn occurrences(&self) -> impl Iterator<Item = &Formula> {
        self.0
            .iter()
            .flat_map(|(f, n)| std::iter::repeat(f).take(*n))
    }

    pub fn distinct(&self) -> impl Iterator<Item = &Formula> {
        self.0.keys()
    }

    pub fn union(&self, other: &FMultiset) -> FMultiset {
        let mut out = self.clone();
        for (f, n) in other.iter() {
            out.insert_n(f.clone(), n);
        }
        out
    }

    pub fn without(&self, f: &Formula) -> Option<FMultiset> {
        let mut out = self.clone();
        if out.remove_one(f) {
            Some(out)
        } else {
            None
        }
    }

    /// Is `self` a sub-multiset of `other`?
    pub fn subset_of(&self, other: &FMultiset) -> bool {
        self.iter().all(|(f, n)| other.count(f) >= n)
    }

    /// Multiplicity collapsed to one everywhere.
    pub fn support(&self) -> FMultiset {
        FMultiset(self.0.keys().map(|f| (f.clone(), 1)).collect())
    }

    pub fn all_atomic(&self) -> bool {
        self.0.keys().all(Formula::is_atomic)
    }
}

impl FromIterator<Formula> for FMultiset {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> FMultiset {
        let mut m = FMultiset::new();
        for f in iter {
            m.insert(f);
        }
        m
    }
}

fn fmt_multiset(m: &FMultiset, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for g in m.occurrences() {
        if !first {
            write!(f, ", ")?;
        }
        first = false;
        write!(f, "{g}")?;
    }
    Ok(())
}

/// One crown component `P => Q`; both sides hold atomic formulas only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CrownComponent {
    ante: FMultiset,
    succ: FMultiset,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("non-atomic formula in crown: `{0}`")]
    NonAtomicCrown(Formula),
}

impl CrownComponent {
    pub fn new(ante: FMultiset, succ: FMultiset) -> Result<CrownComponent, SequentError> {
        for side in [&ante, &succ] {
            if let Some(bad) = side.distinct().find(|f| !f.is_atomic()) {
                return Err(SequentError::NonAtomicCrown(bad.clone()));
            }
        }
        Ok(CrownComponent { ante, succ })
    }

    pub fn empty() -> CrownComponent {
        CrownComponent::default()
    }

    pub fn ante(&self) -> &FMultiset {
        &self.ante
    }

    pub fn succ(&self) -> &FMultiset {
        &self.succ
    }

    pub fn is_empty(&self) -> bool {
        self.ante.is_empty() && self.succ.is_empty()
    }

    /// Componentwise union, used by the merge transformations.
    pub fn merge(&self, other: &CrownComponent) -> CrownComponent {
        CrownComponent {
            ante: self.ante.union(&other.ante),
            succ: self.succ.union(&other.succ),
        }
    }
}

impl fmt::Display for CrownComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_multiset(&self.ante, f)?;
        if self.ante.is_empty() {
            write!(f, "=>")?;
        } else {
            write!(f, " =>")?;
        }
        if !self.succ.is_empty() {
            write!(f, " ")?;
            fmt_multiset(&self.succ, f)?;
        }
        Ok(())
    }
}

/// Root split: the storage rules require every root formula to be modal
/// or atomic, and the atomic part is what moves into the crown.
#[derive(Debug, Clone, Default)]
pub struct RootPartition {
    pub modal_ante: FMultiset,
    pub atom_ante: FMultiset,
    pub atom_succ: FMultiset,
    pub modal_succ: FMultiset,
}

impl RootPartition {
    pub fn storage_component(&self) -> CrownComponent {
        CrownComponent::new(self.atom_ante.clone(), self.atom_succ.clone())
            .expect("partition atoms are atomic")
    }
}

/// A rooted hypersequent: root antecedent and succedent multisets plus a
/// crown of atomic components. Equality is invariant under crown
/// permutation.
#[derive(Debug, Clone)]
pub struct RootedHypersequent {
    ante: FMultiset,
    succ: FMultiset,
    crown: Vec<CrownComponent>,
}

impl PartialEq for RootedHypersequent {
    fn eq(&self, other: &RootedHypersequent) -> bool {
        self.ante == other.ante && self.succ == other.succ && {
            let mut a = self.crown.clone();
            let mut b = other.crown.clone();
            a.sort();
            b.sort();
            a == b
        }
    }
}

impl Eq for RootedHypersequent {}

impl Hash for RootedHypersequent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ante.hash(state);
        self.succ.hash(state);
        let mut crown = self.crown.clone();
        crown.sort();
        crown.hash(state);
    }
}

impl PartialOrd for RootedHypersequent {
    fn partial_cmp(&self, other: &RootedHypersequent) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootedHypersequent {
    fn cmp(&self, other: &RootedHypersequent) -> Ordering {
        let mut a = self.crown.clone();
        let mut b = other.crown.clone();
        a.sort();
        b.sort();
        (&self.ante, &self.succ, a).cmp(&(&other.ante, &other.succ, b))
    }
}

impl RootedHypersequent {
    pub fn new(
        ante: FMultiset,
        succ: FMultiset,
        crown: Vec<CrownComponent>,
    ) -> RootedHypersequent {
        RootedHypersequent { ante, succ, crown }
    }

    /// A crownless root `Γ => Δ`.
    pub fn root(ante: FMultiset, succ: FMultiset) -> RootedHypersequent {
        RootedHypersequent::new(ante, succ, Vec::new())
    }

    /// `=> f` with empty crown.
    pub fn goal(f: Formula) -> RootedHypersequent {
        RootedHypersequent::root(FMultiset::new(), FMultiset::singleton(f))
    }

    pub fn ante(&self) -> &FMultiset {
        &self.ante
    }

    pub fn succ(&self) -> &FMultiset {
        &self.succ
    }

    pub fn crown(&self) -> &[CrownComponent] {
        &self.crown
    }

    pub fn map_root(
        &self,
        f: impl FnOnce(&mut FMultiset, &mut FMultiset),
    ) -> RootedHypersequent {
        let mut s = self.clone();
        f(&mut s.ante, &mut s.succ);
        s
    }

    pub fn with_crown(&self, crown: Vec<CrownComponent>) -> RootedHypersequent {
        RootedHypersequent::new(self.ante.clone(), self.succ.clone(), crown)
    }

    pub fn push_component(&self, c: CrownComponent) -> RootedHypersequent {
        let mut s = self.clone();
        s.crown.push(c);
        s
    }

    /// Every formula occurring anywhere in the sequent, root and crown.
    pub fn all_formulas(&self) -> impl Iterator<Item = &Formula> {
        self.ante
            .occurrences()
            .chain(self.succ.occurrences())
            .chain(self.crown.iter().flat_map(|c| {
                c.ante.occurrences().chain(c.succ.occurrences())
            }))
    }

    /// Splits the root into (modal antecedent, atomic antecedent, atomic
    /// succedent, modal succedent) when every root formula is modal or
    /// atomic; `None` otherwise. This is the side condition of the storage
    /// rules.
    pub fn root_partition(&self) -> Option<RootPartition> {
        use crate::formula::FormulaClass;
        let mut p = RootPartition::default();
        for (f, n) in self.ante.iter() {
            match f.classify() {
                FormulaClass::Modal => p.modal_ante.insert_n(f.clone(), n),
                FormulaClass::Atomic => p.atom_ante.insert_n(f.clone(), n),
                _ => return None,
            }
        }
        for (f, n) in self.succ.iter() {
            match f.classify() {
                FormulaClass::Modal => p.modal_succ.insert_n(f.clone(), n),
                FormulaClass::Atomic => p.atom_succ.insert_n(f.clone(), n),
                _ => return None,
            }
        }
        Some(p)
    }

    pub fn is_modal_atomic_root(&self) -> bool {
        self.root_partition().is_some()
    }

    /// Multiset counts collapsed to one and the crown deduplicated and
    /// canonically sorted. Idempotent; preserves crown atomicity.
    pub fn set_project(&self) -> RootedHypersequent {
        let mut crown: Vec<CrownComponent> = self
            .crown
            .iter()
            .map(|c| CrownComponent {
                ante: c.ante.support(),
                succ: c.succ.support(),
            })
            .collect();
        crown.sort();
        crown.dedup();
        RootedHypersequent {
            ante: self.ante.support(),
            succ: self.succ.support(),
            crown,
        }
    }

    /// The formula interpretation: `∧Γ -> ∨Δ ∨ ∨_i [](∧P_i -> ∨Q_i)` with
    /// empty conjunctions read as `top` and empty disjunctions as `bot`.
    /// Folds run left to right over the canonical formula order, crown
    /// components in canonical order.
    pub fn interpretation(&self) -> Formula {
        let ante = big_and(&self.ante);
        let base = big_or(&self.succ);
        if self.crown.is_empty() {
            return Formula::imp(ante, base);
        }
        let mut comps = self.crown.clone();
        comps.sort();
        let succ = comps.into_iter().fold(base, |acc, c| {
            Formula::or(
                acc,
                Formula::boxed(Formula::imp(big_and(&c.ante), big_or(&c.succ))),
            )
        });
        Formula::imp(ante, succ)
    }
}

fn big_and(m: &FMultiset) -> Formula {
    let mut it = m.occurrences().cloned();
    match it.next() {
        None => Formula::Top,
        Some(first) => it.fold(first, Formula::and),
    }
}

fn big_or(m: &FMultiset) -> Formula {
    let mut it = m.occurrences().cloned();
    match it.next() {
        None => Formula::Bottom,
        Some(first) => it.fold(first, Formula::or),
    }
}

impl fmt::Display for RootedHypersequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_multiset(&self.ante, f)?;
        if self.ante.is_empty() {
            write!(f, "=>")?;
        } else {
            write!(f, " =>")?;
        }
        if !self.succ.is_empty() {
            write!(f, " ")?;
            fmt_multiset(&self.succ, f)?;
        }
        for (i, c) in self.crown.iter().enumerate() {
            write!(f, " {} {c}", if i == 0 { "||" } else { "|" })?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses `fmlist? '=>' fmlist? ('||' crown)?` with comma-separated formula
/// lists and `|`-separated crown components. Crown items are parsed at
/// unary precedence (the separator `|` would otherwise read as a
/// disjunction) and must be atomic.
pub fn parse_sequent(text: &str) -> Result<RootedHypersequent, SequentError> {
    let mut ts = TokStream::new(text).map_err(SequentError::Parse)?;
    let ante = parse_fmlist(&mut ts)?;
    ts.expect(&Tok::SeqArrow).map_err(SequentError::Parse)?;
    let succ = parse_fmlist(&mut ts)?;
    let mut crown = Vec::new();
    if ts.eat(&Tok::CrownSep) {
        loop {
            let ca = parse_crown_list(&mut ts)?;
            ts.expect(&Tok::SeqArrow).map_err(SequentError::Parse)?;
            let cs = parse_crown_list(&mut ts)?;
            crown.push(CrownComponent::new(ca, cs)?);
            if !ts.eat(&Tok::Or) {
                break;
            }
        }
    }
    ts.expect_end().map_err(SequentError::Parse)?;
    Ok(RootedHypersequent::new(ante, succ, crown))
}

fn starts_formula(t: Option<&Tok>) -> bool {
    matches!(
        t,
        Some(
            Tok::Ident(_)
                | Tok::Bot
                | Tok::Top
                | Tok::Neg
                | Tok::BoxOp
                | Tok::DiaOp
                | Tok::LParen
        )
    )
}

fn parse_fmlist(ts: &mut TokStream) -> Result<FMultiset, SequentError> {
    let mut m = FMultiset::new();
    if !starts_formula(ts.peek()) {
        return Ok(m);
    }
    loop {
        m.insert(parse_imp(ts).map_err(SequentError::Parse)?);
        if !ts.eat(&Tok::Comma) {
            break;
        }
    }
    Ok(m)
}

fn parse_crown_list(ts: &mut TokStream) -> Result<FMultiset, SequentError> {
    let mut m = FMultiset::new();
    if !starts_formula(ts.peek()) {
        return Ok(m);
    }
    loop {
        m.insert(crate::formula::parse_crown_item(ts).map_err(SequentError::Parse)?);
        if !ts.eat(&Tok::Comma) {
            break;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn seq(s: &str) -> RootedHypersequent {
        parse_sequent(s).unwrap()
    }

    #[test]
    fn parses_root_only_sequent() {
        let s = seq("r, p, q => <>(p & q)");
        assert_eq!(s.ante(), &["r", "p", "q"].map(fm).into_iter().collect());
        assert_eq!(s.succ(), &FMultiset::singleton(fm("<>(p & q)")));
        assert!(s.crown().is_empty());
    }

    #[test]
    fn parses_crown_and_empty_sides() {
        let s = seq("=> <>r || r, p, q =>");
        assert!(s.ante().is_empty());
        assert_eq!(s.succ(), &FMultiset::singleton(fm("<>r")));
        assert_eq!(s.crown().len(), 1);
        assert_eq!(
            s.crown()[0].ante(),
            &["r", "p", "q"].map(fm).into_iter().collect()
        );
        assert!(s.crown()[0].succ().is_empty());
    }

    #[test]
    fn rejects_non_atomic_crown_formula() {
        let err = parse_sequent("=> p || []p => q").unwrap_err();
        assert_eq!(err, SequentError::NonAtomicCrown(fm("[]p")));
    }

    #[test]
    fn crown_equality_is_order_insensitive() {
        assert_eq!(seq("p => q || a => | => b"), seq("p => q || => b | a =>"));
        assert_ne!(seq("p => q || a =>"), seq("p => q || a => | a =>"));
    }

    #[test]
    fn multiset_equality_respects_multiplicity() {
        assert_ne!(seq("p, p => q"), seq("p => q"));
        assert_eq!(seq("p, q => r"), seq("q, p => r"));
    }

    #[test]
    fn interpretation_of_identity() {
        assert_eq!(seq("p => p").interpretation(), fm("p -> p"));
    }

    #[test]
    fn interpretation_of_crown_example() {
        // => <>r || r,p,q =>   ~~>   top -> <>r | [](p & q & r -> bot)
        let got = seq("=> <>r || r, p, q =>").interpretation();
        let want = Formula::imp(
            Formula::Top,
            Formula::or(
                fm("<>r"),
                Formula::boxed(Formula::imp(fm("p & q & r"), Formula::Bottom)),
            ),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn interpretation_of_empty_sequent() {
        assert_eq!(seq("=>").interpretation(), fm("top -> bot"));
    }

    #[test]
    fn set_project_examples() {
        assert_eq!(seq("p, p => q").set_project(), seq("p => q"));
        assert_eq!(
            seq("=> || p => | p =>").set_project(),
            seq("=> || p =>")
        );
        let fixed = seq("p => q || =>");
        assert_eq!(fixed.set_project(), fixed);
        // idempotent
        let s = seq("p, p => q, r, r || a, a => b | a => b");
        assert_eq!(s.set_project().set_project(), s.set_project());
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "=>",
            "p =>",
            "=> p",
            "p, p, q => r || =>",
            "[]p, <>q => ~r | p -> q || a => b | => c | d =>",
        ] {
            let s = seq(text);
            assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn interpretation_uses_only_subformulas_and_connectives() {
        let s = seq("[]p, q => <>r || a => b");
        let interp = s.interpretation();
        let allowed: std::collections::BTreeSet<Formula> = s
            .all_formulas()
            .flat_map(|f| f.subformulas())
            .collect();
        for sub in interp.subformulas() {
            let ok = allowed.contains(&sub)
                || matches!(
                    sub,
                    Formula::Top
                        | Formula::Bottom
                        | Formula::And(..)
                        | Formula::Or(..)
                        | Formula::Imp(..)
                        | Formula::Box(..)
                );
            assert!(ok, "unexpected subformula {sub} in interpretation");
        }
    }
}
