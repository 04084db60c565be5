//! Backward proof search.
//!
//! Per node the rule instances are tried in preference order: (1) close
//! initial sequents; (2) non-branching invertible propositional rules;
//! (3) branching propositional rules; (4) `LBox`/`RDia` unfolding under
//! blocking; (5) once the root is modal/atomic, every `RBox`, `LDia` and
//! `Exch` instance. All of it backtracks: a saturation failure under one
//! instance falls through to the next, since the loop check below can cut
//! off a derivable expansion whose proof exists along a sibling.
//!
//! Termination comes from two guards. A box (diamond) is unfolded at most
//! once per storage segment: `LBox` on `[]A` is skipped while `A` is in
//! the root antecedent or `[]A` has already been unfolded since the last
//! storage rule, and dually for `RDia`. Independently, a branch is pruned
//! whenever the set projection of the current sequent repeats along the
//! path; projections over the subformula-closed universe are finite.
//! Neither guard is justified by a metatheorem, so saturation verdicts are
//! only "search exhausted" and are cross-checked against the semantic
//! oracle in the test suite.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::calculus::{apply_backward, initial_instance, Proof, RuleId, RuleInstance};
use crate::formula::Formula;
use crate::hypersequent::RootedHypersequent;

/// Caps on the search: recursion depth and visited-node count. Exceeding
/// either yields [`SearchVerdict::BudgetExceeded`], never a saturation
/// verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_depth: usize,
    pub max_visited: usize,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_depth: 200,
            max_visited: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchVerdict {
    Provable(Proof),
    NotProvable { saturated_states: usize },
    BudgetExceeded,
}

impl SearchVerdict {
    pub fn is_provable(&self) -> bool {
        matches!(self, SearchVerdict::Provable(_))
    }

    pub fn proof(&self) -> Option<&Proof> {
        match self {
            SearchVerdict::Provable(pf) => Some(pf),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fail {
    /// No instance closed the node. `pruned` records whether the loop
    /// check cut anything off below; only unpruned failures are
    /// path-independent and safe to memoize.
    Saturated { pruned: bool },
    Budget,
}

impl Fail {
    fn join(self, other: Fail) -> Fail {
        match (self, other) {
            (Fail::Budget, _) | (_, Fail::Budget) => Fail::Budget,
            (Fail::Saturated { pruned: a }, Fail::Saturated { pruned: b }) => {
                Fail::Saturated { pruned: a || b }
            }
        }
    }
}

struct Searcher {
    budget: SearchBudget,
    visited: usize,
    saturated: usize,
    memo: HashMap<RootedHypersequent, Proof>,
    refuted: HashSet<RootedHypersequent>,
    path: HashSet<RootedHypersequent>,
}

/// Backward proof search on `goal`. A `Provable` verdict carries a proof
/// of exactly `goal` that the independent checker accepts; the search is
/// deterministic for a fixed goal and budget.
pub fn prove(goal: &RootedHypersequent, budget: SearchBudget) -> SearchVerdict {
    let mut searcher = Searcher {
        budget,
        visited: 0,
        saturated: 0,
        memo: HashMap::new(),
        refuted: HashSet::new(),
        path: HashSet::new(),
    };
    match searcher.search(goal, &BTreeSet::new(), 0) {
        Ok(pf) => SearchVerdict::Provable(pf),
        Err(Fail::Saturated { .. }) => SearchVerdict::NotProvable {
            saturated_states: searcher.saturated,
        },
        Err(Fail::Budget) => SearchVerdict::BudgetExceeded,
    }
}

/// Decides S5 validity of a formula by proving `=> f` after
/// constant-simplifying `f`; the simplification keeps `top`/`bot` from
/// blocking the storage rules and never appears inside the proof itself.
pub fn decide_formula(f: &Formula, budget: SearchBudget) -> SearchVerdict {
    prove(&RootedHypersequent::goal(f.simplify_constants()), budget)
}

impl Searcher {
    fn search(
        &mut self,
        s: &RootedHypersequent,
        unfolded: &BTreeSet<Formula>,
        depth: usize,
    ) -> Result<Proof, Fail> {
        if let Some(pf) = self.memo.get(s) {
            return Ok(pf.clone());
        }
        if initial_instance(s).is_some() {
            let pf = Proof::leaf(s.clone()).expect("initial sequent");
            self.memo.insert(s.clone(), pf.clone());
            return Ok(pf);
        }
        self.visited += 1;
        if self.visited > self.budget.max_visited || depth >= self.budget.max_depth {
            return Err(Fail::Budget);
        }
        let proj = s.set_project();
        if self.path.contains(&proj) {
            self.saturated += 1;
            return Err(Fail::Saturated);
        }
        self.path.insert(proj.clone());
        let result = self.expand(s, unfolded, depth);
        self.path.remove(&proj);
        if let Ok(pf) = &result {
            self.memo.insert(s.clone(), pf.clone());
        } else if result == Err(Fail::Saturated) {
            self.saturated += 1;
        }
        result
    }

    fn expand(
        &mut self,
        s: &RootedHypersequent,
        unfolded: &BTreeSet<Formula>,
        depth: usize,
    ) -> Result<Proof, Fail> {
        // (2) non-branching invertible propositional rules
        if let Some(inst) = eager_instance(s) {
            return self.commit(s, inst, unfolded, depth);
        }
        // (3) branching propositional rules
        if let Some(inst) = branching_instance(s) {
            return self.commit(s, inst, unfolded, depth);
        }
        // (4) box/diamond saturation under blocking
        if let Some(inst) = saturation_instance(s, unfolded) {
            let mut marks = unfolded.clone();
            marks.insert(inst.principal.clone().expect("saturation principal"));
            return self.commit(s, inst, &marks, depth);
        }
        // (5) storage alternatives with backtracking
        let mut failure = Fail::Saturated;
        let Some(part) = s.root_partition() else {
            return Err(Fail::Saturated);
        };
        let fresh = BTreeSet::new();
        for inst in storage_alternatives(s, &part.storage_component()) {
            match self.commit(s, inst, &fresh, depth) {
                Ok(pf) => return Ok(pf),
                Err(Fail::Budget) => failure = Fail::Budget,
                Err(Fail::Saturated) => {}
            }
        }
        Err(failure)
    }

    fn commit(
        &mut self,
        s: &RootedHypersequent,
        inst: RuleInstance,
        unfolded: &BTreeSet<Formula>,
        depth: usize,
    ) -> Result<Proof, Fail> {
        let premises = apply_backward(s, &inst).expect("enumerated instance applies");
        let mut subs = Vec::with_capacity(premises.len());
        let mut failure = None;
        for premise in &premises {
            match self.search(premise, unfolded, depth + 1) {
                Ok(pf) => subs.push(pf),
                Err(f) => {
                    failure = Some(match (failure, f) {
                        (Some(Fail::Budget), _) | (_, Fail::Budget) => Fail::Budget,
                        _ => Fail::Saturated,
                    });
                    break;
                }
            }
        }
        match failure {
            None => Ok(Proof::node(s.clone(), inst, subs)),
            Some(f) => Err(f),
        }
    }
}

fn eager_instance(s: &RootedHypersequent) -> Option<RuleInstance> {
    for f in s.ante().distinct() {
        match f {
            Formula::Neg(_) => return Some(RuleInstance::new(RuleId::LNeg, f.clone())),
            Formula::And(..) => return Some(RuleInstance::new(RuleId::LAnd, f.clone())),
            _ => {}
        }
    }
    for f in s.succ().distinct() {
        match f {
            Formula::Neg(_) => return Some(RuleInstance::new(RuleId::RNeg, f.clone())),
            Formula::Or(..) => return Some(RuleInstance::new(RuleId::ROr, f.clone())),
            Formula::Imp(..) => return Some(RuleInstance::new(RuleId::RImp, f.clone())),
            _ => {}
        }
    }
    None
}

fn branching_instance(s: &RootedHypersequent) -> Option<RuleInstance> {
    for f in s.ante().distinct() {
        match f {
            Formula::Or(..) => return Some(RuleInstance::new(RuleId::LOr, f.clone())),
            Formula::Imp(..) => return Some(RuleInstance::new(RuleId::LImp, f.clone())),
            _ => {}
        }
    }
    for f in s.succ().distinct() {
        if matches!(f, Formula::And(..)) {
            return Some(RuleInstance::new(RuleId::RAnd, f.clone()));
        }
    }
    None
}

fn saturation_instance(
    s: &RootedHypersequent,
    unfolded: &BTreeSet<Formula>,
) -> Option<RuleInstance> {
    for f in s.ante().distinct() {
        if let Formula::Box(a) = f {
            if !s.ante().contains(a) && !unfolded.contains(f) {
                return Some(RuleInstance::new(RuleId::LBox, f.clone()));
            }
        }
    }
    for f in s.succ().distinct() {
        if let Formula::Dia(a) = f {
            if !s.succ().contains(a) && !unfolded.contains(f) {
                return Some(RuleInstance::new(RuleId::RDia, f.clone()));
            }
        }
    }
    None
}

fn storage_alternatives(
    s: &RootedHypersequent,
    storage: &crate::hypersequent::CrownComponent,
) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    for f in s.succ().distinct() {
        if matches!(f, Formula::Box(_)) {
            out.push(RuleInstance::new(RuleId::RBox, f.clone()));
        }
    }
    for f in s.ante().distinct() {
        if matches!(f, Formula::Dia(_)) {
            out.push(RuleInstance::new(RuleId::LDia, f.clone()));
        }
    }
    for (i, c) in s.crown().iter().enumerate() {
        // a swap with identical content makes no progress
        if c != storage {
            out.push(RuleInstance::exch(i));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_proof, subformula_property};
    use crate::formula::parse_formula;
    use crate::hypersequent::parse_sequent;

    fn fm(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn decide(s: &str) -> SearchVerdict {
        decide_formula(&fm(s), SearchBudget::default())
    }

    #[test]
    fn proves_first_paper_example() {
        let goal = parse_sequent("=> (r & p) -> (q -> []( <>(p & q) & <>r ))").unwrap();
        let SearchVerdict::Provable(pf) = prove(&goal, SearchBudget::default()) else {
            panic!("expected provable");
        };
        assert_eq!(pf.conclusion, goal);
        assert_eq!(check_proof(&pf), Ok(()));
        assert!(subformula_property(&pf));
    }

    #[test]
    fn proves_second_paper_example() {
        let goal = parse_sequent("=> []([]~p | p) -> [](~p | []p)").unwrap();
        let SearchVerdict::Provable(pf) = prove(&goal, SearchBudget::default()) else {
            panic!("expected provable");
        };
        assert_eq!(check_proof(&pf), Ok(()));
        assert!(subformula_property(&pf));
    }

    #[test]
    fn refutes_box_introduction() {
        assert!(matches!(
            decide("p -> []p"),
            SearchVerdict::NotProvable { .. }
        ));
    }

    #[test]
    fn axiom_five_proof_uses_the_printed_rule_set() {
        let SearchVerdict::Provable(pf) = decide("<>p -> []<>p") else {
            panic!("expected provable");
        };
        let used = pf.rules_used();
        let allowed: std::collections::BTreeSet<RuleId> =
            [RuleId::RDia, RuleId::LDia, RuleId::RBox, RuleId::RImp, RuleId::Ax]
                .into_iter()
                .collect();
        assert!(used.is_subset(&allowed), "used {used:?}");
    }

    #[test]
    fn decides_axioms() {
        for ax in [
            "[]p <-> ~<>~p",
            "[](p -> q) -> ([]p -> []q)",
            "[]p -> p",
            "[]p -> [][]p",
            "<>p -> []<>p",
            "p -> []<>p",
        ] {
            assert!(decide(ax).is_provable(), "{ax}");
        }
    }

    #[test]
    fn refutes_invalid_formulas() {
        for f in ["<>p -> p", "[](p | q) -> ([]p | []q)", "[]<>p -> p"] {
            assert!(
                matches!(decide(f), SearchVerdict::NotProvable { .. }),
                "{f}"
            );
        }
    }

    #[test]
    fn diamond_left_needs_the_storage_phase() {
        // provable only by applying LDia before exhausting LBox unfoldings
        let goal = parse_sequent("<>p, []~p =>").unwrap();
        let SearchVerdict::Provable(pf) = prove(&goal, SearchBudget::default()) else {
            panic!("expected provable");
        };
        assert_eq!(check_proof(&pf), Ok(()));
    }

    #[test]
    fn constants_are_preprocessed_in_decide() {
        assert!(decide("top -> (<>p -> []<>p)").is_provable());
        assert!(decide("(p & top) -> p").is_provable());
        assert!(matches!(decide("bot"), SearchVerdict::NotProvable { .. }));
        assert!(decide("top").is_provable());
    }

    #[test]
    fn crown_axiom_needs_exchange() {
        // => p || p => p is not initial but is provable via Exch
        let goal = parse_sequent("=> p || p => p").unwrap();
        assert!(crate::calculus::is_initial(&goal).is_none());
        let SearchVerdict::Provable(pf) = prove(&goal, SearchBudget::default()) else {
            panic!("expected provable");
        };
        assert_eq!(check_proof(&pf), Ok(()));
    }

    #[test]
    fn search_is_deterministic() {
        let goal = parse_sequent("=> []([]~p | p) -> [](~p | []p)").unwrap();
        let a = prove(&goal, SearchBudget::default());
        let b = prove(&goal, SearchBudget::default());
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_budget_reports_budget_exceeded() {
        let goal = parse_sequent("=> []([]~p | p) -> [](~p | []p)").unwrap();
        let verdict = prove(
            &goal,
            SearchBudget {
                max_depth: 2,
                max_visited: 1_000,
            },
        );
        assert_eq!(verdict, SearchVerdict::BudgetExceeded);
    }
}
