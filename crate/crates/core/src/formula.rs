//! The S5 formula language: abstract syntax, a parser for the concrete
//! grammar, a precedence-aware printer, and small structural utilities.
//!
//! Concrete syntax: `~` negation, `&` conjunction, `|` disjunction, `->`
//! implication (right associative), `[]` box, `<>` diamond, `bot`, `top`.
//! Unary operators bind tightest, then `&`, then `|`, then `->`. The
//! defined connective `<->` is parser sugar for a conjunction of two
//! implications.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// An S5 formula. Structural equality is syntactic; the derived `Ord` is
/// the canonical formula order used everywhere a deterministic sequence of
/// formulas is needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bottom,
    Top,
    Atom(String),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>),
    Box(Box<Formula>),
}

/// Top-connective classification. `Bottom`/`Top` are constants, not atoms:
/// they never enter crowns or the atomic side conditions of the modal
/// rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaClass {
    Atomic,
    Modal,
    Constant,
    Compound,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        let name = name.into();
        debug_assert!(is_atom_name(&name), "invalid atom name {name:?}");
        Formula::Atom(name)
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn dia(f: Formula) -> Formula {
        Formula::Dia(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    /// `A <-> B` as the conjunction of the two implications.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn classify(&self) -> FormulaClass {
        match self {
            Formula::Atom(_) => FormulaClass::Atomic,
            Formula::Dia(_) | Formula::Box(_) => FormulaClass::Modal,
            Formula::Bottom | Formula::Top => FormulaClass::Constant,
            _ => FormulaClass::Compound,
        }
    }

    pub fn is_atomic(&self) -> bool {
        self.classify() == FormulaClass::Atomic
    }

    pub fn is_modal(&self) -> bool {
        self.classify() == FormulaClass::Modal
    }

    /// All subformulas of `self`, including `self`, deduplicated.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Bottom | Formula::Top | Formula::Atom(_) => {}
            Formula::Neg(a) | Formula::Dia(a) | Formula::Box(a) => a.collect_subformulas(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }

    /// Total number of nodes in the syntax tree (leaves included).
    pub fn node_count(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Top | Formula::Atom(_) => 1,
            Formula::Neg(a) | Formula::Dia(a) | Formula::Box(a) => 1 + a.node_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Maximal nesting depth of `[]`/`<>`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Top | Formula::Atom(_) => 0,
            Formula::Neg(a) => a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
            Formula::Dia(a) | Formula::Box(a) => 1 + a.modal_depth(),
        }
    }

    /// Names of the atoms occurring in the formula.
    pub fn atom_names(&self) -> BTreeSet<String> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(n) => Some(n),
                _ => None,
            })
            .collect()
    }

    pub fn contains_constant(&self) -> bool {
        self.subformulas()
            .iter()
            .any(|f| matches!(f, Formula::Bottom | Formula::Top))
    }

    /// Rewrites away `top`/`bot` under boolean and modal connectives. The
    /// result is either a constant or constant-free; it is equivalent to
    /// the input over S5 models (the modal clauses use reflexivity).
    pub fn simplify_constants(&self) -> Formula {
        use Formula::*;
        match self {
            Bottom | Top | Atom(_) => self.clone(),
            Neg(a) => match a.simplify_constants() {
                Bottom => Top,
                Top => Bottom,
                a => Formula::neg(a),
            },
            And(a, b) => match (a.simplify_constants(), b.simplify_constants()) {
                (Bottom, _) | (_, Bottom) => Bottom,
                (Top, x) | (x, Top) => x,
                (a, b) => Formula::and(a, b),
            },
            Or(a, b) => match (a.simplify_constants(), b.simplify_constants()) {
                (Top, _) | (_, Top) => Top,
                (Bottom, x) | (x, Bottom) => x,
                (a, b) => Formula::or(a, b),
            },
            Imp(a, b) => match (a.simplify_constants(), b.simplify_constants()) {
                (Bottom, _) => Top,
                (_, Top) => Top,
                (Top, x) => x,
                (x, Bottom) => Formula::neg(x),
                (a, b) => Formula::imp(a, b),
            },
            Dia(a) => match a.simplify_constants() {
                Bottom => Bottom,
                Top => Top,
                a => Formula::dia(a),
            },
            Box(a) => match a.simplify_constants() {
                Bottom => Bottom,
                Top => Top,
                a => Formula::boxed(a),
            },
        }
    }
}

pub fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    s != "bot" && s != "top" && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// ---------------------------------------------------------------------------
// Printing

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Bottom => write!(f, "bot")?,
            Formula::Top => write!(f, "top")?,
            Formula::Atom(n) => write!(f, "{n}")?,
            Formula::Neg(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 4)?;
            }
            Formula::Dia(a) => {
                write!(f, "<>")?;
                a.fmt_prec(f, 4)?;
            }
            Formula::Box(a) => {
                write!(f, "[]")?;
                a.fmt_prec(f, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Imp(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Renders `f` in the concrete grammar; `parse_formula` inverts this.
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

// ---------------------------------------------------------------------------
// Lexing (shared with the sequent parser)

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Bot,
    Top,
    Neg,
    And,
    Or,
    Imp,
    Iff,
    BoxOp,
    DiaOp,
    LParen,
    RParen,
    Comma,
    SeqArrow,
    CrownSep,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(n) => return write!(f, "identifier `{n}`"),
            Tok::Bot => "`bot`",
            Tok::Top => "`top`",
            Tok::Neg => "`~`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Imp => "`->`",
            Tok::Iff => "`<->`",
            Tok::BoxOp => "`[]`",
            Tok::DiaOp => "`<>`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::SeqArrow => "`=>`",
            Tok::CrownSep => "`||`",
        };
        write!(f, "{s}")
    }
}

/// A syntax error with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '~' => {
                toks.push((i, Tok::Neg));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::And));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    toks.push((i, Tok::CrownSep));
                    i += 2;
                } else {
                    toks.push((i, Tok::Or));
                    i += 1;
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Imp));
                    i += 2;
                } else {
                    return Err(ParseError::new(i, "expected `->`"));
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::SeqArrow));
                    i += 2;
                } else {
                    return Err(ParseError::new(i, "expected `=>`"));
                }
            }
            '[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    toks.push((i, Tok::BoxOp));
                    i += 2;
                } else {
                    return Err(ParseError::new(i, "expected `[]`"));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::DiaOp));
                    i += 2;
                } else if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((i, Tok::Iff));
                    i += 3;
                } else {
                    return Err(ParseError::new(i, "expected `<>` or `<->`"));
                }
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "bot" => Tok::Bot,
                    "top" => Tok::Top,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((start, tok));
            }
            _ => return Err(ParseError::new(i, format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

pub(crate) struct TokStream {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl TokStream {
    pub(crate) fn new(text: &str) -> Result<TokStream, ParseError> {
        Ok(TokStream {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn next_pos(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected {tok}")))
        }
    }

    pub(crate) fn error_here(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.next_pos(), message)
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error_here(format!("unexpected {t}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses a formula in the concrete grammar. `parse_formula(render_formula(f))`
/// returns `f` for every formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut ts = TokStream::new(text)?;
    let f = parse_imp(&mut ts)?;
    ts.expect_end()?;
    Ok(f)
}

pub(crate) fn parse_imp(ts: &mut TokStream) -> Result<Formula, ParseError> {
    let lhs = parse_or(ts)?;
    if ts.eat(&Tok::Imp) {
        let rhs = parse_imp(ts)?;
        Ok(Formula::imp(lhs, rhs))
    } else if ts.eat(&Tok::Iff) {
        let rhs = parse_or(ts)?;
        Ok(Formula::iff(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_or(ts: &mut TokStream) -> Result<Formula, ParseError> {
    let mut f = parse_and(ts)?;
    while ts.eat(&Tok::Or) {
        let rhs = parse_and(ts)?;
        f = Formula::or(f, rhs);
    }
    Ok(f)
}

fn parse_and(ts: &mut TokStream) -> Result<Formula, ParseError> {
    let mut f = parse_unary(ts)?;
    while ts.eat(&Tok::And) {
        let rhs = parse_unary(ts)?;
        f = Formula::and(f, rhs);
    }
    Ok(f)
}

/// Unary-precedence entry point used for crown items, where a bare `|`
/// separates components rather than building a disjunction.
pub(crate) fn parse_crown_item(ts: &mut TokStream) -> Result<Formula, ParseError> {
    parse_unary(ts)
}

fn parse_unary(ts: &mut TokStream) -> Result<Formula, ParseError> {
    match ts.peek() {
        Some(Tok::Neg) => {
            ts.bump();
            Ok(Formula::neg(parse_unary(ts)?))
        }
        Some(Tok::BoxOp) => {
            ts.bump();
            Ok(Formula::boxed(parse_unary(ts)?))
        }
        Some(Tok::DiaOp) => {
            ts.bump();
            Ok(Formula::dia(parse_unary(ts)?))
        }
        Some(Tok::Bot) => {
            ts.bump();
            Ok(Formula::Bottom)
        }
        Some(Tok::Top) => {
            ts.bump();
            Ok(Formula::Top)
        }
        Some(Tok::Ident(_)) => {
            let Some(Tok::Ident(n)) = ts.bump() else {
                unreachable!()
            };
            Ok(Formula::Atom(n))
        }
        Some(Tok::LParen) => {
            ts.bump();
            let f = parse_imp(ts)?;
            ts.expect(&Tok::RParen)?;
            Ok(f)
        }
        Some(t) => Err(ts.error_here(format!("expected a formula, found {t}"))),
        None => Err(ts.error_here("expected a formula, found end of input")),
    }
}


#[cfg(test)]
mod tests {
    use super::testgen::arb_formula;
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }
    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn parses_example_formula() {
        // (r & p) -> (q -> []( <>(p & q) & <>r ))
        let got = parse_formula("(r & p) -> (q -> []( <>(p & q) & <>r ))").unwrap();
        let want = Formula::imp(
            Formula::and(r(), p()),
            Formula::imp(
                q(),
                Formula::boxed(Formula::and(
                    Formula::dia(Formula::and(p(), q())),
                    Formula::dia(r()),
                )),
            ),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn parses_single_atom() {
        assert_eq!(parse_formula("p").unwrap(), p());
    }

    #[test]
    fn truncated_input_errors_at_offset_3() {
        let err = parse_formula("p &").unwrap_err();
        assert_eq!(err.pos, 3);
    }

    #[test]
    fn imp_is_right_associative() {
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::imp(p(), Formula::imp(q(), r()))
        );
    }

    #[test]
    fn unary_binds_tightest() {
        assert_eq!(
            parse_formula("~p & []q | <>r -> p").unwrap(),
            Formula::imp(
                Formula::or(
                    Formula::and(Formula::neg(p()), Formula::boxed(q())),
                    Formula::dia(r())
                ),
                p()
            )
        );
    }

    #[test]
    fn iff_expands_to_two_implications() {
        assert_eq!(
            parse_formula("p <-> q").unwrap(),
            Formula::and(Formula::imp(p(), q()), Formula::imp(q(), p()))
        );
    }

    #[test]
    fn constants_are_not_atoms() {
        assert_eq!(parse_formula("bot").unwrap(), Formula::Bottom);
        assert_eq!(parse_formula("top").unwrap(), Formula::Top);
        assert_eq!(Formula::Bottom.classify(), FormulaClass::Constant);
        assert_eq!(Formula::Top.classify(), FormulaClass::Constant);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            Formula::boxed(Formula::imp(p(), q())).classify(),
            FormulaClass::Modal
        );
        assert_eq!(p().classify(), FormulaClass::Atomic);
        assert_eq!(
            Formula::neg(Formula::boxed(p())).classify(),
            FormulaClass::Compound
        );
    }

    #[test]
    fn subformula_examples() {
        let dia_p = Formula::dia(p());
        assert_eq!(
            dia_p.subformulas(),
            [dia_p.clone(), p()].into_iter().collect()
        );
        let f = Formula::imp(p(), Formula::boxed(p()));
        assert_eq!(
            f.subformulas(),
            [f.clone(), p(), Formula::boxed(p())].into_iter().collect()
        );
        assert_eq!(
            Formula::Bottom.subformulas(),
            [Formula::Bottom].into_iter().collect()
        );
    }

    #[test]
    fn simplify_constant_examples() {
        let f = parse_formula("p & top").unwrap();
        assert_eq!(f.simplify_constants(), p());
        let f = parse_formula("p -> bot").unwrap();
        assert_eq!(f.simplify_constants(), Formula::neg(p()));
        let f = parse_formula("[](p | top)").unwrap();
        assert_eq!(f.simplify_constants(), Formula::Top);
        let f = parse_formula("<>bot | q").unwrap();
        assert_eq!(f.simplify_constants(), q());
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(f in arb_formula(&["p", "q", "r", "ab1", "x_y"])) {
            let rendered = render_formula(&f);
            prop_assert_eq!(parse_formula(&rendered).unwrap(), f);
        }

        #[test]
        fn classify_is_total_and_exclusive(f in arb_formula(&["p", "q"])) {
            // exactly one class per node, and the subformula count is bounded
            prop_assert!(f.subformulas().len() <= f.node_count());
        }

        #[test]
        fn simplified_is_constant_or_constant_free(f in arb_formula(&["p", "q"])) {
            let s = f.simplify_constants();
            prop_assert!(
                matches!(s, Formula::Bottom | Formula::Top) || !s.contains_constant()
            );
        }
    }
}
