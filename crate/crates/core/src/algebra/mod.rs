//! Symbolic linear rate constraints over uninterpreted information terms.
//!
//! A [`LinearExpr`] is an exact-rational combination of rate variables,
//! information terms `I(A;B|C)` (kept symbolic — no entropy identities are
//! applied), and a rational constant. A [`ConstraintSystem`] carries a list
//! of labelled constraints split over free rate variables (the region
//! coordinates `R1`, `R2`) and bound ones (internal split rates), plus the
//! sampling family its subject-to conditions are defined over.
//!
//! Systems written differently can denote the same projected region through
//! identities the symbolic layer deliberately does not know; equality of
//! regions is therefore established numerically (see [`equiv`]).

pub mod equiv;
pub mod fm;
pub mod instantiate;
pub mod io;
pub mod presets;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::prob::Var;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("information term sets overlap")]
    OverlappingSets,
    #[error("variable {0} is not bound in this system")]
    NotBound(String),
    #[error("equality {0} has no bound variable to solve for")]
    EqualityUnsolvable(String),
    #[error("elimination of {var} exceeded the constraint cap ({count} > {cap})")]
    CapExceeded { var: String, count: usize, cap: usize },
    #[error("certificate for output constraint {index} does not reproduce it")]
    CertificateMismatch { index: usize },
    #[error("system mentions rate variable {0}; instantiation needs a system projected to R1, R2")]
    NotProjected(String),
    #[error("system file: {0}")]
    Format(String),
    #[error(transparent)]
    Prob(#[from] crate::prob::ProbError),
}

/// A named rate variable, e.g. `R1`, `Ra`, `RD1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RateVar(pub String);

impl RateVar {
    pub fn new(name: &str) -> RateVar {
        RateVar(name.to_string())
    }
}

impl fmt::Display for RateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Symbolic conditional mutual information `I(a; b | c)` over disjoint
/// variable sets, canonicalized so the two argument sets are ordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoTerm {
    a: Vec<Var>,
    b: Vec<Var>,
    c: Vec<Var>,
}

impl InfoTerm {
    pub fn new(
        a: impl IntoIterator<Item = Var>,
        b: impl IntoIterator<Item = Var>,
        c: impl IntoIterator<Item = Var>,
    ) -> Result<InfoTerm, AlgebraError> {
        let a: BTreeSet<Var> = a.into_iter().collect();
        let b: BTreeSet<Var> = b.into_iter().collect();
        let c: BTreeSet<Var> = c.into_iter().collect();
        if a.is_empty() || b.is_empty() {
            return Err(AlgebraError::Parse("information term needs two argument sets".into()));
        }
        if a.intersection(&b).next().is_some()
            || a.intersection(&c).next().is_some()
            || b.intersection(&c).next().is_some()
        {
            return Err(AlgebraError::OverlappingSets);
        }
        let (a, b): (Vec<Var>, Vec<Var>) = {
            let av: Vec<Var> = a.into_iter().collect();
            let bv: Vec<Var> = b.into_iter().collect();
            // Mutual information is symmetric; order the sets so syntactic
            // comparison sees one spelling.
            if bv < av {
                (bv, av)
            } else {
                (av, bv)
            }
        };
        Ok(InfoTerm { a, b, c: c.into_iter().collect() })
    }

    pub fn sets(&self) -> (&[Var], &[Var], &[Var]) {
        (&self.a, &self.b, &self.c)
    }

    /// Numeric value on a joint, in bits.
    pub fn eval(&self, j: &crate::prob::Joint) -> Result<f64, AlgebraError> {
        Ok(j.cond_mutual_info(&self.a, &self.b, &self.c)?)
    }
}

impl fmt::Display for InfoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |vs: &[Var]| vs.iter().map(|v| v.name()).collect::<Vec<_>>().join(",");
        if self.c.is_empty() {
            write!(f, "I({};{})", list(&self.a), list(&self.b))
        } else {
            write!(f, "I({};{}|{})", list(&self.a), list(&self.b), list(&self.c))
        }
    }
}

/// Exact-rational linear combination of rate variables and information
/// terms plus a constant.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct LinearExpr {
    pub rates: BTreeMap<RateVar, Rat>,
    pub infos: BTreeMap<InfoTerm, Rat>,
    pub constant: Rat,
}

impl LinearExpr {
    pub fn zero() -> LinearExpr {
        LinearExpr::default()
    }

    pub fn rate(mut self, v: &str, coef: Rat) -> LinearExpr {
        self.add_rate(RateVar::new(v), coef);
        self
    }

    pub fn add_rate(&mut self, v: RateVar, coef: Rat) {
        if coef.is_zero() {
            return;
        }
        let slot = self.rates.entry(v).or_insert_with(Rat::zero);
        *slot += coef;
        if slot.is_zero() {
            let dead: Vec<RateVar> = self
                .rates
                .iter()
                .filter(|(_, c)| c.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.rates.remove(&k);
            }
        }
    }

    pub fn add_info(&mut self, t: InfoTerm, coef: Rat) {
        if coef.is_zero() {
            return;
        }
        let slot = self.infos.entry(t).or_insert_with(Rat::zero);
        *slot += coef;
        if slot.is_zero() {
            let dead: Vec<InfoTerm> = self
                .infos
                .iter()
                .filter(|(_, c)| c.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.infos.remove(&k);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinearExpr, scale: &Rat) {
        if scale.is_zero() {
            return;
        }
        for (v, c) in &other.rates {
            self.add_rate(v.clone(), c * scale);
        }
        for (t, c) in &other.infos {
            self.add_info(t.clone(), c * scale);
        }
        self.constant += &other.constant * scale;
    }

    pub fn scaled(&self, scale: &Rat) -> LinearExpr {
        let mut out = LinearExpr::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn coef_of(&self, v: &RateVar) -> Rat {
        self.rates.get(v).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rates.is_empty() && self.infos.is_empty() && self.constant.is_zero()
    }

    pub fn has_rates(&self) -> bool {
        !self.rates.is_empty()
    }

    /// Positive canonical rescale: divides by the absolute value of the
    /// leading coefficient (first rate, else first info, else constant).
    pub fn canonical_scale(&self) -> Rat {
        let lead = self
            .rates
            .values()
            .next()
            .or_else(|| self.infos.values().next())
            .unwrap_or(&self.constant);
        if lead.is_zero() {
            Rat::one()
        } else {
            lead.abs().recip()
        }
    }
}

/// Constraint relations, written `expr REL 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            "=" => Relation::Eq,
            ">=" => Relation::Ge,
            ">" => Relation::Gt,
            _ => return None,
        })
    }
}

/// One labelled constraint `expr REL 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub expr: LinearExpr,
    pub rel: Relation,
}

impl Constraint {
    /// A constraint with no rate variables is a subject-to condition on the
    /// distribution ("gate"); it contributes no halfplane.
    pub fn is_gate(&self) -> bool {
        !self.expr.has_rates()
    }

    /// Renders the relation body without the label, in the same syntax
    /// [`parse_constraint`] reads, so constraints round-trip through text.
    pub fn text(&self) -> String {
        // Render rates on the left, everything else negated on the right.
        let mut left = String::new();
        for (v, c) in &self.expr.rates {
            push_term(&mut left, &v.to_string(), c);
        }
        let mut right = String::new();
        for (t, c) in &self.expr.infos {
            push_term(&mut right, &t.to_string(), &-c.clone());
        }
        if !self.expr.constant.is_zero() {
            push_term(&mut right, "", &-self.expr.constant.clone());
        }
        if left.is_empty() {
            left.push('0');
        }
        if right.is_empty() {
            right.push('0');
        }
        format!("{} {} {}", left, self.rel.as_str(), right)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.label, self.text())
    }
}

fn push_term(buf: &mut String, name: &str, coef: &Rat) {
    if coef.is_zero() {
        return;
    }
    let mag = coef.abs();
    let sign = if coef.is_negative() { "-" } else { "+" };
    if buf.is_empty() {
        if coef.is_negative() {
            buf.push('-');
        }
    } else {
        buf.push_str(&format!(" {sign} "));
    }
    if mag.is_one() && !name.is_empty() {
        buf.push_str(name);
    } else if name.is_empty() {
        buf.push_str(&format!("{mag}"));
    } else {
        buf.push_str(&format!("{mag} {name}"));
    }
}

/// Which distribution family a system's subject-to conditions quantify
/// over. Used by the numeric equivalence checker to sample fairly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFamily {
    /// General chains passing the subject-to conditions.
    Gated,
    /// Chains with `V_side = V = U` (single informative satellite).
    Collapsed { side: usize },
}

/// A labelled system of constraints over free and bound rate variables.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub name: String,
    /// Human-readable origin: preset description or elimination trail.
    pub provenance: String,
    pub free: Vec<RateVar>,
    pub bound: Vec<RateVar>,
    pub constraints: Vec<Constraint>,
    pub family: SampleFamily,
}

impl ConstraintSystem {
    pub fn gates(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.is_gate())
    }

    pub fn rate_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.is_gate())
    }

    pub fn equalities(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.rel == Relation::Eq)
    }
}

// ---------------------------------------------------------------------------
// Constraint parser: lets presets and tests read like the derivations.
// ---------------------------------------------------------------------------

/// Parses `"R1 - Ra + RD < I(V,V1;Y1|U)"`-style text into a [`Constraint`].
pub fn parse_constraint(label: &str, text: &str) -> Result<Constraint, AlgebraError> {
    let (rel_pos, rel) = find_relation(text)?;
    let (lhs, rhs) = (&text[..rel_pos], &text[rel_pos + rel.as_str().len()..]);
    let mut expr = parse_expr(lhs)?;
    let rhs_expr = parse_expr(rhs)?;
    expr.add_scaled(&rhs_expr, &-Rat::one());
    Ok(Constraint { label: label.to_string(), expr, rel })
}

fn find_relation(text: &str) -> Result<(usize, Relation), AlgebraError> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b'<' | b'>' if depth == 0 => {
                let len = if i + 1 < bytes.len() && bytes[i + 1] == b'=' { 2 } else { 1 };
                let rel = Relation::parse(&text[i..i + len]).unwrap();
                return Ok((i, rel));
            }
            b'=' if depth == 0 => return Ok((i, Relation::Eq)),
            _ => {}
        }
        i += 1;
    }
    Err(AlgebraError::Parse(format!("no relation in {text:?}")))
}

fn parse_expr(text: &str) -> Result<LinearExpr, AlgebraError> {
    let mut expr = LinearExpr::zero();
    let s: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut sign = Rat::one();
    let mut saw_term = false;
    while i < s.len() {
        match s[i] {
            ' ' => i += 1,
            '+' => {
                sign = Rat::one();
                i += 1;
            }
            '-' => {
                sign = -Rat::one();
                i += 1;
            }
            '0'..='9' => {
                let (num, next) = parse_number(&s, i)?;
                i = next;
                // Optional `*` or implicit multiplication with an atom.
                while i < s.len() && s[i] == ' ' {
                    i += 1;
                }
                if i < s.len() && s[i] == '*' {
                    i += 1;
                }
                while i < s.len() && s[i] == ' ' {
                    i += 1;
                }
                if i < s.len() && (s[i] == 'I' || s[i] == 'R') {
                    let coef = &sign * &num;
                    i = parse_atom(&s, i, &coef, &mut expr)?;
                } else {
                    expr.constant += &sign * &num;
                }
                sign = Rat::one();
                saw_term = true;
            }
            'I' | 'R' => {
                let coef = sign.clone();
                i = parse_atom(&s, i, &coef, &mut expr)?;
                sign = Rat::one();
                saw_term = true;
            }
            other => {
                return Err(AlgebraError::Parse(format!(
                    "unexpected {other:?} in expression {text:?}"
                )))
            }
        }
    }
    if !saw_term && expr.is_zero() {
        // "0" parses as the empty expression; anything else is an error
        // already reported above.
    }
    Ok(expr)
}

fn parse_number(s: &[char], mut i: usize) -> Result<(Rat, usize), AlgebraError> {
    let start = i;
    while i < s.len() && s[i].is_ascii_digit() {
        i += 1;
    }
    let num: i64 = s[start..i]
        .iter()
        .collect::<String>()
        .parse()
        .map_err(|_| AlgebraError::Parse("bad number".into()))?;
    if i < s.len() && s[i] == '/' {
        i += 1;
        let dstart = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        let den: i64 = s[dstart..i]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| AlgebraError::Parse("bad denominator".into()))?;
        Ok((rat(num, den), i))
    } else {
        Ok((rat(num, 1), i))
    }
}

fn parse_atom(s: &[char], i: usize, coef: &Rat, expr: &mut LinearExpr) -> Result<usize, AlgebraError> {
    if s[i] == 'I' && i + 1 < s.len() && s[i + 1] == '(' {
        let mut j = i + 2;
        let mut depth = 1;
        while j < s.len() && depth > 0 {
            match s[j] {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            j += 1;
        }
        if depth != 0 {
            return Err(AlgebraError::Parse("unbalanced parentheses in I(...)".into()));
        }
        let inside: String = s[i + 2..j - 1].iter().collect();
        expr.add_info(parse_info_term(&inside)?, coef.clone());
        Ok(j)
    } else {
        // Rate variable: leading letter then alphanumerics.
        let mut j = i + 1;
        while j < s.len() && s[j].is_ascii_alphanumeric() {
            j += 1;
        }
        let name: String = s[i..j].iter().collect();
        expr.add_rate(RateVar(name), coef.clone());
        Ok(j)
    }
}

fn parse_var_list(text: &str) -> Result<Vec<Var>, AlgebraError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Var::parse(s).ok_or_else(|| AlgebraError::Parse(format!("unknown variable {s:?}"))))
        .collect()
}

/// Parses the inside of `I( ... )`: `A;B` or `A;B|C` with comma-separated
/// variable lists.
pub fn parse_info_term(inside: &str) -> Result<InfoTerm, AlgebraError> {
    let (args, cond) = match inside.split_once('|') {
        Some((l, r)) => (l, Some(r)),
        None => (inside, None),
    };
    let (a, b) = args
        .split_once(';')
        .ok_or_else(|| AlgebraError::Parse(format!("I({inside}): missing ';'")))?;
    InfoTerm::new(
        parse_var_list(a)?,
        parse_var_list(b)?,
        cond.map(parse_var_list).transpose()?.unwrap_or_default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_term_is_order_canonical() {
        let t1 = parse_info_term("V,V1;Y1|U").unwrap();
        let t2 = parse_info_term("Y1;V1,V|U").unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.to_string(), "I(V,V1;Y1|U)");
    }

    #[test]
    fn overlapping_info_term_rejected() {
        assert!(matches!(
            parse_info_term("V;V,Y1"),
            Err(AlgebraError::OverlappingSets)
        ));
    }

    #[test]
    fn constraint_round_trips_through_parser() {
        let c = parse_constraint("y1-sat", "R1 - Ra + RD + RD1 + RL1 < I(V,V1;Y1|U)").unwrap();
        assert_eq!(c.rel, Relation::Lt);
        assert_eq!(c.expr.coef_of(&RateVar::new("R1")), rat(1, 1));
        assert_eq!(c.expr.coef_of(&RateVar::new("Ra")), rat(-1, 1));
        assert_eq!(c.expr.infos.len(), 1);
        assert!(!c.is_gate());
        let s = c.to_string();
        assert!(s.contains("R1"), "{s}");
        assert!(s.contains("I(V,V1;Y1|U)"), "{s}");
    }

    #[test]
    fn gate_detection_and_rational_coefficients() {
        let g = parse_constraint(
            "marton-window",
            "I(V1;V2|V) < I(V1;Z|V) + I(V2;Z|V) - I(V1,V2;Z|V)",
        )
        .unwrap();
        assert!(g.is_gate());
        let c = parse_constraint("halves", "1/2 R1 + 3/2 R2 <= 2").unwrap();
        assert_eq!(c.expr.coef_of(&RateVar::new("R2")), rat(3, 2));
        assert_eq!(c.expr.constant, rat(-2, 1));
    }

    #[test]
    fn expr_arithmetic_cancels_exactly() {
        let a = parse_constraint("t", "R1 + R2 < I(U;Y1)").unwrap().expr;
        let mut b = a.clone();
        b.add_scaled(&a, &-Rat::one());
        assert!(b.is_zero());
    }
}
