//! Cutting Planes refutations: data model, parser, and verifier.
//!
//! Inequalities are stored exclusively in <=-normal form: a >=-inequality
//! d.x >= e is (-d).x <= -e. Derivation rules over earlier lines:
//!
//! * Add:      from a1.x <= c1 and a2.x <= c2 derive (a1+a2).x <= c1+c2;
//! * Mul d:    scale by a nonzero integer d — for d < 0 the inequality flips
//!             and re-normalizes, which lands on the same line as scaling by
//!             |d| ((d.a negated).x <= (d.c negated));
//! * Div c:    for c >= 2 with every coefficient divisible by c, derive
//!             (a/c).x <= floor(bound/c) (rounded division);
//! * Axiom j:  restate axiom j verbatim.
//!
//! A refutation ends in an arithmetically false line (all-zero coefficients,
//! negative bound). Tree-likeness means every line is used as a premise at most
//! once. Boolean axioms x_i <= 1 and -x_i <= 0 are available as implicit
//! axioms behind a flag (default on) using extended indices after the explicit
//! list: for a system with A axioms, index A + 2i - 1 is x_i <= 1 and A + 2i
//! is -x_i <= 0. No 0/1 assignment falsifies them, so they never appear as
//! KW-game answers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// An integer linear inequality coeffs . x <= bound (<=-normal form).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearInequality {
    pub coeffs: Vec<BigInt>,
    pub bound: BigInt,
}

impl LinearInequality {
    pub fn new(coeffs: Vec<BigInt>, bound: BigInt) -> Self {
        LinearInequality { coeffs, bound }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// True iff no assignment whatsoever satisfies it: all coefficients zero
    /// and a negative bound.
    pub fn is_false(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero) && self.bound.is_negative()
    }

    /// Exact evaluation under a 0/1 assignment.
    pub fn satisfied_by(&self, alpha: &[u8]) -> bool {
        assert_eq!(alpha.len(), self.n());
        let mut sum = BigInt::ZERO;
        for (a, &v) in self.coeffs.iter().zip(alpha) {
            if v == 1 {
                sum += a;
            }
        }
        sum <= self.bound
    }

    /// Space-separated "a_1 ... a_n c" token form (the file encoding).
    pub fn to_tokens(&self) -> String {
        let mut out = String::new();
        for a in &self.coeffs {
            out.push_str(&a.to_string());
            out.push(' ');
        }
        out.push_str(&self.bound.to_string());
        out
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (idx, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " {} ", if a.is_negative() { "-" } else { "+" })?;
            } else if a.is_negative() {
                write!(f, "-")?;
            }
            let mag = a.abs();
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            write!(f, "x{}", idx + 1)?;
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " <= {}", self.bound)
    }
}

/// An unsatisfiable(-to-be-refuted) system of inequalities over n variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    n: usize,
    axioms: Vec<LinearInequality>,
}

impl System {
    pub fn new(n: usize, axioms: Vec<LinearInequality>) -> Result<Self, ParseError> {
        if n == 0 {
            return Err(ParseError { line: 1, message: "variable count must be >= 1".into() });
        }
        for (idx, ax) in axioms.iter().enumerate() {
            if ax.n() != n {
                return Err(ParseError {
                    line: idx + 2,
                    message: format!("axiom has {} coefficients, system has n={n}", ax.n()),
                });
            }
        }
        Ok(System { n, axioms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axioms(&self) -> &[LinearInequality] {
        &self.axioms
    }

    /// Number of explicit axioms.
    pub fn axiom_count(&self) -> usize {
        self.axioms.len()
    }

    /// Highest valid axiom index, including implicit Boolean axioms if enabled.
    pub fn max_axiom_index(&self, implicit_bool: bool) -> usize {
        self.axioms.len() + if implicit_bool { 2 * self.n } else { 0 }
    }

    /// Resolves an axiom index (1-based). Indices beyond the explicit list
    /// address the implicit Boolean axioms when enabled: A + 2i - 1 is
    /// x_i <= 1 and A + 2i is -x_i <= 0.
    pub fn resolve_axiom(&self, j: usize, implicit_bool: bool) -> Option<LinearInequality> {
        if j == 0 {
            return None;
        }
        if j <= self.axioms.len() {
            return Some(self.axioms[j - 1].clone());
        }
        if !implicit_bool {
            return None;
        }
        let rel = j - self.axioms.len() - 1; // 0-based among the 2n boolean axioms
        if rel >= 2 * self.n {
            return None;
        }
        let var = rel / 2; // 0-based variable index
        let mut coeffs = vec![BigInt::ZERO; self.n];
        if rel % 2 == 0 {
            coeffs[var] = BigInt::one();
            Some(LinearInequality::new(coeffs, BigInt::one())) // x_i <= 1
        } else {
            coeffs[var] = -BigInt::one();
            Some(LinearInequality::new(coeffs, BigInt::ZERO)) // -x_i <= 0
        }
    }

    /// True iff the assignment satisfies every explicit axiom.
    pub fn satisfied_by(&self, alpha: &[u8]) -> bool {
        self.axioms.iter().all(|ax| ax.satisfied_by(alpha))
    }
}

/// True iff the inequality is arithmetically false (all-zero coefficients,
/// negative bound).
pub fn is_false_line(ineq: &LinearInequality) -> bool {
    ineq.is_false()
}

/// Derivation rule of a proof line. Premises are line ids (the Lk labels).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Axiom(usize),
    Add(usize, usize),
    Mul(BigInt, usize),
    Div(BigInt, usize),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Axiom(_) => "axiom",
            Rule::Add(..) => "add",
            Rule::Mul(..) => "mul",
            Rule::Div(..) => "div",
        }
    }

    /// Premise line ids referenced by this rule.
    pub fn premises(&self) -> Vec<usize> {
        match self {
            Rule::Axiom(_) => vec![],
            Rule::Add(i, j) => vec![*i, *j],
            Rule::Mul(_, i) | Rule::Div(_, i) => vec![*i],
        }
    }
}

/// One derivation line: its id (the k of Lk), the rule, and the stated result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub id: usize,
    pub rule: Rule,
    pub stated: LinearInequality,
}

/// An ordered list of derivation lines; the last line is the conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub lines: Vec<ProofLine>,
}

impl Proof {
    /// Number of lines (the size S of the refutation).
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Line-numbered parse failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn parse_int(tok: &str, line: usize) -> Result<BigInt, ParseError> {
    tok.parse::<BigInt>().map_err(|_| ParseError {
        line,
        message: format!("expected integer token, got {tok:?}"),
    })
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            None
        } else {
            Some((idx + 1, content))
        }
    })
}

/// Parses the system file format: first significant line is n, every further
/// line holds n+1 integers "a_1 ... a_n c". '#' starts a comment.
pub fn parse_system(text: &str) -> Result<System, ParseError> {
    let mut lines = significant_lines(text);
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| ParseError { line: 1, message: "missing variable count".into() })?;
    let n: usize = first.parse().map_err(|_| ParseError {
        line: first_no,
        message: format!("expected variable count, got {first:?}"),
    })?;
    if n == 0 {
        return Err(ParseError { line: first_no, message: "variable count must be >= 1".into() });
    }
    let mut axioms = Vec::new();
    for (line_no, content) in lines {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != n + 1 {
            return Err(ParseError {
                line: line_no,
                message: format!("expected {} integers, found {}", n + 1, toks.len()),
            });
        }
        let mut ints = Vec::with_capacity(n + 1);
        for tok in toks {
            ints.push(parse_int(tok, line_no)?);
        }
        let bound = ints.pop().expect("n+1 >= 2 tokens");
        axioms.push(LinearInequality::new(ints, bound));
    }
    Ok(System { n, axioms })
}

fn parse_line_ref(tok: &str, line: usize) -> Result<usize, ParseError> {
    let id = tok
        .strip_prefix('L')
        .and_then(|rest| rest.parse::<usize>().ok())
        .filter(|&id| id >= 1)
        .ok_or_else(|| ParseError {
            line,
            message: format!("expected a line reference like L3, got {tok:?}"),
        })?;
    Ok(id)
}

/// Parses the proof file format. Each significant line reads
/// `Lk: axiom <j> ; <ints>` | `Lk: add L<i> L<j> ; <ints>` |
/// `Lk: mul <d> L<i> ; <ints>` | `Lk: div <c> L<i> ; <ints>`
/// where `<ints>` is the stated inequality "a_1 ... a_n c".
pub fn parse_proof(text: &str) -> Result<Proof, ParseError> {
    let mut lines = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    for (line_no, content) in significant_lines(text) {
        let (head, stated_part) = content.split_once(';').ok_or_else(|| ParseError {
            line: line_no,
            message: "missing ';' before the stated inequality".into(),
        })?;
        let (label, rule_part) = head.split_once(':').ok_or_else(|| ParseError {
            line: line_no,
            message: "missing ':' after the line label".into(),
        })?;
        let id = parse_line_ref(label.trim(), line_no)?;
        if !seen_ids.insert(id) {
            return Err(ParseError { line: line_no, message: format!("duplicate line id L{id}") });
        }

        let toks: Vec<&str> = rule_part.split_whitespace().collect();
        let rule = match toks.as_slice() {
            ["axiom", j] => {
                let j: usize = j.parse().map_err(|_| ParseError {
                    line: line_no,
                    message: format!("expected axiom index, got {j:?}"),
                })?;
                Rule::Axiom(j)
            }
            ["add", p1, p2] => {
                Rule::Add(parse_line_ref(p1, line_no)?, parse_line_ref(p2, line_no)?)
            }
            ["mul", d, p] => Rule::Mul(parse_int(d, line_no)?, parse_line_ref(p, line_no)?),
            ["div", c, p] => Rule::Div(parse_int(c, line_no)?, parse_line_ref(p, line_no)?),
            [] => {
                return Err(ParseError { line: line_no, message: "missing rule".into() });
            }
            [other, ..] if !matches!(*other, "axiom" | "add" | "mul" | "div") => {
                return Err(ParseError {
                    line: line_no,
                    message: format!("unknown rule {other:?}"),
                });
            }
            _ => {
                return Err(ParseError {
                    line: line_no,
                    message: format!("malformed {:?} rule", toks[0]),
                });
            }
        };

        for p in rule.premises() {
            if p >= id {
                return Err(ParseError {
                    line: line_no,
                    message: format!("premise L{p} does not precede L{id}"),
                });
            }
        }

        let toks: Vec<&str> = stated_part.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(ParseError {
                line: line_no,
                message: "stated inequality needs at least one coefficient and a bound".into(),
            });
        }
        let mut ints = Vec::with_capacity(toks.len());
        for tok in toks {
            ints.push(parse_int(tok, line_no)?);
        }
        let bound = ints.pop().expect("at least 2 tokens");
        lines.push(ProofLine { id, rule, stated: LinearInequality::new(ints, bound) });
    }
    Ok(Proof { lines })
}

/// A rule violation found by the verifier, referencing the offending line id.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("L{line}: axiom index {index} out of range")]
    BadAxiomIndex { line: usize, index: usize },
    #[error("L{line}: stated inequality differs from axiom {index}")]
    AxiomMismatch { line: usize, index: usize },
    #[error("L{line}: premise L{premise} is not an earlier line")]
    BadPremise { line: usize, premise: usize },
    #[error("L{line}: {rule} derives {derived:?}, stated {stated:?}")]
    ArithmeticMismatch { line: usize, rule: &'static str, derived: String, stated: String },
    #[error("L{line}: coefficient {index} not divisible by {divisor}")]
    Divisibility { line: usize, index: usize, divisor: String },
    #[error("L{line}: mul scalar must be nonzero")]
    ZeroScalar { line: usize },
    #[error("L{line}: div divisor must be >= 2")]
    DivisorTooSmall { line: usize },
    #[error("L{line}: stated inequality has {got} coefficients, system has n={expected}")]
    WidthMismatch { line: usize, expected: usize, got: usize },
    #[error("L{line}: final line must be arithmetically false (0.x <= c with c < 0)")]
    FinalNotFalse { line: usize },
    #[error("L{line}: premise L{premise} already used — proof is not tree-like")]
    PremiseReused { line: usize, premise: usize },
    #[error("proof has no lines")]
    EmptyProof,
}

/// Verifier configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Require every line to be used as a premise at most once.
    pub require_tree: bool,
    /// Make the Boolean axioms x_i <= 1 and -x_i <= 0 referenceable.
    pub implicit_bool_axioms: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { require_tree: true, implicit_bool_axioms: true }
    }
}

/// Summary of a successful verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProofSummary {
    pub lines: usize,
    pub tree_like: bool,
}

/// Checks a single line against its resolved premises and the system.
pub fn check_line<'a>(
    line: &ProofLine,
    resolve: impl Fn(usize) -> Option<&'a LinearInequality>,
    system: &System,
    opts: &VerifyOptions,
) -> Result<(), Violation> {
    if line.stated.n() != system.n() {
        return Err(Violation::WidthMismatch {
            line: line.id,
            expected: system.n(),
            got: line.stated.n(),
        });
    }
    let fetch = |premise: usize| -> Result<&'a LinearInequality, Violation> {
        resolve(premise).ok_or(Violation::BadPremise { line: line.id, premise })
    };
    let derived = match &line.rule {
        Rule::Axiom(j) => {
            let ax = system
                .resolve_axiom(*j, opts.implicit_bool_axioms)
                .ok_or(Violation::BadAxiomIndex { line: line.id, index: *j })?;
            if ax != line.stated {
                return Err(Violation::AxiomMismatch { line: line.id, index: *j });
            }
            return Ok(());
        }
        Rule::Add(p1, p2) => {
            let a = fetch(*p1)?;
            let b = fetch(*p2)?;
            let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(u, v)| u + v).collect();
            LinearInequality::new(coeffs, &a.bound + &b.bound)
        }
        Rule::Mul(d, p) => {
            if d.is_zero() {
                return Err(Violation::ZeroScalar { line: line.id });
            }
            let a = fetch(*p)?;
            // d < 0 flips the inequality; re-normalized to <=-form this is
            // exactly scaling by |d|.
            let mag = d.abs();
            let coeffs = a.coeffs.iter().map(|u| u * &mag).collect();
            LinearInequality::new(coeffs, &a.bound * &mag)
        }
        Rule::Div(c, p) => {
            if c < &BigInt::from(2) {
                return Err(Violation::DivisorTooSmall { line: line.id });
            }
            let a = fetch(*p)?;
            for (idx, u) in a.coeffs.iter().enumerate() {
                if !u.is_multiple_of(c) {
                    return Err(Violation::Divisibility {
                        line: line.id,
                        index: idx + 1,
                        divisor: c.to_string(),
                    });
                }
            }
            let coeffs = a.coeffs.iter().map(|u| u / c).collect();
            LinearInequality::new(coeffs, a.bound.div_floor(c))
        }
    };
    if derived != line.stated {
        return Err(Violation::ArithmeticMismatch {
            line: line.id,
            rule: line.rule.name(),
            derived: derived.to_string(),
            stated: line.stated.to_string(),
        });
    }
    Ok(())
}

/// Verifies a whole proof: every line checks, premises resolve to earlier
/// lines, the final line is arithmetically false, and (when required) no line
/// is used as a premise twice. Reports the earliest failing line.
pub fn verify_proof(
    proof: &Proof,
    system: &System,
    opts: &VerifyOptions,
) -> Result<ProofSummary, Violation> {
    if proof.is_empty() {
        return Err(Violation::EmptyProof);
    }
    let mut by_id: std::collections::HashMap<usize, &LinearInequality> =
        std::collections::HashMap::with_capacity(proof.len());
    let mut use_counts: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut tree_like = true;

    for line in &proof.lines {
        for p in line.rule.premises() {
            // ids are unique and premises precede their line (parser-enforced),
            // so presence in by_id is exactly "earlier line".
            let count = use_counts.entry(p).or_insert(0);
            *count += 1;
            if *count > 1 {
                tree_like = false;
                if opts.require_tree {
                    return Err(Violation::PremiseReused { line: line.id, premise: p });
                }
            }
        }
        check_line(line, |id| by_id.get(&id).copied(), system, opts)?;
        by_id.insert(line.id, &line.stated);
    }

    let last = proof.lines.last().expect("non-empty proof");
    if !last.stated.is_false() {
        return Err(Violation::FinalNotFalse { line: last.id });
    }
    Ok(ProofSummary { lines: proof.len(), tree_like })
}
