//! Concept syntax: AST, concrete text form, parser, printer, negation normal
//! form, subconcept closure, and canonical keys for object identity.

use std::collections::VecDeque;
use std::fmt;

use indexmap::IndexSet;

use crate::error::{Error, Result};

/// Words with a fixed meaning in the concrete syntax; rejected as identifiers.
const RESERVED: [&str; 7] = ["top", "bot", "not", "and", "or", "some", "all"];

/// An ALC concept. `And`/`Or` are strictly binary; n-ary conjunctions are
/// expressed by nesting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bot,
    Name(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Concept {
        Concept::Name(n.into())
    }

    pub fn not(c: Concept) -> Concept {
        Concept::Not(Box::new(c))
    }

    pub fn and(l: Concept, r: Concept) -> Concept {
        Concept::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Concept, r: Concept) -> Concept {
        Concept::Or(Box::new(l), Box::new(r))
    }

    pub fn some(role: impl Into<String>, c: Concept) -> Concept {
        Concept::Exists(role.into(), Box::new(c))
    }

    pub fn all(role: impl Into<String>, c: Concept) -> Concept {
        Concept::Forall(role.into(), Box::new(c))
    }

    /// Number of constructor nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Bot | Concept::Name(_) => 1,
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => 1 + c.size(),
            Concept::And(l, r) | Concept::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// All subterms of `self` including itself, in preorder. Purely
    /// syntactic: no normalization, no negation closure.
    pub fn subterms(&self) -> Vec<&Concept> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            out.push(c);
            match c {
                Concept::Top | Concept::Bot | Concept::Name(_) => {}
                Concept::Not(x) | Concept::Exists(_, x) | Concept::Forall(_, x) => stack.push(x),
                Concept::And(l, r) | Concept::Or(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("top"),
            Concept::Bot => f.write_str("bot"),
            Concept::Name(n) => f.write_str(n),
            Concept::Not(c) => write!(f, "(not {c})"),
            Concept::And(l, r) => write!(f, "(and {l} {r})"),
            Concept::Or(l, r) => write!(f, "(or {l} {r})"),
            Concept::Exists(r, c) => write!(f, "(some {r} {c})"),
            Concept::Forall(r, c) => write!(f, "(all {r} {c})"),
        }
    }
}

/// A general concept inclusion, written `lhs => rhs` in ontology files.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gci {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Gci {
    /// The axiom read as a single concept, `(not lhs) or rhs`, unnormalized.
    pub fn clause(&self) -> Concept {
        Concept::or(Concept::not(self.lhs.clone()), self.rhs.clone())
    }
}

impl fmt::Display for Gci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

/// Declared concept and role names. Both sets are non-empty, names are
/// unique and case-sensitive, and the two namespaces do not overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    concepts: IndexSet<String>,
    roles: IndexSet<String>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn check_name(s: &str) -> Result<()> {
    if !valid_name(s) {
        return Err(Error::Signature(format!(
            "'{s}' is not a valid identifier (want [A-Za-z][A-Za-z0-9_-]*)"
        )));
    }
    if RESERVED.contains(&s) {
        return Err(Error::Signature(format!("'{s}' is a reserved word")));
    }
    Ok(())
}

impl Signature {
    pub fn new<C, R, S, T>(concepts: C, roles: R) -> Result<Signature>
    where
        C: IntoIterator<Item = S>,
        R: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut cs = IndexSet::new();
        for c in concepts {
            let c = c.into();
            check_name(&c)?;
            if !cs.insert(c.clone()) {
                return Err(Error::Signature(format!("duplicate concept name '{c}'")));
            }
        }
        let mut rs = IndexSet::new();
        for r in roles {
            let r = r.into();
            check_name(&r)?;
            if cs.contains(&r) {
                return Err(Error::Signature(format!(
                    "'{r}' declared as both a concept and a role"
                )));
            }
            if !rs.insert(r.clone()) {
                return Err(Error::Signature(format!("duplicate role name '{r}'")));
            }
        }
        if cs.is_empty() {
            return Err(Error::Signature("no concept names declared".into()));
        }
        if rs.is_empty() {
            return Err(Error::Signature("no role names declared".into()));
        }
        Ok(Signature { concepts: cs, roles: rs })
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(|s| s.as_str())
    }

    pub fn role_names(&self) -> impl Iterator<Item = &str> {
        self.roles.iter().map(|s| s.as_str())
    }

    pub fn has_concept(&self, name: &str) -> bool {
        self.concepts.contains(name)
    }

    pub fn has_role(&self, name: &str) -> bool {
        self.roles.contains(name)
    }

    /// Checks that every name and role in `c` is declared here.
    pub fn check_concept(&self, c: &Concept) -> Result<()> {
        for sub in c.subterms() {
            match sub {
                Concept::Name(n) if !self.has_concept(n) => {
                    return Err(Error::Signature(format!("undeclared concept name '{n}'")));
                }
                Concept::Exists(r, _) | Concept::Forall(r, _) if !self.has_role(r) => {
                    return Err(Error::Signature(format!("undeclared role name '{r}'")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Builds the smallest signature covering the given concepts, padding with a
/// fresh concept name or role when the concepts mention none. Used where an
/// explicit ontology is optional.
pub fn infer_signature(concepts: &[&Concept]) -> Signature {
    let mut names: IndexSet<String> = IndexSet::new();
    let mut roles: IndexSet<String> = IndexSet::new();
    for c in concepts {
        for sub in c.subterms() {
            match sub {
                Concept::Name(n) => {
                    names.insert(n.clone());
                }
                Concept::Exists(r, _) | Concept::Forall(r, _) => {
                    roles.insert(r.clone());
                }
                _ => {}
            }
        }
    }
    if names.is_empty() {
        for cand in ["A", "A0", "A1"] {
            if !roles.contains(cand) {
                names.insert(cand.to_string());
                break;
            }
        }
    }
    if roles.is_empty() {
        for cand in ["R", "R0", "R1"] {
            if !names.contains(cand) {
                roles.insert(cand.to_string());
                break;
            }
        }
    }
    Signature::new(names, roles).expect("inferred signature is well-formed by construction")
}

/// A finite set of GCIs over a signature. Axiom order is preserved; exact
/// duplicates are collapsed to the first occurrence.
#[derive(Debug, Clone)]
pub struct Ontology {
    signature: Signature,
    axioms: Vec<Gci>,
}

impl Ontology {
    pub fn new(signature: Signature, axioms: Vec<Gci>) -> Result<Ontology> {
        let mut seen = Vec::new();
        for ax in &axioms {
            signature.check_concept(&ax.lhs)?;
            signature.check_concept(&ax.rhs)?;
            if !seen.contains(ax) {
                seen.push(ax.clone());
            }
        }
        Ok(Ontology { signature, axioms: seen })
    }

    /// An ontology with no axioms over the given signature.
    pub fn empty(signature: Signature) -> Ontology {
        Ontology { signature, axioms: Vec::new() }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[Gci] {
        &self.axioms
    }

    /// Parses the line-oriented ontology format: `concepts:` and `roles:`
    /// declaration lines, one `<concept> => <concept>` axiom per line, and
    /// `#` comments. Declarations may appear anywhere in the file.
    pub fn parse(text: &str) -> Result<Ontology> {
        let mut concept_names: Vec<(String, usize)> = Vec::new();
        let mut role_names: Vec<(String, usize)> = Vec::new();
        let mut axiom_lines: Vec<(usize, &str)> = Vec::new();

        let mut offset = 0usize;
        for raw in text.split('\n') {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let trimmed = line.trim();
            let line_start = offset + (line.len() - line.trim_start().len());
            if trimmed.is_empty() {
                offset += raw.len() + 1;
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("concepts:") {
                for w in rest.split_whitespace() {
                    concept_names.push((w.to_string(), line_start));
                }
            } else if let Some(rest) = trimmed.strip_prefix("roles:") {
                for w in rest.split_whitespace() {
                    role_names.push((w.to_string(), line_start));
                }
            } else {
                axiom_lines.push((line_start, trimmed));
            }
            offset += raw.len() + 1;
        }

        for (n, pos) in concept_names.iter().chain(role_names.iter()) {
            check_name(n).map_err(|e| Error::Syntax { pos: *pos, msg: e.to_string() })?;
        }
        let signature = Signature::new(
            concept_names.into_iter().map(|(n, _)| n),
            role_names.into_iter().map(|(n, _)| n),
        )?;

        let mut axioms = Vec::new();
        for (pos, line) in axiom_lines {
            let Some(arrow) = line.find("=>") else {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("expected '<concept> => <concept>', got '{line}'"),
                });
            };
            if line[arrow + 2..].contains("=>") {
                return Err(Error::Syntax {
                    pos,
                    msg: "more than one '=>' on an axiom line".into(),
                });
            }
            let lhs = parse_concept_at(&line[..arrow], &signature, pos)?;
            let rhs = parse_concept_at(&line[arrow + 2..], &signature, pos + arrow + 2)?;
            axioms.push(Gci { lhs, rhs });
        }
        Ontology::new(signature, axioms)
    }

    /// A normalized rendering of the ontology: declarations first, then one
    /// axiom per line. Independent of the whitespace and comments of the
    /// source file; certificate hashes are computed over this text.
    pub fn canonical_text(&self) -> String {
        let mut out = String::from("concepts:");
        for c in self.signature.concept_names() {
            out.push(' ');
            out.push_str(c);
        }
        out.push_str("\nroles:");
        for r in self.signature.role_names() {
            out.push(' ');
            out.push_str(r);
        }
        out.push('\n');
        for ax in &self.axioms {
            out.push_str(&ax.to_string());
            out.push('\n');
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Ident(String),
}

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str, base: usize) -> Lexer<'a> {
        Lexer { input: input.as_bytes(), pos: 0, base }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token plus its byte position, or None at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize)>> {
        self.skip_ws();
        if self.pos >= self.input.len() {
            return Ok(None);
        }
        let at = self.base + self.pos;
        match self.input[self.pos] {
            b'(' => {
                self.pos += 1;
                Ok(Some((Tok::LParen, at)))
            }
            b')' => {
                self.pos += 1;
                Ok(Some((Tok::RParen, at)))
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.input.len() {
                    let c = self.input[self.pos];
                    if c.is_ascii_alphanumeric() || c == b'_' || c == b'-' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let word = std::str::from_utf8(&self.input[start..self.pos])
                    .expect("ascii range")
                    .to_string();
                Ok(Some((Tok::Ident(word), at)))
            }
            other => Err(Error::Syntax {
                pos: at,
                msg: format!("unexpected character '{}'", other as char),
            }),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    sig: Option<&'a Signature>,
}

impl<'a> Parser<'a> {
    fn next_tok(&mut self) -> Result<(Tok, usize)> {
        match self.lexer.next()? {
            Some(t) => Ok(t),
            None => Err(Error::Syntax {
                pos: self.lexer.base + self.lexer.pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn concept(&mut self) -> Result<Concept> {
        let (tok, pos) = self.next_tok()?;
        match tok {
            Tok::Ident(w) => match w.as_str() {
                "top" => Ok(Concept::Top),
                "bot" => Ok(Concept::Bot),
                _ if RESERVED.contains(&w.as_str()) => Err(Error::Syntax {
                    pos,
                    msg: format!("reserved word '{w}' cannot stand alone"),
                }),
                _ => {
                    if let Some(sig) = self.sig {
                        if !sig.has_concept(&w) {
                            return Err(Error::Undeclared {
                                kind: "concept name",
                                name: w,
                                pos,
                            });
                        }
                    }
                    Ok(Concept::Name(w))
                }
            },
            Tok::LParen => {
                let (op, op_pos) = self.next_tok()?;
                let Tok::Ident(op) = op else {
                    return Err(Error::Syntax {
                        pos: op_pos,
                        msg: "expected an operator after '('".into(),
                    });
                };
                let c = match op.as_str() {
                    "not" => Concept::not(self.concept()?),
                    "and" => {
                        let l = self.concept()?;
                        Concept::and(l, self.concept()?)
                    }
                    "or" => {
                        let l = self.concept()?;
                        Concept::or(l, self.concept()?)
                    }
                    "some" => {
                        let r = self.role()?;
                        Concept::Exists(r, Box::new(self.concept()?))
                    }
                    "all" => {
                        let r = self.role()?;
                        Concept::Forall(r, Box::new(self.concept()?))
                    }
                    other => {
                        return Err(Error::Syntax {
                            pos: op_pos,
                            msg: format!("unknown operator '{other}'"),
                        });
                    }
                };
                let (close, close_pos) = self.next_tok()?;
                if close != Tok::RParen {
                    return Err(Error::Syntax {
                        pos: close_pos,
                        msg: "expected ')'".into(),
                    });
                }
                Ok(c)
            }
            Tok::RParen => Err(Error::Syntax {
                pos,
                msg: "unexpected ')'".into(),
            }),
        }
    }

    fn role(&mut self) -> Result<String> {
        let (tok, pos) = self.next_tok()?;
        let Tok::Ident(w) = tok else {
            return Err(Error::Syntax {
                pos,
                msg: "expected a role name".into(),
            });
        };
        if RESERVED.contains(&w.as_str()) {
            return Err(Error::Syntax {
                pos,
                msg: format!("reserved word '{w}' cannot be a role name"),
            });
        }
        if let Some(sig) = self.sig {
            if !sig.has_role(&w) {
                return Err(Error::Undeclared {
                    kind: "role name",
                    name: w,
                    pos,
                });
            }
        }
        Ok(w)
    }

    fn finish(mut self, c: Concept) -> Result<Concept> {
        if let Some((_, pos)) = self.lexer.next()? {
            return Err(Error::Syntax {
                pos,
                msg: "trailing input after concept".into(),
            });
        }
        Ok(c)
    }
}

fn parse_with(text: &str, sig: Option<&Signature>, base: usize) -> Result<Concept> {
    let mut p = Parser { lexer: Lexer::new(text, base), sig };
    let c = p.concept()?;
    p.finish(c)
}

/// Parses a concept, requiring every identifier to be declared in `sig`.
pub fn parse_concept(text: &str, sig: &Signature) -> Result<Concept> {
    parse_with(text, Some(sig), 0)
}

fn parse_concept_at(text: &str, sig: &Signature, base: usize) -> Result<Concept> {
    parse_with(text, Some(sig), base)
}

/// Parses a concept without a signature; any well-formed identifier is
/// accepted. Pair with [`infer_signature`] when no ontology is at hand.
pub fn parse_concept_loose(text: &str) -> Result<Concept> {
    parse_with(text, None, 0)
}

// ---------------------------------------------------------------------------
// Negation normal form

/// Pushes negation down to concept names: De Morgan over and/or, duality
/// over some/all, double negations eliminated, `(not top)` and `(not bot)`
/// folded to `bot` and `top`. Idempotent, semantics-preserving.
pub fn nnf(c: &Concept) -> Concept {
    match c {
        Concept::Top | Concept::Bot | Concept::Name(_) => c.clone(),
        Concept::And(l, r) => Concept::and(nnf(l), nnf(r)),
        Concept::Or(l, r) => Concept::or(nnf(l), nnf(r)),
        Concept::Exists(role, f) => Concept::Exists(role.clone(), Box::new(nnf(f))),
        Concept::Forall(role, f) => Concept::Forall(role.clone(), Box::new(nnf(f))),
        Concept::Not(inner) => match &**inner {
            Concept::Top => Concept::Bot,
            Concept::Bot => Concept::Top,
            Concept::Name(_) => c.clone(),
            Concept::Not(d) => nnf(d),
            Concept::And(l, r) => Concept::or(
                nnf(&Concept::not((**l).clone())),
                nnf(&Concept::not((**r).clone())),
            ),
            Concept::Or(l, r) => Concept::and(
                nnf(&Concept::not((**l).clone())),
                nnf(&Concept::not((**r).clone())),
            ),
            Concept::Exists(role, f) => Concept::Forall(
                role.clone(),
                Box::new(nnf(&Concept::not((**f).clone()))),
            ),
            Concept::Forall(role, f) => Concept::Exists(
                role.clone(),
                Box::new(nnf(&Concept::not((**f).clone()))),
            ),
        },
    }
}

/// Complement in NNF: `nnf(not c)`. The tableau clash check and several
/// category rules pair a concept with this form.
pub fn nnf_complement(c: &Concept) -> Concept {
    nnf(&Concept::not(c.clone()))
}

// ---------------------------------------------------------------------------
// Subconcept closure

/// The NNF subconcept closure of `c0` under the ontology's axioms: seeds
/// `nnf(c0)` and `nnf((not E) or F)` for each axiom `E => F`, then closes
/// under taking immediate children (the child of a negation is the
/// unnegated concept). Insertion order is deterministic: seeds first, then
/// a breadth-first sweep.
pub fn sub_closure(c0: &Concept, onto: &Ontology) -> IndexSet<Concept> {
    let mut set: IndexSet<Concept> = IndexSet::new();
    let mut queue: VecDeque<Concept> = VecDeque::new();
    let push = |c: Concept, set: &mut IndexSet<Concept>, queue: &mut VecDeque<Concept>| {
        if set.insert(c.clone()) {
            queue.push_back(c);
        }
    };
    push(nnf(c0), &mut set, &mut queue);
    for ax in onto.axioms() {
        push(nnf(&ax.clause()), &mut set, &mut queue);
    }
    while let Some(c) = queue.pop_front() {
        match &c {
            Concept::Top | Concept::Bot | Concept::Name(_) => {}
            Concept::Not(inner) => push((**inner).clone(), &mut set, &mut queue),
            Concept::And(l, r) | Concept::Or(l, r) => {
                push((**l).clone(), &mut set, &mut queue);
                push((**r).clone(), &mut set, &mut queue);
            }
            Concept::Exists(_, f) | Concept::Forall(_, f) => {
                push((**f).clone(), &mut set, &mut queue);
            }
        }
    }
    set
}

// ---------------------------------------------------------------------------
// Canonicalization

/// Reorders the operands of every `and`/`or` so the printed form of the left
/// operand is byte-lexicographically ≤ the right. Nothing else changes: no
/// flattening, no idempotence collapse, `(and A A)` survives. Two concepts
/// are "the same object" exactly when their canonical forms are equal.
pub fn canonicalize(c: &Concept) -> Concept {
    match c {
        Concept::Top | Concept::Bot | Concept::Name(_) => c.clone(),
        Concept::Not(x) => Concept::not(canonicalize(x)),
        Concept::Exists(role, f) => Concept::Exists(role.clone(), Box::new(canonicalize(f))),
        Concept::Forall(role, f) => Concept::Forall(role.clone(), Box::new(canonicalize(f))),
        Concept::And(l, r) | Concept::Or(l, r) => {
            let a = canonicalize(l);
            let b = canonicalize(r);
            let (a, b) = if a.to_string() <= b.to_string() { (a, b) } else { (b, a) };
            match c {
                Concept::And(..) => Concept::and(a, b),
                _ => Concept::or(a, b),
            }
        }
    }
}

/// Total-order key identifying a concept up to operand order: the printed
/// canonical form. Stable across runs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonical_key(c: &Concept) -> CanonicalKey {
    CanonicalKey(canonicalize(c).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["A", "B", "C"], ["R", "S"]).unwrap()
    }

    fn p(text: &str) -> Concept {
        parse_concept(text, &sig()).unwrap()
    }

    #[test]
    fn parses_atoms_and_compounds() {
        assert_eq!(p("A"), Concept::name("A"));
        assert_eq!(p("top"), Concept::Top);
        assert_eq!(p("bot"), Concept::Bot);
        assert_eq!(
            p("(and A (not A))"),
            Concept::and(Concept::name("A"), Concept::not(Concept::name("A")))
        );
        assert_eq!(
            p("(some R (or A B))"),
            Concept::some("R", Concept::or(Concept::name("A"), Concept::name("B")))
        );
    }

    #[test]
    fn parser_is_whitespace_insensitive() {
        assert_eq!(p("(and A(not A))"), p("  ( and   A ( not A ) )  "));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_concept("(and A", &sig()) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_concept("(and A B) C", &sig()) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("expected trailing-input error, got {other:?}"),
        }
        match parse_concept("(xor A B)", &sig()) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 1),
            other => panic!("expected unknown-operator error, got {other:?}"),
        }
        match parse_concept("%", &sig()) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("expected bad-character error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_identifiers_are_rejected() {
        match parse_concept("(some R X)", &sig()) {
            Err(Error::Undeclared { kind, name, pos }) => {
                assert_eq!(kind, "concept name");
                assert_eq!(name, "X");
                assert_eq!(pos, 8);
            }
            other => panic!("expected undeclared error, got {other:?}"),
        }
        match parse_concept("(some Q A)", &sig()) {
            Err(Error::Undeclared { kind, name, .. }) => {
                assert_eq!(kind, "role name");
                assert_eq!(name, "Q");
            }
            other => panic!("expected undeclared error, got {other:?}"),
        }
        // The loose parser accepts any well-formed identifier.
        assert!(parse_concept_loose("(some Q X)").is_ok());
    }

    #[test]
    fn reserved_words_are_not_identifiers() {
        assert!(parse_concept("(some top A)", &sig()).is_err());
        assert!(parse_concept("(and or A)", &sig()).is_err());
        assert!(Signature::new(["not"], ["R"]).is_err());
        assert!(Signature::new(["A"], ["all"]).is_err());
    }

    #[test]
    fn printing_round_trips() {
        assert_eq!(Concept::Top.to_string(), "top");
        assert_eq!(Concept::not(Concept::name("A")).to_string(), "(not A)");
        assert_eq!(Concept::all("R", Concept::Bot).to_string(), "(all R bot)");
        for text in [
            "A",
            "(and A (not A))",
            "(some R (or A B))",
            "(all S (and top (not (some R bot))))",
        ] {
            let c = p(text);
            assert_eq!(parse_concept(&c.to_string(), &sig()).unwrap(), c);
        }
    }

    #[test]
    fn signature_invariants() {
        assert!(Signature::new(Vec::<String>::new(), vec!["R".to_string()]).is_err());
        assert!(Signature::new(vec!["A".to_string()], Vec::<String>::new()).is_err());
        assert!(Signature::new(["A", "A"], ["R"]).is_err());
        assert!(Signature::new(["A"], ["A"]).is_err());
        assert!(Signature::new(["1A"], ["R"]).is_err());
        assert!(Signature::new(["A-b_2"], ["R"]).is_ok());
    }

    #[test]
    fn nnf_examples() {
        let a = || Concept::name("A");
        let b = || Concept::name("B");
        assert_eq!(
            nnf(&Concept::not(Concept::and(a(), b()))),
            Concept::or(Concept::not(a()), Concept::not(b()))
        );
        assert_eq!(nnf(&Concept::not(Concept::not(a()))), a());
        assert_eq!(
            nnf(&Concept::not(Concept::some("R", a()))),
            Concept::all("R", Concept::not(a()))
        );
        assert_eq!(nnf(&Concept::not(Concept::Top)), Concept::Bot);
        assert_eq!(nnf(&Concept::not(Concept::Bot)), Concept::Top);
        // Nested: not (or A (all R (not (not B)))) pushes all the way down.
        let c = Concept::not(Concept::or(a(), Concept::all("R", Concept::not(Concept::not(b())))));
        assert_eq!(
            nnf(&c),
            Concept::and(Concept::not(a()), Concept::some("R", Concept::not(b())))
        );
        assert_eq!(nnf(&nnf(&c)), nnf(&c));
    }

    #[test]
    fn closure_examples() {
        let s = sig();
        let empty = Ontology::empty(s.clone());
        let a = || Concept::name("A");
        let b = || Concept::name("B");

        let got: Vec<Concept> = sub_closure(&a(), &empty).into_iter().collect();
        assert_eq!(got, vec![a()]);

        let got: Vec<Concept> = sub_closure(&Concept::and(a(), b()), &empty).into_iter().collect();
        assert_eq!(got, vec![Concept::and(a(), b()), a(), b()]);

        let onto = Ontology::new(s, vec![Gci { lhs: a(), rhs: b() }]).unwrap();
        let got: Vec<Concept> = sub_closure(&Concept::some("R", a()), &onto).into_iter().collect();
        assert_eq!(
            got,
            vec![
                Concept::some("R", a()),
                Concept::or(Concept::not(a()), b()),
                a(),
                Concept::not(a()),
                b(),
            ]
        );
    }

    #[test]
    fn closure_members_are_nnf_and_closed() {
        let s = sig();
        let onto = Ontology::new(
            s,
            vec![Gci {
                lhs: Concept::not(Concept::and(Concept::name("A"), Concept::name("B"))),
                rhs: Concept::some("R", Concept::not(Concept::not(Concept::name("C")))),
            }],
        )
        .unwrap();
        let c0 = Concept::not(Concept::some("R", Concept::and(Concept::name("A"), Concept::Top)));
        let set = sub_closure(&c0, &onto);
        for c in &set {
            assert_eq!(nnf(c), *c, "closure member not in NNF: {c}");
        }
        // Closed: every child of a member is a member.
        for c in &set {
            let children: Vec<Concept> = match c {
                Concept::Not(x) => vec![(**x).clone()],
                Concept::And(l, r) | Concept::Or(l, r) => vec![(**l).clone(), (**r).clone()],
                Concept::Exists(_, f) | Concept::Forall(_, f) => vec![(**f).clone()],
                _ => vec![],
            };
            for ch in children {
                assert!(set.contains(&ch), "closure misses {ch}");
            }
        }
    }

    #[test]
    fn canonical_keys_identify_commuted_operands() {
        let a = || Concept::name("A");
        let b = || Concept::name("B");
        assert_eq!(
            canonical_key(&Concept::and(a(), b())),
            canonical_key(&Concept::and(b(), a()))
        );
        assert_ne!(
            canonical_key(&Concept::and(a(), b())),
            canonical_key(&Concept::or(a(), b()))
        );
        assert_ne!(
            canonical_key(&a()),
            canonical_key(&Concept::not(Concept::not(a())))
        );
        assert_eq!(
            canonical_key(&nnf(&a())),
            canonical_key(&nnf(&Concept::not(Concept::not(a()))))
        );
        // '(' sorts below any letter, so the negation lands on the left.
        assert_eq!(
            canonicalize(&Concept::and(a(), Concept::not(a()))),
            Concept::and(Concept::not(a()), a())
        );
        // No collapse of duplicate operands.
        assert_eq!(canonicalize(&Concept::and(a(), a())), Concept::and(a(), a()));
    }

    #[test]
    fn canonicalize_is_recursive_and_idempotent() {
        let c = Concept::some(
            "R",
            Concept::or(
                Concept::and(Concept::name("C"), Concept::name("B")),
                Concept::name("A"),
            ),
        );
        let canon = canonicalize(&c);
        assert_eq!(canon.to_string(), "(some R (or (and B C) A))");
        assert_eq!(canonicalize(&canon), canon);
    }

    #[test]
    fn ontology_parse_and_canonical_text() {
        let text = "\n# meeting domain\nconcepts: A B C\nroles: R S\n\nA => B  # comment\n(and A B) => (some R C)\nA => B\n";
        let onto = Ontology::parse(text).unwrap();
        assert_eq!(onto.axioms().len(), 2, "duplicate axiom must collapse");
        assert_eq!(
            onto.canonical_text(),
            "concepts: A B C\nroles: R S\nA => B\n(and A B) => (some R C)\n"
        );
        // Reparsing the canonical text is a fixpoint.
        let again = Ontology::parse(&onto.canonical_text()).unwrap();
        assert_eq!(again.canonical_text(), onto.canonical_text());
    }

    #[test]
    fn ontology_parse_errors() {
        assert!(Ontology::parse("concepts: A\nroles: R\nA = B\n").is_err());
        assert!(Ontology::parse("concepts: A\nroles: R\nA => B => A\n").is_err());
        assert!(Ontology::parse("concepts: A\nroles: R\nA => X\n").is_err());
        assert!(Ontology::parse("concepts: A\nA => A\n").is_err(), "no roles declared");
        match Ontology::parse("concepts: A\nroles: R\nB => A\n") {
            Err(Error::Undeclared { name, pos, .. }) => {
                assert_eq!(name, "B");
                assert_eq!(pos, 21);
            }
            other => panic!("expected undeclared error, got {other:?}"),
        }
    }

    #[test]
    fn inferred_signatures_are_padded() {
        let c = parse_concept_loose("(some R (and X Y))").unwrap();
        let s = infer_signature(&[&c]);
        assert!(s.has_concept("X") && s.has_concept("Y") && s.has_role("R"));
        let s = infer_signature(&[&Concept::Top]);
        assert!(s.has_concept("A") && s.has_role("R"));
        let s = infer_signature(&[&parse_concept_loose("X").unwrap()]);
        assert!(s.has_role("R"));
    }

    #[test]
    fn closure_size_respects_linear_bound() {
        let s = sig();
        let onto = Ontology::new(
            s,
            vec![
                Gci {
                    lhs: Concept::name("A"),
                    rhs: Concept::some("R", Concept::name("B")),
                },
                Gci {
                    lhs: Concept::some("R", Concept::name("B")),
                    rhs: Concept::not(Concept::name("C")),
                },
            ],
        )
        .unwrap();
        let c0 = Concept::and(
            Concept::not(Concept::some("R", Concept::name("A"))),
            Concept::all("S", Concept::or(Concept::name("B"), Concept::name("C"))),
        );
        let bound = 2 * (c0.size()
            + onto.axioms().iter().map(|ax| ax.clause().size()).sum::<usize>());
        assert!(sub_closure(&c0, &onto).len() <= bound);
    }
}
