//! Text syntax for formulae and modality expressions.
//!
//! ```text
//! formula  := imp
//! imp      := or ('->' imp)?
//! or       := and ('|' and)*
//! and      := not ('&' not)*
//! not      := '!' not | atom
//! atom     := 'T' ('@' object)? | 'true' | 'false'
//!           | '(' '&' formula (',' formula)* ')' | '(' formula ')'
//!           | '<' modality '>' args? | '@' morphism-atom '(' formula ')'
//!           | name params? postfix* args?
//! modality := conj ('.' conj)*
//! conj     := neg ('&' neg)*
//! neg      := '!' neg | post
//! post     := matom ('^' morphism-atom | '@' int '/' int)*
//! matom    := name params? | '(' '&' modality (',' modality)* ')' | '(' modality ')'
//! morphism := mterm ('.' mterm)*          composition, `g . f` applies f first
//! mterm    := morphism-atom ('*' morphism-atom)*
//! morphism-atom := 'id' '[' word ']' | name params? | '(' morphism ')'
//! params   := '[' param, ... ']' | '{' param, ... '}'
//! ```
//!
//! A call `name(φ)` is an adaptation when `name` is a morphism generator of
//! the signature, otherwise a modality application. The derived modalities
//! `dreq[p,r]`, `qdeq[p,r,A]`, `P[A]`, `certain[r,A]` and
//! `measure[A,r1,..,rk]` expand into their definitions.

use super::ast::{Formula, ModalityExpr};
use super::typing::{type_of_formula, type_of_modality};
use crate::error::{FormulaError, ParseError, TypeError};
use crate::signature::{FibMorphism, FibObject, FibredSignature, MorphismRef, Param};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Comma,
    Amp,
    Pipe,
    Bang,
    Caret,
    Dot,
    Star,
    At,
    Slash,
    Arrow,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(x) => format!("number {x}"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            push(Tok::Ident(s));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let value = s.parse::<f64>().map_err(|e| ParseError {
                line: start_line,
                column: start_col,
                message: format!("bad number `{s}`: {e}"),
            })?;
            push(Tok::Num(value));
            continue;
        }
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            ',' => (Tok::Comma, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Pipe, 1),
            '!' => (Tok::Bang, 1),
            '^' => (Tok::Caret, 1),
            '.' => (Tok::Dot, 1),
            '*' => (Tok::Star, 1),
            '@' => (Tok::At, 1),
            '/' => (Tok::Slash, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '-' => (Tok::Minus, 1),
            other => {
                return Err(ParseError {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        push(tok);
        i += width;
        col += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// Formula before fibres of bare `T` are inferred.
#[derive(Clone, Debug)]
enum Surface {
    Top(Option<FibObject>),
    Neg(Box<Surface>),
    Conj(Vec<Surface>),
    Adapt(FibMorphism, Box<Surface>),
    Apply(ModalityExpr, Vec<Surface>),
}

impl Surface {
    fn not(s: Surface) -> Surface {
        Surface::Neg(Box::new(s))
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a FibredSignature,
}

type PResult<T> = Result<T, FormulaError>;

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a FibredSignature) -> Result<Self, ParseError> {
        Ok(Self {
            toks: lex(text)?,
            pos: 0,
            sig,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        let s = &self.toks[self.pos];
        FormulaError::Parse(ParseError {
            line: s.line,
            column: s.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            other => {
                self.pos -= 1;
                Err(self.error(format!("expected a name, found {}", other.describe())))
            }
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }

    // ---- parameters, objects, morphisms ----

    fn params(&mut self) -> PResult<Vec<Param>> {
        let close = match self.peek() {
            Tok::LBrack => Tok::RBrack,
            Tok::LBrace => Tok::RBrace,
            _ => return Ok(Vec::new()),
        };
        self.bump();
        let mut out = Vec::new();
        if self.eat(&close) {
            return Ok(out);
        }
        loop {
            out.push(self.param()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(close.clone())?;
            return Ok(out);
        }
    }

    fn param(&mut self) -> PResult<Param> {
        let negative = self.eat(&Tok::Minus);
        match self.bump() {
            Tok::Num(x) => Ok(Param::Num(if negative { -x } else { x })),
            Tok::Ident(s) if !negative => Ok(Param::Name(s)),
            other => {
                self.pos -= 1;
                Err(self.error(format!("expected a parameter, found {}", other.describe())))
            }
        }
    }

    fn object_word(&mut self) -> PResult<FibObject> {
        let mut word = Vec::new();
        loop {
            let name = self.ident()?;
            if name != "I" {
                word.push(name);
            }
            if !self.eat(&Tok::Star) {
                return Ok(FibObject::from_word(word));
            }
        }
    }

    fn object_atom(&mut self) -> PResult<FibObject> {
        if self.eat(&Tok::LParen) {
            let o = self.object_word()?;
            self.expect(Tok::RParen)?;
            Ok(o)
        } else {
            let name = self.ident()?;
            Ok(if name == "I" {
                FibObject::unit()
            } else {
                FibObject::generator(name)
            })
        }
    }

    fn morphism(&mut self) -> PResult<FibMorphism> {
        let mut m = self.morphism_term()?;
        while self.eat(&Tok::Dot) {
            let f = self.morphism_term()?;
            m = FibMorphism::Compose(Box::new(m), Box::new(f));
        }
        Ok(m)
    }

    fn morphism_term(&mut self) -> PResult<FibMorphism> {
        let mut m = self.morphism_atom()?;
        while self.eat(&Tok::Star) {
            let g = self.morphism_atom()?;
            m = FibMorphism::Tensor(Box::new(m), Box::new(g));
        }
        Ok(m)
    }

    fn morphism_atom(&mut self) -> PResult<FibMorphism> {
        if self.eat(&Tok::LParen) {
            let m = self.morphism()?;
            self.expect(Tok::RParen)?;
            return Ok(m);
        }
        let name = self.ident()?;
        if name == "id" && *self.peek() == Tok::LBrack {
            self.bump();
            let o = self.object_word()?;
            self.expect(Tok::RBrack)?;
            return Ok(FibMorphism::Id(o));
        }
        let params = self.params()?;
        Ok(FibMorphism::Gen(MorphismRef::new(name, params)))
    }

    // ---- modality expressions ----

    fn modality(&mut self) -> PResult<ModalityExpr> {
        let mut m = self.modality_conj()?;
        while self.eat(&Tok::Dot) {
            let next = self.modality_conj()?;
            m = ModalityExpr::then(m, next);
        }
        Ok(m)
    }

    fn modality_conj(&mut self) -> PResult<ModalityExpr> {
        let first = self.modality_neg()?;
        if *self.peek() != Tok::Amp {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat(&Tok::Amp) {
            items.push(self.modality_neg()?);
        }
        Ok(ModalityExpr::Conj(items))
    }

    fn modality_neg(&mut self) -> PResult<ModalityExpr> {
        if self.eat(&Tok::Bang) {
            Ok(ModalityExpr::neg(self.modality_neg()?))
        } else {
            let atom = self.modality_atom()?;
            self.modality_postfix(atom)
        }
    }

    fn modality_postfix(&mut self, mut m: ModalityExpr) -> PResult<ModalityExpr> {
        loop {
            match self.peek() {
                Tok::Caret => {
                    self.bump();
                    let f = self.morphism_atom()?;
                    m = ModalityExpr::superscript(m, f);
                }
                Tok::At if matches!(self.peek_at(1), Tok::Num(_)) => {
                    self.bump();
                    let index = self.integer()?;
                    self.expect(Tok::Slash)?;
                    let arity = self.integer()?;
                    m = ModalityExpr::weaken(m, arity, index);
                }
                _ => return Ok(m),
            }
        }
    }

    fn integer(&mut self) -> PResult<usize> {
        match self.bump() {
            Tok::Num(x) if x >= 0.0 && x.fract() == 0.0 => Ok(x as usize),
            other => {
                self.pos -= 1;
                Err(self.error(format!("expected a natural number, found {}", other.describe())))
            }
        }
    }

    fn modality_atom(&mut self) -> PResult<ModalityExpr> {
        if self.eat(&Tok::LParen) {
            if self.eat(&Tok::Amp) {
                let mut items = vec![self.modality()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.modality()?);
                }
                self.expect(Tok::RParen)?;
                return Ok(ModalityExpr::Conj(items));
            }
            let m = self.modality()?;
            self.expect(Tok::RParen)?;
            return Ok(m);
        }
        let name = self.ident()?;
        let params = self.params()?;
        Ok(resolve_modality_name(self.sig, &name, params)?)
    }

    // ---- formulae ----

    fn formula(&mut self) -> PResult<Surface> {
        let lhs = self.formula_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            // a -> b  :=  !(a & !b)
            return Ok(Surface::not(Surface::Conj(vec![lhs, Surface::not(rhs)])));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> PResult<Surface> {
        let first = self.formula_and()?;
        if *self.peek() != Tok::Pipe {
            return Ok(first);
        }
        let mut items = vec![Surface::not(first)];
        while self.eat(&Tok::Pipe) {
            items.push(Surface::not(self.formula_and()?));
        }
        Ok(Surface::not(Surface::Conj(items)))
    }

    fn formula_and(&mut self) -> PResult<Surface> {
        let first = self.formula_not()?;
        if *self.peek() != Tok::Amp {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat(&Tok::Amp) {
            items.push(self.formula_not()?);
        }
        Ok(Surface::Conj(items))
    }

    fn formula_not(&mut self) -> PResult<Surface> {
        if self.eat(&Tok::Bang) {
            Ok(Surface::not(self.formula_not()?))
        } else {
            self.formula_atom()
        }
    }

    fn args(&mut self) -> PResult<Vec<Surface>> {
        if !self.eat(&Tok::LParen) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RParen)?;
            return Ok(out);
        }
    }

    fn formula_atom(&mut self) -> PResult<Surface> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::Amp) {
                    if *self.peek() == Tok::RParen {
                        return Err(self.error("conjunction needs at least one conjunct"));
                    }
                    let mut items = vec![self.formula()?];
                    while self.eat(&Tok::Comma) {
                        items.push(self.formula()?);
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(Surface::Conj(items));
                }
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Lt => {
                self.bump();
                let m = self.modality()?;
                self.expect(Tok::Gt)?;
                let args = self.args()?;
                Ok(Surface::Apply(m, args))
            }
            Tok::At => {
                self.bump();
                let f = self.morphism_atom()?;
                self.expect(Tok::LParen)?;
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(Surface::Adapt(f, Box::new(inner)))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "T" => {
                        if self.eat(&Tok::At) {
                            let o = self.object_atom()?;
                            return Ok(Surface::Top(Some(o)));
                        }
                        return Ok(Surface::Top(None));
                    }
                    "true" => return Ok(Surface::Top(None)),
                    "false" => return Ok(Surface::not(Surface::Top(None))),
                    _ => {}
                }
                let params = self.params()?;
                let has_postfix = matches!(self.peek(), Tok::Caret)
                    || (*self.peek() == Tok::At && matches!(self.peek_at(1), Tok::Num(_)));
                if !has_postfix && self.sig.has_morphism(&name) && *self.peek() == Tok::LParen {
                    self.bump();
                    let inner = self.formula()?;
                    self.expect(Tok::RParen)?;
                    let f = FibMorphism::Gen(MorphismRef::new(name, params));
                    return Ok(Surface::Adapt(f, Box::new(inner)));
                }
                let base = resolve_modality_name(self.sig, &name, params)?;
                let m = self.modality_postfix(base)?;
                let args = self.args()?;
                Ok(Surface::Apply(m, args))
            }
            other => Err(self.error(format!("unexpected {}", other.describe()))),
        }
    }
}

fn base_modality(sig: &FibredSignature, name: &str, params: Vec<Param>) -> Result<ModalityExpr, TypeError> {
    let hits = sig.lookup_modality(name);
    match hits.as_slice() {
        [(fibre, _)] => Ok(ModalityExpr::base(name, params, (*fibre).clone())),
        [] => Err(TypeError::new("", "declared modality", format!("undeclared symbol `{name}`"))),
        _ => Err(TypeError::new(
            "",
            "modality declared at a single fibre",
            format!("`{name}` declared at {} fibres", hits.len()),
        )),
    }
}

fn arity_error(name: &str, expected: &str, params: &[Param]) -> TypeError {
    TypeError::new(
        "",
        format!("`{name}` parameters {expected}"),
        format!("{} parameter(s)", params.len()),
    )
}

/// `dreq[p,r] = detcert[r] . deq[p]`
pub fn dreq_expr(sig: &FibredSignature, p: Param, r: Param) -> Result<ModalityExpr, TypeError> {
    Ok(ModalityExpr::then(
        base_modality(sig, "detcert", vec![r])?,
        base_modality(sig, "deq", vec![p])?,
    ))
}

/// `qdeq[p,r,A] = dreq[p,r]^ev[A]`
pub fn qdeq_expr(sig: &FibredSignature, p: Param, r: Param, obs: Param) -> Result<ModalityExpr, TypeError> {
    Ok(ModalityExpr::superscript(
        dreq_expr(sig, p, r)?,
        FibMorphism::gen("ev", vec![obs]),
    ))
}

/// `P[A] = top . qdeq[1,1,A]`: certainty of a positive outcome.
pub fn projcert_expr(sig: &FibredSignature, obs: Param) -> Result<ModalityExpr, TypeError> {
    Ok(ModalityExpr::then(
        base_modality(sig, "top", vec![])?,
        qdeq_expr(sig, Param::Num(1.0), Param::Num(1.0), obs)?,
    ))
}

/// `certain[r,A] = neg . qdeq[0,r,A]`
pub fn qdcert_expr(sig: &FibredSignature, r: Param, obs: Param) -> Result<ModalityExpr, TypeError> {
    Ok(ModalityExpr::then(
        base_modality(sig, "neg", vec![])?,
        qdeq_expr(sig, Param::Num(0.0), r, obs)?,
    ))
}

/// `measure[A, r1..rk] = ⋀_i certain[r_i, A]@i/k`
pub fn polyadic_expr(sig: &FibredSignature, obs: Param, outcomes: &[Param]) -> Result<ModalityExpr, TypeError> {
    let k = outcomes.len();
    if k == 0 {
        return Err(TypeError::new("", "at least one outcome", "none"));
    }
    let items = outcomes
        .iter()
        .enumerate()
        .map(|(i, r)| Ok(ModalityExpr::weaken(qdcert_expr(sig, r.clone(), obs.clone())?, k, i)))
        .collect::<Result<Vec<_>, TypeError>>()?;
    Ok(ModalityExpr::Conj(items))
}

fn resolve_modality_name(sig: &FibredSignature, name: &str, params: Vec<Param>) -> Result<ModalityExpr, TypeError> {
    if !sig.lookup_modality(name).is_empty() {
        return base_modality(sig, name, params);
    }
    let mut it = params.clone().into_iter();
    match name {
        "dreq" => match (it.next(), it.next(), it.next()) {
            (Some(p), Some(r), None) => dreq_expr(sig, p, r),
            _ => Err(arity_error(name, "[p, r]", &params)),
        },
        "qdeq" => match (it.next(), it.next(), it.next(), it.next()) {
            (Some(p), Some(r), Some(a), None) => qdeq_expr(sig, p, r, a),
            _ => Err(arity_error(name, "[p, r, A]", &params)),
        },
        "P" => match (it.next(), it.next()) {
            (Some(a), None) => projcert_expr(sig, a),
            _ => Err(arity_error(name, "[A]", &params)),
        },
        "certain" => match (it.next(), it.next(), it.next()) {
            (Some(r), Some(a), None) => qdcert_expr(sig, r, a),
            _ => Err(arity_error(name, "[r, A]", &params)),
        },
        "measure" => match params.split_first() {
            Some((a, outcomes)) if !outcomes.is_empty() => polyadic_expr(sig, a.clone(), outcomes),
            _ => Err(arity_error(name, "[A, r1, ..., rk]", &params)),
        },
        _ if params.is_empty() && is_observable(sig, name) => projcert_expr(sig, Param::Name(name.to_string())),
        _ => base_modality(sig, name, params),
    }
}

/// A bare name that `ev` accepts stands for `P[name]`.
fn is_observable(sig: &FibredSignature, name: &str) -> bool {
    sig.has_morphism("ev")
        && sig
            .generator_type(&MorphismRef::new("ev", vec![Param::Name(name.to_string())]))
            .is_ok()
}

fn elaborate(s: &Surface, sig: &FibredSignature, expected: Option<&FibObject>) -> Result<Formula, TypeError> {
    let check = |found: &FibObject| -> Result<(), TypeError> {
        match expected {
            Some(e) if e != found => Err(TypeError::new("", format!("formula of type {e}"), found.to_string())),
            _ => Ok(()),
        }
    };
    match s {
        Surface::Top(Some(o)) => {
            let expanded = sig
                .expand_object(o)
                .map_err(|msg| TypeError::new("/top", "declared object", msg))?;
            check(&expanded)?;
            Ok(Formula::Top(o.clone()))
        }
        Surface::Top(None) => match expected {
            Some(e) => Ok(Formula::Top(e.clone())),
            None => Err(TypeError::new("/top", "a fibre for `T` (write `T@A`)", "no type information")),
        },
        Surface::Neg(inner) => Ok(Formula::not(elaborate(inner, sig, expected).map_err(|e| e.at("/neg"))?)),
        Surface::Conj(items) => {
            let ty = match expected {
                Some(e) => e.clone(),
                None => {
                    let mut found = None;
                    for item in items {
                        if let Ok(f) = elaborate(item, sig, None) {
                            found = Some(type_of_formula(&f, sig)?);
                            break;
                        }
                    }
                    match found {
                        Some(t) => t,
                        None => return elaborate(&items[0], sig, None).map_err(|e| e.at("/conj/0")),
                    }
                }
            };
            let out = items
                .iter()
                .enumerate()
                .map(|(i, x)| elaborate(x, sig, Some(&ty)).map_err(|e| e.at(&format!("/conj/{i}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::Conj(out))
        }
        Surface::Adapt(f, inner) => {
            let (source, target) = sig.morphism_type(f).map_err(|e| e.at("/adapt/morphism"))?;
            check(&source)?;
            let inner = elaborate(inner, sig, Some(&target)).map_err(|e| e.at("/adapt"))?;
            Ok(Formula::adapt(f.clone(), inner))
        }
        Surface::Apply(m, args) => {
            let ty = type_of_modality(m, sig).map_err(|e| e.at("/apply/modality"))?;
            check(&ty.fibre)?;
            if args.len() != ty.arity {
                return Err(TypeError::new(
                    "/apply",
                    format!("{} argument(s)", ty.arity),
                    format!("{} argument(s)", args.len()),
                ));
            }
            let args = args
                .iter()
                .enumerate()
                .map(|(i, a)| elaborate(a, sig, Some(&ty.fibre)).map_err(|e| e.at(&format!("/apply/arg{i}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::Apply(m.clone(), args))
        }
    }
}

/// Parses and type-checks a formula. Bare `T`/`true`/`false` need their
/// fibre to be determined by the context.
pub fn parse_formula(text: &str, sig: &FibredSignature) -> Result<Formula, FormulaError> {
    parse_formula_at(text, sig, None)
}

/// Like [`parse_formula`], with an expected type for the whole formula.
pub fn parse_formula_at(
    text: &str,
    sig: &FibredSignature,
    expected: Option<&FibObject>,
) -> Result<Formula, FormulaError> {
    let mut p = Parser::new(text, sig)?;
    let surface = p.formula()?;
    p.finish()?;
    let phi = elaborate(&surface, sig, expected)?;
    type_of_formula(&phi, sig)?;
    Ok(phi)
}

pub fn parse_modality(text: &str, sig: &FibredSignature) -> Result<ModalityExpr, FormulaError> {
    let mut p = Parser::new(text, sig)?;
    let m = p.modality()?;
    p.finish()?;
    type_of_modality(&m, sig)?;
    Ok(m)
}

pub fn parse_morphism(text: &str, sig: &FibredSignature) -> Result<FibMorphism, FormulaError> {
    let mut p = Parser::new(text, sig)?;
    let m = p.morphism()?;
    p.finish()?;
    sig.morphism_type(&m)?;
    Ok(m)
}
