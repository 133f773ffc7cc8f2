use std::fmt;

use crate::signature::{fmt_params, FibMorphism, FibObject, Param};

/// Typed modality expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum ModalityExpr {
    /// A basic modality symbol of the fibre's modal signature.
    Base {
        symbol: String,
        params: Vec<Param>,
        fibre: FibObject,
    },
    Neg(Box<ModalityExpr>),
    /// Nonempty conjunction of same-typed expressions.
    Conj(Vec<ModalityExpr>),
    /// `○^f` for `f: A → B` and `○` at `B`; lives at `A`.
    Superscript(Box<ModalityExpr>, FibMorphism),
    /// `first · second` where `second` is unary at `B`; lives at `B ⊗ A`.
    Then(Box<ModalityExpr>, Box<ModalityExpr>),
    /// A unary expression reading only argument `index` of `arity`.
    Weaken {
        inner: Box<ModalityExpr>,
        arity: usize,
        index: usize,
    },
}

impl ModalityExpr {
    pub fn base(symbol: impl Into<String>, params: Vec<Param>, fibre: FibObject) -> Self {
        ModalityExpr::Base {
            symbol: symbol.into(),
            params,
            fibre,
        }
    }

    pub fn neg(inner: ModalityExpr) -> Self {
        ModalityExpr::Neg(Box::new(inner))
    }

    pub fn superscript(inner: ModalityExpr, f: FibMorphism) -> Self {
        ModalityExpr::Superscript(Box::new(inner), f)
    }

    pub fn then(first: ModalityExpr, second: ModalityExpr) -> Self {
        ModalityExpr::Then(Box::new(first), Box::new(second))
    }

    pub fn weaken(inner: ModalityExpr, arity: usize, index: usize) -> Self {
        ModalityExpr::Weaken {
            inner: Box::new(inner),
            arity,
            index,
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, ModalityExpr::Base { .. })
    }
}

/// Typed formulae.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Top(FibObject),
    Neg(Box<Formula>),
    Conj(Vec<Formula>),
    /// Adaptation modality `f φ`.
    Adapt(FibMorphism, Box<Formula>),
    Apply(ModalityExpr, Vec<Formula>),
}

impl Formula {
    pub fn top(fibre: FibObject) -> Self {
        Formula::Top(fibre)
    }

    pub fn bottom(fibre: FibObject) -> Self {
        Formula::not(Formula::Top(fibre))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Neg(Box::new(inner))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::Conj(vec![a, b])
    }

    /// `a -> b` as `¬(a ∧ ¬b)`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// `a ∨ b` as `¬(¬a ∧ ¬b)`.
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn adapt(f: FibMorphism, inner: Formula) -> Self {
        Formula::Adapt(f, Box::new(inner))
    }

    pub fn apply(m: ModalityExpr, args: Vec<Formula>) -> Self {
        Formula::Apply(m, args)
    }

    /// Nesting depth of modality applications.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top(_) => 0,
            Formula::Neg(f) | Formula::Adapt(_, f) => f.modal_depth(),
            Formula::Conj(fs) => fs.iter().map(Formula::modal_depth).max().unwrap_or(0),
            Formula::Apply(_, args) => 1 + args.iter().map(Formula::modal_depth).max().unwrap_or(0),
        }
    }

    pub fn contains_adapt(&self) -> bool {
        match self {
            Formula::Top(_) => false,
            Formula::Adapt(..) => true,
            Formula::Neg(f) => f.contains_adapt(),
            Formula::Conj(fs) | Formula::Apply(_, fs) => fs.iter().any(Formula::contains_adapt),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top(_) => 1,
            Formula::Neg(f) | Formula::Adapt(_, f) => 1 + f.size(),
            Formula::Conj(fs) | Formula::Apply(_, fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
        }
    }
}

fn fmt_morph_atom(f: &mut fmt::Formatter<'_>, m: &FibMorphism) -> fmt::Result {
    // Compound morphisms already print with their own parentheses.
    write!(f, "{m}")
}

impl fmt::Display for ModalityExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalityExpr::Base { symbol, params, .. } => {
                f.write_str(symbol)?;
                fmt_params(f, params)
            }
            ModalityExpr::Neg(inner) => {
                f.write_str("!")?;
                fmt_mod_postfix_operand(f, inner)
            }
            ModalityExpr::Conj(items) => {
                if items.len() == 1 {
                    write!(f, "(& {})", items[0])
                } else {
                    f.write_str("(")?;
                    for (i, m) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" & ")?;
                        }
                        fmt_mod_postfix_operand(f, m)?;
                    }
                    f.write_str(")")
                }
            }
            ModalityExpr::Superscript(inner, m) => {
                fmt_mod_postfix_operand(f, inner)?;
                f.write_str("^")?;
                fmt_morph_atom(f, m)
            }
            ModalityExpr::Then(a, b) => {
                f.write_str("(")?;
                fmt_mod_postfix_operand(f, a)?;
                f.write_str(" . ")?;
                fmt_mod_postfix_operand(f, b)?;
                f.write_str(")")
            }
            ModalityExpr::Weaken {
                inner,
                arity,
                index,
            } => {
                fmt_mod_postfix_operand(f, inner)?;
                write!(f, "@{index}/{arity}")
            }
        }
    }
}

// Operands of postfix and infix operators: atoms, parenthesised forms and
// other postfix chains print bare; negations get wrapped.
fn fmt_mod_postfix_operand(f: &mut fmt::Formatter<'_>, m: &ModalityExpr) -> fmt::Result {
    match m {
        ModalityExpr::Neg(_) => write!(f, "({m})"),
        _ => write!(f, "{m}"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top(o) => write!(f, "T@{}", fmt_object_atom(o)),
            Formula::Neg(inner) => {
                f.write_str("!")?;
                write!(f, "{inner}")
            }
            Formula::Conj(items) => {
                if items.len() == 1 {
                    write!(f, "(& {})", items[0])
                } else {
                    f.write_str("(")?;
                    for (i, x) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" & ")?;
                        }
                        write!(f, "{x}")?;
                    }
                    f.write_str(")")
                }
            }
            Formula::Adapt(m, inner) => match m {
                FibMorphism::Gen(r) => write!(f, "{r}({inner})"),
                other => write!(f, "@{other}({inner})"),
            },
            Formula::Apply(m, args) => {
                if m.is_atomic() {
                    write!(f, "{m}")?;
                } else {
                    write!(f, "<{m}>")?;
                }
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn fmt_object_atom(o: &FibObject) -> String {
    if o.word().len() > 1 {
        format!("({o})")
    } else {
        o.to_string()
    }
}
