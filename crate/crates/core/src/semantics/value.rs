use std::any::Any;
use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::EvalError;

/// Index of a state in a finite carrier.
pub type StateId = usize;

/// Label of a `Σ × (−)` value: an outcome value or a symbol.
#[derive(Clone, Debug)]
pub enum Label {
    Real(f64),
    Sym(String),
}

impl Label {
    /// Equality with reals compared within `eps`.
    pub fn matches(&self, other: &Label, eps: f64) -> bool {
        match (self, other) {
            (Label::Real(a), Label::Real(b)) => (a - b).abs() <= eps,
            (Label::Sym(a), Label::Sym(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Label::Real(a), Label::Real(b)) => a.total_cmp(b),
            (Label::Real(_), Label::Sym(_)) => Ordering::Less,
            (Label::Sym(_), Label::Real(_)) => Ordering::Greater,
            (Label::Sym(a), Label::Sym(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Real(x) => write!(f, "{x}"),
            Label::Sym(s) => f.write_str(s),
        }
    }
}

/// Key of an exponent value: a symbol from a finite key set, or an opaque
/// object (e.g. an observable) identified by its label.
#[derive(Clone)]
pub enum Key {
    Sym(String),
    Obj(ObjKey),
}

#[derive(Clone)]
pub struct ObjKey {
    pub label: String,
    pub payload: Arc<dyn Any + Send + Sync>,
}

impl Key {
    pub fn sym(s: impl Into<String>) -> Self {
        Key::Sym(s.into())
    }

    pub fn obj<T: Any + Send + Sync>(label: impl Into<String>, payload: Arc<T>) -> Self {
        Key::Obj(ObjKey {
            label: label.into(),
            payload,
        })
    }

    pub fn label(&self) -> &str {
        match self {
            Key::Sym(s) => s,
            Key::Obj(o) => &o.label,
        }
    }

    pub fn payload<T: Any + Send + Sync>(&self) -> Option<&T> {
        match self {
            Key::Obj(o) => o.payload.downcast_ref::<T>(),
            Key::Sym(_) => None,
        }
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Key::Sym(a), Key::Sym(b)) => a.cmp(b),
            (Key::Sym(_), Key::Obj(_)) => Ordering::Less,
            (Key::Obj(_), Key::Sym(_)) => Ordering::Greater,
            (Key::Obj(a), Key::Obj(b)) => a.label.cmp(&b.label),
        }
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub type Lookup = Arc<dyn Fn(&Key) -> Result<FunctorValue, EvalError> + Send + Sync>;

static NEXT_TABLE_ID: AtomicU64 = AtomicU64::new(0);

/// An exponent value over an open key space, computed on demand. Lookups
/// must be deterministic; identity is by allocation id.
#[derive(Clone)]
pub struct LazyTable {
    id: u64,
    lookup: Lookup,
}

impl LazyTable {
    pub fn new(lookup: Lookup) -> Self {
        Self {
            id: NEXT_TABLE_ID.fetch_add(1, AtomicOrdering::Relaxed),
            lookup,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn get(&self, key: &Key) -> Result<FunctorValue, EvalError> {
        (self.lookup)(key)
    }
}

#[derive(Clone)]
pub enum Table {
    /// Total table over a finite key set, sorted by key.
    Finite(Vec<(Key, FunctorValue)>),
    Lazy(LazyTable),
}

impl Table {
    pub fn get(&self, key: &Key) -> Result<FunctorValue, EvalError> {
        match self {
            Table::Finite(entries) => entries
                .binary_search_by(|(k, _)| k.cmp(key))
                .map(|i| entries[i].1.clone())
                .map_err(|_| EvalError::MissingKey(key.label().to_string())),
            Table::Lazy(t) => t.get(key),
        }
    }
}

/// An element of `⟦A⟧(X)` for a finite carrier `X`.
#[derive(Clone)]
pub enum FunctorValue {
    /// A state of the carrier.
    Base(StateId),
    /// Finite subset, sorted and without duplicates.
    Set(Vec<FunctorValue>),
    /// Finitely supported distribution: support sorted, merged, no zero
    /// masses, total mass one.
    Dist(Vec<(FunctorValue, f64)>),
    Pair(Label, Box<FunctorValue>),
    Table(Table),
    Tuple(Vec<FunctorValue>),
}

/// Mass tolerance used when validating distributions.
pub const DIST_TOLERANCE: f64 = 1e-9;

impl FunctorValue {
    pub fn set(items: impl IntoIterator<Item = FunctorValue>) -> Self {
        let mut items: Vec<FunctorValue> = items.into_iter().collect();
        items.sort();
        items.dedup();
        FunctorValue::Set(items)
    }

    pub fn states(ids: impl IntoIterator<Item = StateId>) -> Self {
        Self::set(ids.into_iter().map(FunctorValue::Base))
    }

    /// Builds a distribution, merging equal support points. Fails unless
    /// every mass lies in `[0, 1]` and the total is one within
    /// [`DIST_TOLERANCE`].
    pub fn dist(entries: impl IntoIterator<Item = (FunctorValue, f64)>) -> Result<Self, EvalError> {
        let entries: Vec<(FunctorValue, f64)> = entries.into_iter().collect();
        let mut total = 0.0;
        for (_, p) in &entries {
            if !p.is_finite() || *p < -DIST_TOLERANCE || *p > 1.0 + DIST_TOLERANCE {
                return Err(EvalError::Distribution(format!("mass {p} outside [0, 1]")));
            }
            total += p;
        }
        if (total - 1.0).abs() > DIST_TOLERANCE {
            return Err(EvalError::Distribution(format!("total mass {total} is not 1")));
        }
        Ok(Self::merged_dist(entries))
    }

    /// Canonical form without validation; used when pushing forward an
    /// already valid distribution.
    pub(crate) fn merged_dist(mut entries: Vec<(FunctorValue, f64)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(FunctorValue, f64)> = Vec::with_capacity(entries.len());
        for (v, p) in entries {
            match out.last_mut() {
                Some((last, q)) if *last == v => *q += p,
                _ => out.push((v, p)),
            }
        }
        out.retain(|(_, p)| *p > 0.0);
        FunctorValue::Dist(out)
    }

    pub fn point(v: FunctorValue) -> Self {
        FunctorValue::Dist(vec![(v, 1.0)])
    }

    pub fn pair(label: Label, v: FunctorValue) -> Self {
        FunctorValue::Pair(label, Box::new(v))
    }

    pub fn table(entries: impl IntoIterator<Item = (Key, FunctorValue)>) -> Self {
        let mut entries: Vec<(Key, FunctorValue)> = entries.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries.dedup_by(|a, b| a.0 == b.0);
        FunctorValue::Table(Table::Finite(entries))
    }

    pub fn lazy(lookup: Lookup) -> Self {
        FunctorValue::Table(Table::Lazy(LazyTable::new(lookup)))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FunctorValue::Base(_) => "state",
            FunctorValue::Set(_) => "set",
            FunctorValue::Dist(_) => "distribution",
            FunctorValue::Pair(..) => "labelled pair",
            FunctorValue::Table(_) => "table",
            FunctorValue::Tuple(_) => "tuple",
        }
    }

    pub fn as_base(&self) -> Result<StateId, EvalError> {
        match self {
            FunctorValue::Base(x) => Ok(*x),
            other => Err(EvalError::shape("state", other.kind())),
        }
    }

    /// Largest state id referenced, ignoring lazy tables.
    pub fn max_state(&self) -> Option<StateId> {
        match self {
            FunctorValue::Base(x) => Some(*x),
            FunctorValue::Set(items) | FunctorValue::Tuple(items) => {
                items.iter().filter_map(FunctorValue::max_state).max()
            }
            FunctorValue::Dist(entries) => entries.iter().filter_map(|(v, _)| v.max_state()).max(),
            FunctorValue::Pair(_, v) => v.max_state(),
            FunctorValue::Table(Table::Finite(entries)) => {
                entries.iter().filter_map(|(_, v)| v.max_state()).max()
            }
            FunctorValue::Table(Table::Lazy(_)) => None,
        }
    }

    /// Structural equality with masses and real labels compared within
    /// `eps`. Lazy tables are equal only to themselves.
    pub fn approx_eq(&self, other: &FunctorValue, eps: f64) -> bool {
        match (self, other) {
            (FunctorValue::Base(a), FunctorValue::Base(b)) => a == b,
            (FunctorValue::Set(a), FunctorValue::Set(b)) | (FunctorValue::Tuple(a), FunctorValue::Tuple(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, eps))
            }
            (FunctorValue::Dist(a), FunctorValue::Dist(b)) => {
                // Support points whose mass is within eps of zero are ignored.
                let a: Vec<_> = a.iter().filter(|(_, p)| *p > eps).collect();
                let b: Vec<_> = b.iter().filter(|(_, p)| *p > eps).collect();
                a.len() == b.len()
                    && a
                        .iter()
                        .zip(&b)
                        .all(|((x, p), (y, q))| (p - q).abs() <= eps && x.approx_eq(y, eps))
            }
            (FunctorValue::Pair(l, x), FunctorValue::Pair(m, y)) => l.matches(m, eps) && x.approx_eq(y, eps),
            (FunctorValue::Table(Table::Finite(a)), FunctorValue::Table(Table::Finite(b))) => {
                a.len() == b.len()
                    && a
                        .iter()
                        .zip(b)
                        .all(|((k, x), (l, y))| k == l && x.approx_eq(y, eps))
            }
            (FunctorValue::Table(Table::Lazy(a)), FunctorValue::Table(Table::Lazy(b))) => a.id == b.id,
            _ => false,
        }
    }

    fn tag(&self) -> u8 {
        match self {
            FunctorValue::Base(_) => 0,
            FunctorValue::Set(_) => 1,
            FunctorValue::Dist(_) => 2,
            FunctorValue::Pair(..) => 3,
            FunctorValue::Table(_) => 4,
            FunctorValue::Tuple(_) => 5,
        }
    }
}

impl PartialEq for FunctorValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FunctorValue {}

impl PartialOrd for FunctorValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FunctorValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use FunctorValue::*;
        match (self, other) {
            (Base(a), Base(b)) => a.cmp(b),
            (Set(a), Set(b)) | (Tuple(a), Tuple(b)) => a.cmp(b),
            (Dist(a), Dist(b)) => {
                for ((x, p), (y, q)) in a.iter().zip(b) {
                    let c = x.cmp(y).then(p.total_cmp(q));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
            (Pair(l, x), Pair(m, y)) => l.cmp(m).then_with(|| x.cmp(y)),
            (Table(a), Table(b)) => match (a, b) {
                (self::Table::Finite(a), self::Table::Finite(b)) => {
                    for ((k, x), (l, y)) in a.iter().zip(b) {
                        let c = k.cmp(l).then_with(|| x.cmp(y));
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    a.len().cmp(&b.len())
                }
                (self::Table::Finite(_), self::Table::Lazy(_)) => Ordering::Less,
                (self::Table::Lazy(_), self::Table::Finite(_)) => Ordering::Greater,
                (self::Table::Lazy(a), self::Table::Lazy(b)) => a.id.cmp(&b.id),
            },
            _ => self.tag().cmp(&other.tag()),
        }
    }
}

impl fmt::Debug for FunctorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FunctorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorValue::Base(x) => write!(f, "#{x}"),
            FunctorValue::Set(items) => {
                f.write_str("{")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            FunctorValue::Dist(entries) => {
                f.write_str("[")?;
                for (i, (v, p)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}: {p}")?;
                }
                f.write_str("]")
            }
            FunctorValue::Pair(l, v) => write!(f, "({l}, {v})"),
            FunctorValue::Table(Table::Finite(entries)) => {
                f.write_str("<")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k} -> {v}")?;
                }
                f.write_str(">")
            }
            FunctorValue::Table(Table::Lazy(t)) => write!(f, "<lazy table {}>", t.id),
            FunctorValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}
