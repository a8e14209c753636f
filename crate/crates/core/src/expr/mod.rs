//! Abstract-index tensor expressions over a conformal manifold.
//!
//! A term is an exact coefficient times an ordered product of indexed
//! factors; contraction is encoded by repeating an index name once up and
//! once down within a term. Symbols live in a process-wide registry keyed by
//! their full declaration, so the same declaration always yields the same id.

pub mod canon;
pub mod nabla;
pub mod ops;
pub mod render;

#[cfg(test)]
mod tests;

use crate::coeff::{Coefficient, Param};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrd};
use std::sync::{LazyLock, RwLock};

// ---------------------------------------------------------------------------
// Indices
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum IndexKind {
    Tangent,
    Tractor,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Variance {
    Up,
    Down,
}

impl Variance {
    pub fn flip(self) -> Variance {
        match self {
            Variance::Up => Variance::Down,
            Variance::Down => Variance::Up,
        }
    }
}

/// Interned index name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IName(pub u32);

struct Interner {
    names: Vec<&'static str>,
    by_name: HashMap<&'static str, u32>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    RwLock::new(Interner {
        names: Vec::new(),
        by_name: HashMap::new(),
    })
});

pub fn iname(s: &str) -> IName {
    {
        let int = INTERNER.read().unwrap();
        if let Some(&id) = int.by_name.get(s) {
            return IName(id);
        }
    }
    let mut int = INTERNER.write().unwrap();
    if let Some(&id) = int.by_name.get(s) {
        return IName(id);
    }
    let leaked: &'static str = Box::leak(s.to_owned().into_boxed_str());
    let id = int.names.len() as u32;
    int.names.push(leaked);
    int.by_name.insert(leaked, id);
    IName(id)
}

pub fn iname_str(id: IName) -> &'static str {
    INTERNER.read().unwrap().names[id.0 as usize]
}

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A fresh working dummy name, never colliding with user names.
pub fn fresh_name(kind: IndexKind) -> IName {
    let c = FRESH.fetch_add(1, AtomicOrd::Relaxed);
    match kind {
        IndexKind::Tangent => iname(&format!("~t{c}")),
        IndexKind::Tractor => iname(&format!("~T{c}")),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Index {
    pub name: IName,
    pub kind: IndexKind,
    pub var: Variance,
}

impl Index {
    pub fn tangent(name: &str, var: Variance) -> Index {
        Index {
            name: iname(name),
            kind: IndexKind::Tangent,
            var,
        }
    }

    pub fn tractor(name: &str, var: Variance) -> Index {
        Index {
            name: iname(name),
            kind: IndexKind::Tractor,
            var,
        }
    }

    pub fn down(name: &str) -> Index {
        Index::tangent(name, Variance::Down)
    }

    pub fn up(name: &str) -> Index {
        Index::tangent(name, Variance::Up)
    }

    pub fn flipped(self) -> Index {
        Index {
            var: self.var.flip(),
            ..self
        }
    }

    pub fn str_name(&self) -> &'static str {
        iname_str(self.name)
    }
}

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum SymbolKind {
    /// Generic density-valued tensor field; derivatives stack as a prefix.
    Field,
    /// Conformal metric (and the mixed Kronecker delta).
    Metric,
    /// Tractor metric.
    TractorMetric,
    ProjX,
    ProjY,
    ProjZ,
    Schouten,
    SchoutenTrace,
    Weyl,
    Cotton,
    /// Log-density of a conformal rescaling; behaves as a weight-0 field.
    Upsilon,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Symmetry {
    None,
    /// All slots symmetric.
    Symmetric,
    /// All slots symmetric and every trace vanishes.
    SymTraceFree,
    /// Two symmetric slots (metrics).
    Metric,
    /// Skew in (0,1) and (2,3), symmetric under pair exchange, trace-free.
    Weyl,
    /// Skew in (1,2), trace-free.
    Cotton,
}

impl Symmetry {
    /// Symmetric slot groups.
    pub fn sym_groups(self, nslots: usize) -> Vec<Vec<usize>> {
        match self {
            Symmetry::Symmetric | Symmetry::SymTraceFree | Symmetry::Metric => {
                vec![(0..nslots).collect()]
            }
            _ => vec![],
        }
    }

    /// Skew slot groups.
    pub fn skew_groups(self) -> Vec<Vec<usize>> {
        match self {
            Symmetry::Weyl => vec![vec![0, 1], vec![2, 3]],
            Symmetry::Cotton => vec![vec![1, 2]],
            _ => vec![],
        }
    }

    pub fn trace_free(self) -> bool {
        matches!(
            self,
            Symmetry::SymTraceFree | Symmetry::Weyl | Symmetry::Cotton
        )
    }

    pub fn pair_exchange(self) -> bool {
        matches!(self, Symmetry::Weyl)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolSpec {
    pub name: String,
    pub kind: SymbolKind,
    /// Index kind per slot.
    pub slots: Vec<IndexKind>,
    /// Reference variance per slot; flipping a tangent slot against this
    /// shifts the conformal weight by +-2.
    pub ref_variance: Vec<Variance>,
    /// Conformal weight at the reference variance.
    pub weight: Coefficient,
    pub symmetry: Symmetry,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

struct Registry {
    specs: Vec<SymbolSpec>,
    by_spec: HashMap<SymbolSpec, u32>,
}

static REGISTRY: LazyLock<RwLock<Registry>> = LazyLock::new(|| {
    RwLock::new(Registry {
        specs: Vec::new(),
        by_spec: HashMap::new(),
    })
});

pub fn intern_symbol(spec: SymbolSpec) -> SymbolId {
    {
        let reg = REGISTRY.read().unwrap();
        if let Some(&id) = reg.by_spec.get(&spec) {
            return SymbolId(id);
        }
    }
    let mut reg = REGISTRY.write().unwrap();
    if let Some(&id) = reg.by_spec.get(&spec) {
        return SymbolId(id);
    }
    let id = reg.specs.len() as u32;
    reg.specs.push(spec.clone());
    reg.by_spec.insert(spec, id);
    SymbolId(id)
}

pub fn spec_of(id: SymbolId) -> SymbolSpec {
    REGISTRY.read().unwrap().specs[id.0 as usize].clone()
}

pub fn symbol_by_name(name: &str) -> Option<SymbolId> {
    let reg = REGISTRY.read().unwrap();
    reg.specs
        .iter()
        .position(|s| s.name == name)
        .map(|i| SymbolId(i as u32))
}

// Built-in symbols ----------------------------------------------------------

fn down(n: usize) -> Vec<Variance> {
    vec![Variance::Down; n]
}

pub fn sym_metric() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "g".into(),
        kind: SymbolKind::Metric,
        slots: vec![IndexKind::Tangent; 2],
        ref_variance: down(2),
        weight: Coefficient::int(2),
        symmetry: Symmetry::Metric,
    })
}

pub fn sym_tractor_metric() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "h".into(),
        kind: SymbolKind::TractorMetric,
        slots: vec![IndexKind::Tractor; 2],
        ref_variance: down(2),
        weight: Coefficient::zero(),
        symmetry: Symmetry::Metric,
    })
}

pub fn sym_x() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "X".into(),
        kind: SymbolKind::ProjX,
        slots: vec![IndexKind::Tractor],
        ref_variance: down(1),
        weight: Coefficient::int(1),
        symmetry: Symmetry::None,
    })
}

pub fn sym_y() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "Y".into(),
        kind: SymbolKind::ProjY,
        slots: vec![IndexKind::Tractor],
        ref_variance: down(1),
        weight: Coefficient::int(-1),
        symmetry: Symmetry::None,
    })
}

pub fn sym_z() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "Z".into(),
        kind: SymbolKind::ProjZ,
        slots: vec![IndexKind::Tractor, IndexKind::Tangent],
        ref_variance: down(2),
        weight: Coefficient::int(1),
        symmetry: Symmetry::None,
    })
}

pub fn sym_schouten() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "P".into(),
        kind: SymbolKind::Schouten,
        slots: vec![IndexKind::Tangent; 2],
        ref_variance: down(2),
        weight: Coefficient::zero(),
        symmetry: Symmetry::Metric,
    })
}

/// J = P_a{}^a; a scalar density of weight -2 (the trace is taken with the
/// inverse conformal metric).
pub fn sym_schouten_trace() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "J".into(),
        kind: SymbolKind::SchoutenTrace,
        slots: vec![],
        ref_variance: vec![],
        weight: Coefficient::int(-2),
        symmetry: Symmetry::None,
    })
}

pub fn sym_weyl() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "C".into(),
        kind: SymbolKind::Weyl,
        slots: vec![IndexKind::Tangent; 4],
        ref_variance: down(4),
        weight: Coefficient::int(2),
        symmetry: Symmetry::Weyl,
    })
}

pub fn sym_cotton() -> SymbolId {
    intern_symbol(SymbolSpec {
        name: "A".into(),
        kind: SymbolKind::Cotton,
        slots: vec![IndexKind::Tangent; 3],
        ref_variance: down(3),
        weight: Coefficient::zero(),
        symmetry: Symmetry::Cotton,
    })
}

pub fn sym_upsilon(name: &str) -> SymbolId {
    intern_symbol(SymbolSpec {
        name: name.into(),
        kind: SymbolKind::Upsilon,
        slots: vec![],
        ref_variance: vec![],
        weight: Coefficient::zero(),
        symmetry: Symmetry::None,
    })
}

/// A generic scalar density of the given weight.
pub fn sym_scalar(name: &str, weight: Coefficient) -> SymbolId {
    intern_symbol(SymbolSpec {
        name: name.into(),
        kind: SymbolKind::Field,
        slots: vec![],
        ref_variance: vec![],
        weight,
        symmetry: Symmetry::None,
    })
}

/// A generic tensor density field.
pub fn sym_tensor(
    name: &str,
    rank: usize,
    variance: Variance,
    weight: Coefficient,
    symmetry: Symmetry,
) -> SymbolId {
    intern_symbol(SymbolSpec {
        name: name.into(),
        kind: SymbolKind::Field,
        slots: vec![IndexKind::Tangent; rank],
        ref_variance: vec![variance; rank],
        weight,
        symmetry,
    })
}

/// A generic field with explicit slot kinds (tractor-valued fields).
pub fn sym_mixed(
    name: &str,
    slots: Vec<IndexKind>,
    ref_variance: Vec<Variance>,
    weight: Coefficient,
    symmetry: Symmetry,
) -> SymbolId {
    intern_symbol(SymbolSpec {
        name: name.into(),
        kind: SymbolKind::Field,
        slots,
        ref_variance,
        weight,
        symmetry,
    })
}

/// The source density f of weight w.
pub fn sym_f() -> SymbolId {
    sym_scalar("f", Coefficient::var(Param::W))
}

/// The irreducible symbol sigma' of rank k' and weight d.
pub fn sym_sigma(kprime: usize) -> SymbolId {
    sym_tensor(
        "s'",
        kprime,
        Variance::Up,
        Coefficient::var(Param::D),
        if kprime >= 2 {
            Symmetry::SymTraceFree
        } else {
            Symmetry::None
        },
    )
}

// ---------------------------------------------------------------------------
// Terms and expressions
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Mode {
    Flat,
    Curved,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Factor {
    pub sym: SymbolId,
    /// Covariant-derivative prefix, outermost first.
    pub derivs: Vec<Index>,
    /// The symbol's own slots.
    pub idx: Vec<Index>,
}

impl Factor {
    pub fn new(sym: SymbolId, idx: Vec<Index>) -> Factor {
        Factor {
            sym,
            derivs: vec![],
            idx,
        }
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = &Index> {
        self.derivs.iter().chain(self.idx.iter())
    }

    pub fn iter_indices_mut(&mut self) -> impl Iterator<Item = &mut Index> {
        self.derivs.iter_mut().chain(self.idx.iter_mut())
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct TensorTerm {
    pub coeff: Coefficient,
    pub factors: Vec<Factor>,
}

impl TensorTerm {
    pub fn iter_indices(&self) -> impl Iterator<Item = &Index> {
        self.factors.iter().flat_map(|f| f.iter_indices())
    }

    /// Occurrence count per name.
    fn occurrences(&self) -> BTreeMap<IName, Vec<(IndexKind, Variance)>>
    where
        IName: Ord,
    {
        let mut map: BTreeMap<IName, Vec<(IndexKind, Variance)>> = BTreeMap::new();
        for i in self.iter_indices() {
            map.entry(i.name).or_default().push((i.kind, i.var));
        }
        map
    }

    pub fn validate(&self) -> Result<()> {
        for (name, occ) in self.occurrences() {
            if occ.len() > 2 {
                return Err(Error::MalformedExpression(format!(
                    "index `{}` occurs {} times in a term",
                    iname_str(name),
                    occ.len()
                )));
            }
            if occ.len() == 2 {
                if occ[0].0 != occ[1].0 {
                    return Err(Error::MalformedExpression(format!(
                        "index `{}` pairs tangent with tractor",
                        iname_str(name)
                    )));
                }
                if occ[0].1 == occ[1].1 {
                    return Err(Error::MalformedExpression(format!(
                        "index `{}` is contracted with equal variance",
                        iname_str(name)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Free indices (occurring exactly once) as a sorted set.
    pub fn free_indices(&self) -> BTreeSet<(String, IndexKind, Variance)> {
        let mut out = BTreeSet::new();
        for (name, occ) in self.occurrences() {
            if occ.len() == 1 {
                out.insert((iname_str(name).to_owned(), occ[0].0, occ[0].1));
            }
        }
        out
    }

    /// Conformal weight of the term.
    pub fn weight(&self) -> Coefficient {
        let mut acc = Coefficient::zero();
        for f in &self.factors {
            let spec = spec_of(f.sym);
            acc = &acc + &spec.weight;
            for (slot, i) in f.idx.iter().enumerate() {
                if spec.slots[slot] == IndexKind::Tangent && i.var != spec.ref_variance[slot] {
                    let shift = match i.var {
                        Variance::Down => 2,
                        Variance::Up => -2,
                    };
                    acc = &acc + &Coefficient::int(shift);
                }
            }
            for dvi in &f.derivs {
                if dvi.var == Variance::Up {
                    acc = &acc + &Coefficient::int(-2);
                }
            }
        }
        acc
    }

    /// Dummy (contracted) names in the term.
    pub fn dummy_names(&self) -> BTreeSet<IName>
    where
        IName: Ord,
    {
        self.occurrences()
            .into_iter()
            .filter(|(_, occ)| occ.len() == 2)
            .map(|(n, _)| n)
            .collect()
    }

    /// Rename indices according to the map (applies to every occurrence).
    pub fn rename(&mut self, map: &HashMap<IName, IName>) {
        for f in &mut self.factors {
            for i in f.iter_indices_mut() {
                if let Some(&new) = map.get(&i.name) {
                    i.name = new;
                }
            }
        }
    }
}

impl Ord for IName {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        iname_str(*self).cmp(iname_str(*other))
    }
}

impl PartialOrd for IName {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct TensorExpr {
    pub terms: Vec<TensorTerm>,
}

impl TensorExpr {
    pub fn zero() -> TensorExpr {
        TensorExpr { terms: vec![] }
    }

    pub fn from_term(t: TensorTerm) -> TensorExpr {
        TensorExpr { terms: vec![t] }
    }

    pub fn from_factor(f: Factor) -> TensorExpr {
        TensorExpr::from_term(TensorTerm {
            coeff: Coefficient::one(),
            factors: vec![f],
        })
    }

    /// Scalar one.
    pub fn unit() -> TensorExpr {
        TensorExpr::from_term(TensorTerm {
            coeff: Coefficient::one(),
            factors: vec![],
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.terms.iter().all(|t| t.coeff.is_zero())
    }

    pub fn add(&self, other: &TensorExpr) -> TensorExpr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        TensorExpr { terms }
    }

    pub fn sub(&self, other: &TensorExpr) -> TensorExpr {
        self.add(&other.scale(&Coefficient::int(-1)))
    }

    pub fn scale(&self, c: &Coefficient) -> TensorExpr {
        TensorExpr {
            terms: self
                .terms
                .iter()
                .map(|t| TensorTerm {
                    coeff: &t.coeff * c,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    /// Product of two expressions. Dummy names of `other` are freshened so
    /// the two operands can never collide; shared FREE names contract.
    pub fn mul_expr(&self, other: &TensorExpr) -> TensorExpr {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut b = b.clone();
                let map: HashMap<IName, IName> = b
                    .dummy_names()
                    .into_iter()
                    .map(|n| {
                        let kind = b
                            .iter_indices()
                            .find(|i| i.name == n)
                            .map(|i| i.kind)
                            .unwrap();
                        (n, fresh_name(kind))
                    })
                    .collect();
                b.rename(&map);
                let mut factors = a.factors.clone();
                factors.extend(b.factors);
                out.push(TensorTerm {
                    coeff: &a.coeff * &b.coeff,
                    factors,
                });
            }
        }
        TensorExpr { terms: out }
    }

    /// Freshen all dummy names (used before substitution into a context that
    /// may carry clashing names).
    pub fn freshen_dummies(&self) -> TensorExpr {
        let mut out = self.clone();
        for t in &mut out.terms {
            let map: HashMap<IName, IName> = t
                .dummy_names()
                .into_iter()
                .map(|n| {
                    let kind = t
                        .iter_indices()
                        .find(|i| i.name == n)
                        .map(|i| i.kind)
                        .unwrap();
                    (n, fresh_name(kind))
                })
                .collect();
            t.rename(&map);
        }
        out
    }

    /// Rename FREE indices across all terms.
    pub fn rename_free(&self, map: &HashMap<IName, IName>) -> TensorExpr {
        let mut out = self.clone();
        for t in &mut out.terms {
            let dummies = t.dummy_names();
            for f in &mut t.factors {
                for i in f.iter_indices_mut() {
                    if !dummies.contains(&i.name) {
                        if let Some(&new) = map.get(&i.name) {
                            i.name = new;
                        }
                    }
                }
            }
        }
        out
    }

    /// The common conformal weight, or an error when terms disagree.
    pub fn weight(&self) -> Result<Coefficient> {
        let mut w: Option<Coefficient> = None;
        for t in &self.terms {
            let tw = t.weight();
            match &w {
                None => w = Some(tw),
                Some(prev) if *prev != tw => {
                    return Err(Error::WeightMismatch(prev.render(), tw.render()))
                }
                _ => {}
            }
        }
        Ok(w.unwrap_or_else(Coefficient::zero))
    }

    /// Free indices of the expression; errors when terms disagree.
    pub fn free_indices(&self) -> Result<BTreeSet<(String, IndexKind, Variance)>> {
        let mut out: Option<BTreeSet<(String, IndexKind, Variance)>> = None;
        for t in &self.terms {
            let fi = t.free_indices();
            match &out {
                None => out = Some(fi),
                Some(prev) if *prev != fi => {
                    return Err(Error::MalformedExpression(
                        "terms have differing free indices".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(out.unwrap_or_default())
    }
}

/// Convenience: single factor with unit coefficient times a coefficient.
pub fn scaled_factor(c: Coefficient, f: Factor) -> TensorExpr {
    TensorExpr::from_term(TensorTerm {
        coeff: c,
        factors: vec![f],
    })
}

/// Kronecker delta as the mixed conformal metric.
pub fn delta_factor(up: Index, dn: Index) -> Factor {
    debug_assert_eq!(up.kind, IndexKind::Tangent);
    Factor::new(sym_metric(), vec![up, dn])
}

pub fn metric_factor(a: Index, b: Index) -> Factor {
    Factor::new(sym_metric(), vec![a, b])
}

pub fn proj_x(a: Index) -> Factor {
    Factor::new(sym_x(), vec![a])
}

pub fn proj_y(a: Index) -> Factor {
    Factor::new(sym_y(), vec![a])
}

pub fn proj_z(big: Index, small: Index) -> Factor {
    Factor::new(sym_z(), vec![big, small])
}
