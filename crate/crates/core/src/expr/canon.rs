//! Normal form for tensor expressions.
//!
//! Per term: metric factors with a contracted slot are eliminated, tractor
//! projector contractions are resolved through the standard table, traces of
//! trace-free symbols vanish, curved derivative strings are reordered into a
//! fixed canonical order (emitting curvature corrections), factor order and
//! dummy names are made canonical, and like terms are collected.

use super::nabla::apply_nabla;
use super::*;
use crate::coeff::Coefficient;

const WORK_LIMIT: usize = 4_000_000;

pub fn canonicalize(expr: &TensorExpr, mode: Mode) -> Result<TensorExpr> {
    let mut work: Vec<TensorTerm> = expr.terms.clone();
    let mut acc: BTreeMap<String, (Coefficient, Vec<Factor>)> = BTreeMap::new();
    let mut budget = WORK_LIMIT;

    while let Some(term) = work.pop() {
        if budget == 0 {
            return Err(Error::MalformedExpression(
                "canonicalization exceeded its work limit".into(),
            ));
        }
        budget -= 1;
        if term.coeff.is_zero() {
            continue;
        }
        term.validate()?;
        let Some(term) = eliminate(term)? else {
            continue;
        };
        let Some((coeff, factors)) = structural(&term)? else {
            continue;
        };
        let term = TensorTerm { coeff, factors };
        // curved mode: derivative strings must respect the canonical order
        if let Some(pieces) = reorder_step(&term, mode) {
            work.extend(pieces);
            continue;
        }
        let fp = fingerprint(&term.factors);
        match acc.get_mut(&fp) {
            Some((c, _)) => *c = &*c + &term.coeff,
            None => {
                acc.insert(fp, (term.coeff, term.factors));
            }
        }
    }

    let mut terms: Vec<TensorTerm> = acc
        .into_values()
        .filter(|(c, _)| !c.is_zero())
        .map(|(coeff, factors)| TensorTerm { coeff, factors })
        .collect();
    terms.sort_by_key(|t| fingerprint(&t.factors));

    // well-formedness across terms
    let out = TensorExpr { terms };
    out.free_indices()?;
    Ok(out)
}

/// Structural equality after canonicalization.
pub fn expr_eq(a: &TensorExpr, b: &TensorExpr, mode: Mode) -> Result<bool> {
    let d = canonicalize(&a.sub(b), mode)?;
    Ok(d.is_zero())
}

// ---------------------------------------------------------------------------
// Elimination rewrites
// ---------------------------------------------------------------------------

fn eliminate(mut term: TensorTerm) -> Result<Option<TensorTerm>> {
    loop {
        if term.coeff.is_zero() {
            return Ok(None);
        }
        if kills_term(&term) {
            return Ok(None);
        }
        if metric_step(&mut term)? {
            continue;
        }
        match trm_step(&mut term) {
            TrmOutcome::Zero => return Ok(None),
            TrmOutcome::Rewrote => continue,
            TrmOutcome::None => {}
        }
        return Ok(Some(term));
    }
}

/// Trace and symmetry kills that annihilate the whole term.
fn kills_term(term: &TensorTerm) -> bool {
    // self-contractions within trace-free symbols
    for f in &term.factors {
        let spec = spec_of(f.sym);
        if spec.symmetry.trace_free() {
            for i in 0..f.idx.len() {
                for j in (i + 1)..f.idx.len() {
                    if f.idx[i].name == f.idx[j].name {
                        return true;
                    }
                }
            }
        }
        // skew pair carrying the same name (always zero)
        for grp in spec.symmetry.skew_groups() {
            for a in 0..grp.len() {
                for b in (a + 1)..grp.len() {
                    if f.idx[grp[a]].name == f.idx[grp[b]].name {
                        return true;
                    }
                }
            }
        }
    }
    // a symmetric pair of one factor contracted into a skew pair of another
    for (fi, f) in term.factors.iter().enumerate() {
        let fspec = spec_of(f.sym);
        for (gi, g) in term.factors.iter().enumerate() {
            if fi == gi {
                continue;
            }
            let gspec = spec_of(g.sym);
            for sgrp in fspec.symmetry.sym_groups(f.idx.len()) {
                for kgrp in gspec.symmetry.skew_groups() {
                    let mut shared = 0;
                    for &si in &sgrp {
                        for &ki in &kgrp {
                            if f.idx[si].name == g.idx[ki].name {
                                shared += 1;
                            }
                        }
                    }
                    if shared >= 2 {
                        return true;
                    }
                }
            }
            // flat-style symmetric derivative prefix against a skew pair is
            // handled in reorder/collect; the prefix is not assumed symmetric
            // here because curved strings do not commute.
        }
    }
    false
}

/// Eliminate one metric factor with a contracted slot. Returns true if a
/// rewrite happened.
fn metric_step(term: &mut TensorTerm) -> Result<bool> {
    for fi in 0..term.factors.len() {
        let spec = spec_of(term.factors[fi].sym);
        let dim: Coefficient = match spec.kind {
            SymbolKind::Metric => Coefficient::var(crate::coeff::Param::N),
            SymbolKind::TractorMetric => {
                &Coefficient::var(crate::coeff::Param::N) + &Coefficient::int(2)
            }
            _ => continue,
        };
        let a = term.factors[fi].idx[0];
        let b = term.factors[fi].idx[1];
        if a.name == b.name {
            term.factors.remove(fi);
            term.coeff = &term.coeff * &dim;
            return Ok(true);
        }
        // find a partner occurrence elsewhere
        for (sel, other) in [(a, b), (b, a)] {
            for fj in 0..term.factors.len() {
                if fj == fi {
                    continue;
                }
                let fj_factor = &mut term.factors[fj];
                let mut hit = None;
                for (pos, i) in fj_factor.iter_indices_mut().enumerate() {
                    if i.name == sel.name {
                        *i = other;
                        hit = Some(pos);
                        break;
                    }
                }
                if hit.is_some() {
                    term.factors.remove(fi);
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

enum TrmOutcome {
    None,
    Rewrote,
    Zero,
}

fn is_projector(k: SymbolKind) -> bool {
    matches!(k, SymbolKind::ProjX | SymbolKind::ProjY | SymbolKind::ProjZ)
}

/// Resolve one contracted pair of tractor projectors.
fn trm_step(term: &mut TensorTerm) -> TrmOutcome {
    for fi in 0..term.factors.len() {
        let ki = spec_of(term.factors[fi].sym).kind;
        if !is_projector(ki) {
            continue;
        }
        let ti = term.factors[fi].idx[0];
        for fj in (fi + 1)..term.factors.len() {
            let kj = spec_of(term.factors[fj].sym).kind;
            if !is_projector(kj) {
                continue;
            }
            let tj = term.factors[fj].idx[0];
            if ti.name != tj.name {
                continue;
            }
            use SymbolKind::*;
            match (ki, kj) {
                (ProjY, ProjX) | (ProjX, ProjY) => {
                    term.factors.remove(fj);
                    term.factors.remove(fi);
                    return TrmOutcome::Rewrote;
                }
                (ProjZ, ProjZ) => {
                    let sa = term.factors[fi].idx[1];
                    let sb = term.factors[fj].idx[1];
                    term.factors.remove(fj);
                    term.factors.remove(fi);
                    term.factors.push(metric_factor(sa, sb));
                    return TrmOutcome::Rewrote;
                }
                _ => return TrmOutcome::Zero,
            }
        }
    }
    TrmOutcome::None
}

// ---------------------------------------------------------------------------
// Structural canonicalization: factor order, dummy names, slot symmetry
// ---------------------------------------------------------------------------

/// Registry spec key, stable and name-free.
fn spec_key(id: SymbolId) -> String {
    let s = spec_of(id);
    format!(
        "{}/{}/{}/{:?}/{:?}",
        s.name,
        s.slots.len(),
        s.weight.render(),
        s.symmetry,
        s.kind
    )
}

fn index_desc(i: &Index, dummies: &BTreeSet<IName>) -> String {
    let k = match i.kind {
        IndexKind::Tangent => "t",
        IndexKind::Tractor => "T",
    };
    if dummies.contains(&i.name) {
        // variance-insensitive: contracted pairs may be flipped as a whole,
        // so orientation must not influence factor ordering
        format!("{k}*")
    } else {
        let v = match i.var {
            Variance::Up => "^",
            Variance::Down => "_",
        };
        format!("{v}{k}{}", i.str_name())
    }
}

/// Rename-independent factor key used for ordering and tie-group detection.
fn factor_key(f: &Factor, dummies: &BTreeSet<IName>) -> String {
    let mut s = spec_key(f.sym);
    s.push('|');
    for d in &f.derivs {
        s.push_str(&index_desc(d, dummies));
        s.push(',');
    }
    s.push('|');
    for i in &f.idx {
        s.push_str(&index_desc(i, dummies));
        s.push(',');
    }
    // record self-pairing pattern so equal-looking factors with different
    // internal wiring do not tie
    s.push('|');
    let all: Vec<&Index> = f.iter_indices().collect();
    for a in 0..all.len() {
        for b in (a + 1)..all.len() {
            if all[a].name == all[b].name {
                s.push_str(&format!("{a}-{b};"));
            }
        }
    }
    s
}

pub fn fingerprint(factors: &[Factor]) -> String {
    let mut s = String::new();
    for f in factors {
        s.push_str(&spec_key(f.sym));
        s.push('|');
        for d in &f.derivs {
            let v = if d.var == Variance::Up { '^' } else { '_' };
            s.push(v);
            s.push_str(d.str_name());
            s.push(',');
        }
        s.push('|');
        for i in &f.idx {
            let v = if i.var == Variance::Up { '^' } else { '_' };
            s.push(v);
            s.push_str(i.str_name());
            s.push(',');
        }
        s.push(';');
    }
    s
}

const PERM_CAP: usize = 720;

/// Returns canonical (coefficient, factors), or None when the term is zero
/// by antisymmetry.
fn structural(term: &TensorTerm) -> Result<Option<(Coefficient, Vec<Factor>)>> {
    let dummies = term.dummy_names();
    let mut order: Vec<usize> = (0..term.factors.len()).collect();
    let keys: Vec<String> = term
        .factors
        .iter()
        .map(|f| factor_key(f, &dummies))
        .collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));

    // tie groups
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        if let Some(last) = groups.last_mut() {
            if keys[last[0]] == keys[i] {
                last.push(i);
                continue;
            }
        }
        groups.push(vec![i]);
    }
    let nperm: usize = groups
        .iter()
        .map(|g| (1..=g.len()).product::<usize>())
        .product();

    let candidates: Vec<Vec<usize>> = if nperm <= PERM_CAP {
        enumerate_orders(&groups)
    } else {
        vec![order.clone()]
    };

    let mut best: Option<(String, Vec<Factor>, i32)> = None;
    let mut zero = false;
    for cand in candidates {
        let factors: Vec<Factor> = cand.iter().map(|&i| term.factors[i].clone()).collect();
        let (factors, sign) = rename_and_sort(factors, &dummies)?;
        let fp = fingerprint(&factors);
        match &best {
            None => best = Some((fp, factors, sign)),
            Some((bfp, _, bsign)) => {
                if fp < *bfp {
                    best = Some((fp, factors, sign));
                    zero = false;
                } else if fp == *bfp && sign != *bsign {
                    zero = true;
                }
            }
        }
    }
    let (_, factors, sign) = best.expect("at least one candidate");
    if zero {
        return Ok(None);
    }
    let coeff = if sign < 0 {
        -&term.coeff
    } else {
        term.coeff.clone()
    };
    Ok(Some((coeff, factors)))
}

fn enumerate_orders(groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for g in groups {
        let perms = permutations(g);
        let mut next = Vec::new();
        for prefix in &out {
            for p in &perms {
                let mut v = prefix.clone();
                v.extend(p.iter().copied());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn canonical_dummy(kind: IndexKind, count: usize) -> IName {
    match kind {
        IndexKind::Tangent => iname(&format!("#a{count}")),
        IndexKind::Tractor => iname(&format!("#T{count}")),
    }
}

/// Fixpoint of positional dummy renaming and symmetry slot sorting.
fn rename_and_sort(
    mut factors: Vec<Factor>,
    dummies: &BTreeSet<IName>,
) -> Result<(Vec<Factor>, i32)> {
    let mut sign = 1i32;
    for _round in 0..12 {
        let mut changed = false;

        // positional dummy renaming
        let mut map: HashMap<IName, IName> = HashMap::new();
        let mut count = 0usize;
        for f in &factors {
            for i in f.iter_indices() {
                if dummies.contains(&i.name) && !map.contains_key(&i.name) {
                    map.insert(i.name, canonical_dummy(i.kind, count));
                    count += 1;
                }
            }
        }
        for f in &mut factors {
            for i in f.iter_indices_mut() {
                if let Some(&new) = map.get(&i.name) {
                    if i.name != new {
                        i.name = new;
                        changed = true;
                    }
                }
            }
        }

        // canonical orientation of contracted pairs: the first occurrence is
        // raised (a pair may be flipped as a whole, the metric being
        // symmetric and parallel)
        let mut occurrences: HashMap<IName, usize> = HashMap::new();
        for f in &factors {
            for i in f.iter_indices() {
                *occurrences.entry(i.name).or_insert(0) += 1;
            }
        }
        let mut first_var: HashMap<IName, Variance> = HashMap::new();
        let mut flip: BTreeSet<IName> = BTreeSet::new();
        for f in &factors {
            for i in f.iter_indices() {
                if occurrences.get(&i.name) != Some(&2) {
                    continue;
                }
                match first_var.get(&i.name) {
                    None => {
                        first_var.insert(i.name, i.var);
                        if i.var == Variance::Down {
                            flip.insert(i.name);
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        if !flip.is_empty() {
            for f in &mut factors {
                for i in f.iter_indices_mut() {
                    if flip.contains(&i.name) {
                        i.var = i.var.flip();
                        changed = true;
                    }
                }
            }
        }

        // per-factor slot sorting under declared symmetries
        for f in &mut factors {
            let spec = spec_of(f.sym);
            for grp in spec.symmetry.sym_groups(f.idx.len()) {
                let mut slots: Vec<Index> = grp.iter().map(|&i| f.idx[i]).collect();
                let before = slots.clone();
                slots.sort_by(cmp_index);
                if slots != before {
                    changed = true;
                }
                for (pos, &i) in grp.iter().enumerate() {
                    f.idx[i] = slots[pos];
                }
            }
            for grp in spec.symmetry.skew_groups() {
                let mut slots: Vec<Index> = grp.iter().map(|&i| f.idx[i]).collect();
                let parity = sort_parity(&mut slots);
                if parity < 0 {
                    sign = -sign;
                }
                let before: Vec<Index> = grp.iter().map(|&i| f.idx[i]).collect();
                if slots != before {
                    changed = true;
                }
                for (pos, &i) in grp.iter().enumerate() {
                    f.idx[i] = slots[pos];
                }
            }
            if spec.symmetry.pair_exchange() {
                let first = [f.idx[0], f.idx[1]];
                let second = [f.idx[2], f.idx[3]];
                if cmp_pair(&second, &first) == std::cmp::Ordering::Less {
                    f.idx[0] = second[0];
                    f.idx[1] = second[1];
                    f.idx[2] = first[0];
                    f.idx[3] = first[1];
                    changed = true;
                }
            }
        }

        if !changed {
            return Ok((factors, sign));
        }
    }
    Err(Error::MalformedExpression(
        "slot canonicalization did not converge".into(),
    ))
}

fn cmp_index(a: &Index, b: &Index) -> std::cmp::Ordering {
    (a.str_name(), a.var).cmp(&(b.str_name(), b.var))
}

fn cmp_pair(a: &[Index; 2], b: &[Index; 2]) -> std::cmp::Ordering {
    let ka = (a[0].str_name(), a[0].var, a[1].str_name(), a[1].var);
    let kb = (b[0].str_name(), b[0].var, b[1].str_name(), b[1].var);
    ka.cmp(&kb)
}

fn sort_parity(slots: &mut [Index]) -> i32 {
    let mut parity = 1i32;
    for i in 0..slots.len() {
        for j in (i + 1)..slots.len() {
            if cmp_index(&slots[j], &slots[i]) == std::cmp::Ordering::Less {
                slots.swap(i, j);
                parity = -parity;
            }
        }
    }
    parity
}

// ---------------------------------------------------------------------------
// Derivative-string ordering
// ---------------------------------------------------------------------------

/// Sort key for a derivative index, independent of dummy names: ordered by
/// the structural location of the paired occurrence.
fn deriv_sort_key(term: &TensorTerm, fi: usize, pos: usize) -> (u8, String, usize, String, u8) {
    let f = &term.factors[fi];
    let d = f.derivs[pos];
    let varflag = if d.var == Variance::Up { 0u8 } else { 1u8 };
    // own factor first
    for (p2, d2) in f.derivs.iter().enumerate() {
        if p2 != pos && d2.name == d.name {
            // paired inside the same prefix
            return (1, String::new(), 0, d.str_name().into(), varflag);
        }
    }
    for (s, i) in f.idx.iter().enumerate() {
        if i.name == d.name {
            return (2, String::new(), s, d.str_name().into(), varflag);
        }
    }
    let dummies = term.dummy_names();
    for (fj, g) in term.factors.iter().enumerate() {
        if fj == fi {
            continue;
        }
        for (loc, i) in g.iter_indices().enumerate() {
            if i.name == d.name {
                return (3, factor_key(g, &dummies), loc, d.str_name().into(), varflag);
            }
        }
    }
    // free index
    (0, String::new(), 0, d.str_name().into(), varflag)
}

fn prefix_out_of_order(term: &TensorTerm) -> Option<(usize, usize)> {
    for (fi, f) in term.factors.iter().enumerate() {
        for pos in 0..f.derivs.len().saturating_sub(1) {
            let ka = deriv_sort_key(term, fi, pos);
            let kb = deriv_sort_key(term, fi, pos + 1);
            if kb < ka {
                return Some((fi, pos));
            }
        }
    }
    None
}

/// When a derivative string is out of canonical order, swap one adjacent
/// pair, emitting curvature corrections in curved mode.
fn reorder_step(term: &TensorTerm, mode: Mode) -> Option<Vec<TensorTerm>> {
    let (fi, pos) = prefix_out_of_order(term)?;
    let mut out = Vec::new();

    // the straight swap
    let mut swapped = term.clone();
    swapped.factors[fi].derivs.swap(pos, pos + 1);
    out.push(swapped);

    if mode == Mode::Curved {
        out.extend(commutator_terms(term, fi, pos));
    }
    Some(out)
}

/// Correction terms for exchanging nabla_u nabla_v -> nabla_v nabla_u at
/// positions (pos, pos+1): the commutator [nabla_u, nabla_v] applied to the
/// factor stripped of its outer prefix, then re-differentiated by the outer
/// prefix, times the untouched remainder of the term.
fn commutator_terms(term: &TensorTerm, fi: usize, pos: usize) -> Vec<TensorTerm> {
    let f = &term.factors[fi];
    let u = f.derivs[pos];
    let v = f.derivs[pos + 1];
    let outer: Vec<Index> = f.derivs[..pos].to_vec();
    let mut reduced = f.clone();
    reduced.derivs = f.derivs[pos + 2..].to_vec();

    // indices the commutator acts on: own slots and the remaining prefix
    let mut acted: Vec<(bool, usize, Index)> = Vec::new(); // (is_slot, position, index)
    for (p, d) in reduced.derivs.iter().enumerate() {
        acted.push((false, p, *d));
    }
    for (s, i) in reduced.idx.iter().enumerate() {
        acted.push((true, s, *i));
    }

    let mut corr = TensorExpr::zero();
    for (is_slot, p, i) in acted {
        let rho = Index {
            name: fresh_name(i.kind),
            kind: i.kind,
            var: i.var,
        };
        let mut repl = reduced.clone();
        if is_slot {
            repl.idx[p] = rho;
        } else {
            repl.derivs[p] = rho;
        }
        let gamma_kind = i.kind;
        let gamma = Index {
            name: fresh_name(gamma_kind),
            kind: gamma_kind,
            var: Variance::Down,
        };
        let (sign, curv_lo, curv_hi, metric_pair) = match i.var {
            // +g^{c gamma} R_{u v gamma rho} T(slot -> rho up)
            Variance::Up => (
                1,
                gamma,
                Index { var: Variance::Down, ..rho },
                (i, Index { var: Variance::Up, ..gamma }),
            ),
            // -g^{rho gamma} R_{u v gamma c} T(slot -> rho down)
            Variance::Down => (
                -1,
                gamma,
                Index { var: Variance::Down, ..i },
                (Index { var: Variance::Up, ..rho }, Index { var: Variance::Up, ..gamma }),
            ),
        };
        let metric_sym = match i.kind {
            IndexKind::Tangent => sym_metric(),
            IndexKind::Tractor => sym_tractor_metric(),
        };
        let lift = Factor::new(metric_sym, vec![metric_pair.0, metric_pair.1]);
        let curv = match i.kind {
            IndexKind::Tangent => riemann_expansion(u, v, curv_lo, curv_hi),
            IndexKind::Tractor => tractor_curvature(u, v, curv_lo, curv_hi),
        };
        let mut piece = curv.mul_expr(&TensorExpr::from_factor(repl));
        piece = piece.mul_expr(&TensorExpr::from_factor(lift));
        corr = corr.add(&piece.scale(&Coefficient::int(sign)));
    }

    // apply the outer prefix, outermost last
    for j in (0..outer.len()).rev() {
        corr = apply_nabla(&corr, outer[j], Mode::Curved);
    }

    // splice with the untouched factors and coefficient
    let mut rest = term.clone();
    rest.factors.remove(fi);
    let mut out = Vec::new();
    for t in corr.terms {
        let mut factors = rest.factors.clone();
        factors.extend(t.factors);
        out.push(TensorTerm {
            coeff: &rest.coeff * &t.coeff,
            factors,
        });
    }
    out
}

/// Riemann tensor with all indices fixed, decomposed into Weyl and Schouten
/// pieces: R_abcd = C_abcd + g_ca P_bd - g_cb P_ad + g_db P_ac - g_da P_bc.
pub fn riemann_expansion(a: Index, b: Index, c: Index, d: Index) -> TensorExpr {
    let weyl = TensorExpr::from_factor(Factor::new(sym_weyl(), vec![a, b, c, d]));
    let gp = |m1: Index, m2: Index, p1: Index, p2: Index, s: i64| {
        TensorExpr::from_term(TensorTerm {
            coeff: Coefficient::int(s),
            factors: vec![
                Factor::new(sym_metric(), vec![m1, m2]),
                Factor::new(sym_schouten(), vec![p1, p2]),
            ],
        })
    };
    weyl.add(&gp(c, a, b, d, 1))
        .add(&gp(c, b, a, d, -1))
        .add(&gp(d, b, a, c, 1))
        .add(&gp(d, a, b, c, -1))
}

/// Tractor curvature with the tangent pair (a, b) and tractor pair (c, e):
/// Omega_abCE = Z_C^c Z_E^e C_abce - X_C Z_E^e A_eab + X_E Z_C^e A_eab.
pub fn tractor_curvature(a: Index, b: Index, big_c: Index, big_e: Index) -> TensorExpr {
    let c = Index::up(&format!("~t{}", fresh_name(IndexKind::Tangent).0));
    let e = Index::up(&format!("~t{}", fresh_name(IndexKind::Tangent).0));
    let t1 = TensorExpr::from_term(TensorTerm {
        coeff: Coefficient::one(),
        factors: vec![
            proj_z(big_c, c),
            proj_z(big_e, e),
            Factor::new(sym_weyl(), vec![a, b, c.flipped(), e.flipped()]),
        ],
    });
    let t2 = TensorExpr::from_term(TensorTerm {
        coeff: Coefficient::int(-1),
        factors: vec![
            proj_x(big_c),
            proj_z(big_e, e),
            Factor::new(sym_cotton(), vec![e.flipped(), a, b]),
        ],
    });
    let t3 = TensorExpr::from_term(TensorTerm {
        coeff: Coefficient::one(),
        factors: vec![
            proj_x(big_e),
            proj_z(big_c, c),
            Factor::new(sym_cotton(), vec![c.flipped(), a, b]),
        ],
    });
    t1.add(&t2).add(&t3)
}
