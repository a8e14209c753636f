//! Symmetrization, trace-free projection, and symbol-space decomposition.

use super::canon::canonicalize;
use super::*;
use crate::coeff::Coefficient;
use crate::linsolve;
use num_bigint::BigInt;
use num_rational::BigRational;

fn slot_indices(e: &TensorExpr, slots: &[&str]) -> Result<Vec<Index>> {
    let free = e.free_indices()?;
    let mut out = Vec::new();
    let mut variance: Option<Variance> = None;
    for s in slots {
        let found: Vec<_> = free.iter().filter(|(n, _, _)| n == s).collect();
        let (name, kind, var) = found.first().ok_or_else(|| {
            Error::MalformedExpression(format!("slot `{s}` is not a free index"))
        })?;
        if *kind != IndexKind::Tangent {
            return Err(Error::MixedVariance(format!("slot `{s}` is not tangent")));
        }
        match variance {
            None => variance = Some(*var),
            Some(v) if v != *var => {
                return Err(Error::MixedVariance(format!(
                    "slot `{s}` has variance different from earlier slots"
                )))
            }
            _ => {}
        }
        out.push(Index {
            name: iname(name),
            kind: *kind,
            var: *var,
        });
    }
    Ok(out)
}

/// Average over all permutations of the named free tangent slots.
pub fn symmetrize(e: &TensorExpr, slots: &[&str]) -> Result<TensorExpr> {
    let idx = slot_indices(e, slots)?;
    if idx.len() <= 1 {
        return Ok(e.clone());
    }
    let names: Vec<IName> = idx.iter().map(|i| i.name).collect();
    let perms = perm_list(names.len());
    let mut acc = TensorExpr::zero();
    for p in &perms {
        // two-step rename through temporaries to make it simultaneous
        let temps: Vec<IName> = names.iter().map(|_| fresh_name(IndexKind::Tangent)).collect();
        let m1: HashMap<IName, IName> = names.iter().copied().zip(temps.iter().copied()).collect();
        let m2: HashMap<IName, IName> = temps
            .iter()
            .copied()
            .zip(p.iter().map(|&i| names[i]))
            .collect();
        acc = acc.add(&e.rename_free(&m1).rename_free(&m2));
    }
    let k = BigRational::new(BigInt::from(1), BigInt::from(perms.len() as i64));
    Ok(acc.scale(&Coefficient::rat(k)))
}

fn perm_list(k: usize) -> Vec<Vec<usize>> {
    fn go(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let x = rest.remove(i);
            for mut p in go(rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    go((0..k).collect())
}

/// Contract a pair of the named free slots (a conformal-metric trace).
fn trace_pair(e: &TensorExpr, a: IName, b: IName) -> TensorExpr {
    let mut out = e.clone();
    for t in &mut out.terms {
        let fresh = fresh_name(IndexKind::Tangent);
        let mut first = true;
        for f in &mut t.factors {
            for i in f.iter_indices_mut() {
                if i.name == a {
                    i.name = fresh;
                } else if i.name == b {
                    i.name = fresh;
                    if first {
                        // flip exactly the b-occurrence so the pair contracts
                        i.var = i.var.flip();
                        first = false;
                    }
                }
            }
        }
    }
    out
}

/// One candidate for the trace-free projector: m metric blocks on the first
/// 2m slots times the m-fold trace of e, symmetrized over all slots.
fn tfp_basis(e: &TensorExpr, idx: &[Index], m: usize) -> Result<TensorExpr> {
    let mut traced = e.clone();
    for j in 0..m {
        traced = trace_pair(&traced, idx[2 * j].name, idx[2 * j + 1].name);
    }
    for j in 0..m {
        let f = metric_factor(idx[2 * j], idx[2 * j + 1]);
        traced = traced.mul_expr(&TensorExpr::from_factor(f));
    }
    let slot_names: Vec<&str> = idx.iter().map(|i| i.str_name()).collect();
    symmetrize(&traced, &slot_names)
}

static TFP_CACHE: LazyLock<RwLock<HashMap<usize, Vec<Coefficient>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Coefficients of the rank-r symmetric trace-free projector, solved from the
/// vanishing-trace conditions over the field of rational functions of n.
fn tfp_coefficients(rank: usize) -> Result<Vec<Coefficient>> {
    if let Some(v) = TFP_CACHE.read().unwrap().get(&rank) {
        return Ok(v.clone());
    }
    let nblocks = rank / 2;
    // generic symmetric probe
    let u = sym_tensor(
        "~tfpU",
        rank,
        Variance::Up,
        Coefficient::zero(),
        Symmetry::Symmetric,
    );
    let names: Vec<String> = (0..rank).map(|i| format!("~s{i}")).collect();
    let idx: Vec<Index> = names.iter().map(|s| Index::up(s)).collect();
    let probe = TensorExpr::from_factor(Factor::new(u, idx.clone()));

    let mut basis = Vec::new();
    for m in 0..=nblocks {
        basis.push(tfp_basis(&probe, &idx, m)?);
    }
    // trace over the first two slots must vanish
    let mut rows_by_key: BTreeMap<String, Vec<Coefficient>> = BTreeMap::new();
    for (m, b) in basis.iter().enumerate() {
        let traced = trace_pair(b, idx[0].name, idx[1].name);
        let c = canonicalize(&traced, Mode::Flat)?;
        for t in c.terms {
            let key = super::canon::fingerprint(&t.factors);
            let row = rows_by_key
                .entry(key)
                .or_insert_with(|| vec![Coefficient::zero(); nblocks + 1]);
            row[m] = &row[m] + &t.coeff;
        }
    }
    let rows: Vec<Vec<Coefficient>> = rows_by_key.into_values().collect();
    let kernel = linsolve::kernel(&rows, nblocks + 1);
    if kernel.len() != 1 {
        return Err(Error::DegenerateWeight {
            dim: kernel.len(),
            detail: format!(" while solving the rank-{rank} trace-free projector"),
        });
    }
    let v = &kernel[0];
    if v[0].is_zero() {
        return Err(Error::MalformedExpression(
            "trace-free projector has vanishing identity part".into(),
        ));
    }
    let inv = v[0].inverse()?;
    let coeffs: Vec<Coefficient> = v.iter().map(|c| c * &inv).collect();
    TFP_CACHE.write().unwrap().insert(rank, coeffs.clone());
    Ok(coeffs)
}

/// Projection onto the symmetric trace-free part over the named slots.
pub fn trace_free_project(e: &TensorExpr, slots: &[&str]) -> Result<TensorExpr> {
    let idx = slot_indices(e, slots)?;
    let rank = idx.len();
    if rank <= 1 {
        return Ok(e.clone());
    }
    let coeffs = tfp_coefficients(rank)?;
    let mut acc = TensorExpr::zero();
    for (m, c) in coeffs.iter().enumerate() {
        acc = acc.add(&tfp_basis(e, &idx, m)?.scale(c));
    }
    Ok(acc)
}

/// Irreducible components (k', l, delta') of the rank-k symbol space at
/// weight delta: one component (k - 2i, i, delta + 2i) per 0 <= i <= k/2.
pub fn decompose_symbol_space(k: usize, delta: &Coefficient) -> Vec<(usize, usize, Coefficient)> {
    (0..=k / 2)
        .map(|i| {
            (
                k - 2 * i,
                i,
                delta + &Coefficient::int(2 * i as i64),
            )
        })
        .collect()
}
