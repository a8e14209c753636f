//! Rewriting under a conformal change of scale and the linearized
//! invariance test.
//!
//! Every symbol carries a rule expressing its hatted evaluation in unhatted
//! quantities and jets of the rescaling function; derivative prefixes are
//! peeled through the transformation of the coupled connection acting on a
//! weighted tensor. Linearized mode keeps only terms with at most one factor
//! of the active rescaling function.

use crate::coeff::{Coefficient, Param};
use crate::error::Result;
use crate::expr::canon::canonicalize;
use crate::expr::nabla::apply_nabla;
use crate::expr::*;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RescaleMode {
    Full,
    /// Discard terms containing two or more factors of the active rescaling
    /// function.
    Linearized,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RescalingContext {
    pub upsilon: SymbolId,
    pub mode: RescaleMode,
}

impl RescalingContext {
    pub fn new(upsilon: SymbolId, mode: RescaleMode) -> Self {
        RescalingContext { upsilon, mode }
    }

    pub fn linearized(upsilon: SymbolId) -> Self {
        Self::new(upsilon, RescaleMode::Linearized)
    }
}

fn ups_jet(ctx: &RescalingContext, derivs: Vec<Index>) -> Factor {
    Factor {
        sym: ctx.upsilon,
        derivs,
        idx: vec![],
    }
}

fn ups_count(ctx: &RescalingContext, t: &TensorTerm) -> usize {
    t.factors.iter().filter(|f| f.sym == ctx.upsilon).count()
}

fn prune(ctx: &RescalingContext, e: TensorExpr) -> TensorExpr {
    match ctx.mode {
        RescaleMode::Full => e,
        RescaleMode::Linearized => TensorExpr {
            terms: e
                .terms
                .into_iter()
                .filter(|t| ups_count(ctx, t) <= 1)
                .collect(),
        },
    }
}

/// Hatted evaluation of a bare factor (no derivative prefix).
fn rescale_base(f: &Factor, ctx: &RescalingContext) -> Result<TensorExpr> {
    let spec = spec_of(f.sym);
    let same = TensorExpr::from_factor(f.clone());
    Ok(match spec.kind {
        SymbolKind::Field
        | SymbolKind::Upsilon
        | SymbolKind::Metric
        | SymbolKind::TractorMetric
        | SymbolKind::Weyl
        | SymbolKind::ProjX => same,
        SymbolKind::ProjZ => {
            let big = f.idx[0];
            let small = f.idx[1];
            // Z_B^b + Upsilon^b X_B
            let extra = TensorExpr::from_term(TensorTerm {
                coeff: Coefficient::one(),
                factors: vec![ups_jet(ctx, vec![small]), proj_x(big)],
            });
            same.add(&extra)
        }
        SymbolKind::ProjY => {
            let big = f.idx[0];
            let p = Index {
                name: fresh_name(IndexKind::Tangent),
                kind: IndexKind::Tangent,
                var: Variance::Up,
            };
            // Y_B - Upsilon_b Z_B^b - 1/2 Upsilon_c Upsilon^c X_B
            let t1 = TensorExpr::from_term(TensorTerm {
                coeff: Coefficient::int(-1),
                factors: vec![ups_jet(ctx, vec![p.flipped()]), proj_z(big, p)],
            });
            let mut out = same.add(&t1);
            if ctx.mode == RescaleMode::Full {
                let c = Index {
                    name: fresh_name(IndexKind::Tangent),
                    kind: IndexKind::Tangent,
                    var: Variance::Up,
                };
                let t2 = TensorExpr::from_term(TensorTerm {
                    coeff: Coefficient::frac(-1, 2),
                    factors: vec![
                        ups_jet(ctx, vec![c]),
                        ups_jet(ctx, vec![c.flipped()]),
                        proj_x(big),
                    ],
                });
                out = out.add(&t2);
            }
            out
        }
        SymbolKind::Schouten => {
            let a = f.idx[0];
            let b = f.idx[1];
            // P_ab - nabla_a Upsilon_b (+ Upsilon_a Upsilon_b
            //   - 1/2 Upsilon^c Upsilon_c g_ab in full mode)
            let t1 = TensorExpr::from_term(TensorTerm {
                coeff: Coefficient::int(-1),
                factors: vec![ups_jet(ctx, vec![a, b])],
            });
            let mut out = same.add(&t1);
            if ctx.mode == RescaleMode::Full {
                let t2 = TensorExpr::from_term(TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![ups_jet(ctx, vec![a]), ups_jet(ctx, vec![b])],
                });
                let c = Index {
                    name: fresh_name(IndexKind::Tangent),
                    kind: IndexKind::Tangent,
                    var: Variance::Up,
                };
                let t3 = TensorExpr::from_term(TensorTerm {
                    coeff: Coefficient::frac(-1, 2),
                    factors: vec![
                        ups_jet(ctx, vec![c]),
                        ups_jet(ctx, vec![c.flipped()]),
                        metric_factor(a, b),
                    ],
                });
                out = out.add(&t2).add(&t3);
            }
            out
        }
        SymbolKind::SchoutenTrace => {
            // J - Delta Upsilon (+ (1 - n/2) Upsilon^c Upsilon_c in full mode)
            let c = Index {
                name: fresh_name(IndexKind::Tangent),
                kind: IndexKind::Tangent,
                var: Variance::Up,
            };
            let t1 = TensorExpr::from_term(TensorTerm {
                coeff: Coefficient::int(-1),
                factors: vec![ups_jet(ctx, vec![c, c.flipped()])],
            });
            let mut out = same.add(&t1);
            if ctx.mode == RescaleMode::Full {
                let c2 = Index {
                    name: fresh_name(IndexKind::Tangent),
                    kind: IndexKind::Tangent,
                    var: Variance::Up,
                };
                let half_n = &Coefficient::one()
                    - &(&Coefficient::var(Param::N) * &Coefficient::frac(1, 2));
                let t2 = TensorExpr::from_term(TensorTerm {
                    coeff: half_n,
                    factors: vec![ups_jet(ctx, vec![c2]), ups_jet(ctx, vec![c2.flipped()])],
                });
                out = out.add(&t2);
            }
            out
        }
        SymbolKind::Cotton => {
            // A_abc + Upsilon^d C_dabc
            let p = Index {
                name: fresh_name(IndexKind::Tangent),
                kind: IndexKind::Tangent,
                var: Variance::Up,
            };
            let t1 = TensorExpr::from_term(TensorTerm {
                coeff: Coefficient::one(),
                factors: vec![
                    ups_jet(ctx, vec![p]),
                    Factor::new(sym_weyl(), vec![p.flipped(), f.idx[0], f.idx[1], f.idx[2]]),
                ],
            });
            same.add(&t1)
        }
    })
}

/// Hatted covariant derivative of an already-rescaled expression in a DOWN
/// direction: the unhatted coupled derivative plus jet corrections from the
/// density weight and every free tangent index.
fn hat_nabla_down(e: &TensorExpr, dir: Index, ctx: &RescalingContext, mode: Mode) -> Result<TensorExpr> {
    debug_assert_eq!(dir.var, Variance::Down);
    let mut out = apply_nabla(e, dir, mode);
    for term in &e.terms {
        let w = term.weight();
        let dummies = term.dummy_names();
        let mut free_tangent: Vec<(usize, usize, Index)> = Vec::new(); // factor, slot-or-deriv pos encoded
        let mut s_down = 0i64;
        let mut s_up = 0i64;
        for (fi, f) in term.factors.iter().enumerate() {
            for (pos, i) in f.iter_indices().enumerate() {
                if i.kind == IndexKind::Tangent && !dummies.contains(&i.name) {
                    free_tangent.push((fi, pos, *i));
                    match i.var {
                        Variance::Down => s_down += 1,
                        Variance::Up => s_up += 1,
                    }
                }
            }
        }
        // weight term: (w - s_down + s_up) Upsilon_dir * term
        let pref = &(&w - &Coefficient::int(s_down)) + &Coefficient::int(s_up);
        if !pref.is_zero() {
            let mut t = term.clone();
            t.coeff = &t.coeff * &pref;
            t.factors.push(ups_jet(ctx, vec![dir]));
            out.terms.push(t);
        }
        for (fi, pos, i) in free_tangent {
            let set_index = |t: &mut TensorTerm, new: Index| {
                let f = &mut t.factors[fi];
                let nd = f.derivs.len();
                if pos < nd {
                    f.derivs[pos] = new;
                } else {
                    f.idx[pos - nd] = new;
                }
            };
            match i.var {
                Variance::Down => {
                    // - Upsilon_b T(b -> dir)
                    let mut t1 = term.clone();
                    t1.coeff = -&t1.coeff;
                    set_index(&mut t1, Index { name: dir.name, ..i });
                    t1.factors.push(ups_jet(ctx, vec![i]));
                    out.terms.push(t1);
                    // + Upsilon^p T(b -> p) g_{b dir}
                    let p = Index {
                        name: fresh_name(IndexKind::Tangent),
                        kind: IndexKind::Tangent,
                        var: Variance::Down,
                    };
                    let mut t2 = term.clone();
                    set_index(&mut t2, p);
                    t2.factors.push(ups_jet(ctx, vec![p.flipped()]));
                    t2.factors.push(metric_factor(i, dir));
                    out.terms.push(t2);
                }
                Variance::Up => {
                    // - Upsilon^b g_{dir p} T(b -> p)
                    let p = Index {
                        name: fresh_name(IndexKind::Tangent),
                        kind: IndexKind::Tangent,
                        var: Variance::Up,
                    };
                    let mut t1 = term.clone();
                    t1.coeff = -&t1.coeff;
                    set_index(&mut t1, p);
                    t1.factors.push(ups_jet(ctx, vec![i]));
                    t1.factors.push(metric_factor(dir, p.flipped()));
                    out.terms.push(t1);
                    // + Upsilon_p T(b -> p) delta_dir^b
                    let q = Index {
                        name: fresh_name(IndexKind::Tangent),
                        kind: IndexKind::Tangent,
                        var: Variance::Up,
                    };
                    let mut t2 = term.clone();
                    set_index(&mut t2, q);
                    t2.factors.push(ups_jet(ctx, vec![q.flipped()]));
                    t2.factors.push(metric_factor(dir, i));
                    out.terms.push(t2);
                }
            }
        }
    }
    Ok(prune(ctx, out))
}

fn hat_nabla(e: &TensorExpr, dir: Index, ctx: &RescalingContext, mode: Mode) -> Result<TensorExpr> {
    match dir.var {
        Variance::Down => hat_nabla_down(e, dir, ctx, mode),
        Variance::Up => {
            let q = Index {
                name: fresh_name(IndexKind::Tangent),
                kind: IndexKind::Tangent,
                var: Variance::Down,
            };
            let inner = hat_nabla_down(e, q, ctx, mode)?;
            let lift = metric_factor(dir, q.flipped());
            Ok(inner.mul_expr(&TensorExpr::from_factor(lift)))
        }
    }
}

/// Rewrite `e` as its hatted-scale evaluation in unhatted quantities.
pub fn rescale_expr(e: &TensorExpr, ctx: &RescalingContext, mode: Mode) -> Result<TensorExpr> {
    let mut out = TensorExpr::zero();
    for term in &e.terms {
        let mut acc = TensorExpr::from_term(TensorTerm {
            coeff: term.coeff.clone(),
            factors: vec![],
        });
        for f in &term.factors {
            let mut base = rescale_base(&Factor::new(f.sym, f.idx.clone()), ctx)?;
            for j in (0..f.derivs.len()).rev() {
                base = hat_nabla(&base, f.derivs[j], ctx, mode)?;
            }
            acc = prune(ctx, acc.mul_expr(&base));
        }
        out = out.add(&acc);
    }
    Ok(prune(ctx, out))
}

/// The linearized invariance residual: hatted evaluation minus the original,
/// canonicalized. Zero certifies invariance to first order.
pub fn linearized_invariance_residual(
    op: &TensorExpr,
    upsilon: SymbolId,
    mode: Mode,
) -> Result<TensorExpr> {
    let ctx = RescalingContext::linearized(upsilon);
    let hatted = rescale_expr(op, &ctx, mode)?;
    canonicalize(&hatted.sub(op), mode)
}

/// Convenience: a default rescaling function symbol.
pub fn default_upsilon() -> SymbolId {
    sym_upsilon("U")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::canon::expr_eq;
    use crate::expr::nabla::{apply_box_laplacian, apply_nabla_string};

    fn f_expr() -> TensorExpr {
        TensorExpr::from_factor(Factor::new(sym_f(), vec![]))
    }

    #[test]
    fn gradient_of_density_transforms_with_weight_term() {
        // hat nabla_a f = nabla_a f + w Upsilon_a f
        let ups = default_upsilon();
        let ctx = RescalingContext::linearized(ups);
        let df = apply_nabla_string(&f_expr(), &[Index::down("a")], Mode::Curved);
        let hat = rescale_expr(&df, &ctx, Mode::Curved).unwrap();
        let expect = df.add(&TensorExpr::from_term(TensorTerm {
            coeff: Coefficient::var(Param::W),
            factors: vec![
                Factor {
                    sym: ups,
                    derivs: vec![Index::down("a")],
                    idx: vec![],
                },
                Factor::new(sym_f(), vec![]),
            ],
        }));
        assert!(expr_eq(&hat, &expect, Mode::Curved).unwrap());
    }

    #[test]
    fn schouten_linearized_rule() {
        let ups = default_upsilon();
        let ctx = RescalingContext::linearized(ups);
        let p = TensorExpr::from_factor(Factor::new(
            sym_schouten(),
            vec![Index::down("a"), Index::down("b")],
        ));
        let hat = rescale_expr(&p, &ctx, Mode::Curved).unwrap();
        let expect = p.sub(&TensorExpr::from_factor(Factor {
            sym: ups,
            derivs: vec![Index::down("a"), Index::down("b")],
            idx: vec![],
        }));
        assert!(expr_eq(&hat, &expect, Mode::Curved).unwrap());
    }

    #[test]
    fn rescale_with_no_jets_is_identity_on_projectors() {
        // X is invariant outright
        let ups = default_upsilon();
        let ctx = RescalingContext::linearized(ups);
        let x = TensorExpr::from_factor(proj_x(Index::tractor("A", Variance::Down)));
        let hat = rescale_expr(&x, &ctx, Mode::Curved).unwrap();
        assert!(expr_eq(&hat, &x, Mode::Curved).unwrap());
    }

    #[test]
    fn plain_laplacian_is_not_invariant() {
        let ups = default_upsilon();
        let box_f = apply_box_laplacian(&f_expr(), Mode::Curved);
        let res = linearized_invariance_residual(&box_f, ups, Mode::Curved).unwrap();
        assert!(!res.is_zero());
    }
}
