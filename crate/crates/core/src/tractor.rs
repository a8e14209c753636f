//! Tractor-calculus operators: the second-order invariant D-operator, the
//! fundamental derivative and its square, adjoint projectors built from skew
//! pairs of standard tractor slots, the curvature of the tractor connection,
//! and the flat commutation identities for symmetrized gradients and
//! Laplacian powers.

use crate::coeff::{Coefficient, Param};
use crate::error::{Error, Result};
use crate::expr::canon::tractor_curvature;
use crate::expr::nabla::{apply_box_laplacian, apply_laplacian_power, apply_nabla, apply_nabla_string};
use crate::expr::ops::trace_free_project;
use crate::expr::*;

fn coeff_n() -> Coefficient {
    Coefficient::var(Param::N)
}

/// n + 2w - 2 for a symbolic weight w.
fn d_prefactor(w: &Coefficient) -> Coefficient {
    &(&coeff_n() + &(&Coefficient::int(2) * w)) - &Coefficient::int(2)
}

fn fresh_tangent(var: Variance) -> Index {
    Index {
        name: fresh_name(IndexKind::Tangent),
        kind: IndexKind::Tangent,
        var,
    }
}

pub fn fresh_tractor(var: Variance) -> Index {
    Index {
        name: fresh_name(IndexKind::Tractor),
        kind: IndexKind::Tractor,
        var,
    }
}

/// D_A e = (n+2w-2) w Y_A e + (n+2w-2) Z_Aa nabla^a e - X_A (Delta + w J) e.
/// Lowers the conformal weight by one; the input must have a well-defined
/// weight.
pub fn apply_tractor_d(e: &TensorExpr, out: Index, mode: Mode) -> Result<TensorExpr> {
    debug_assert_eq!(out.kind, IndexKind::Tractor);
    let w = e.weight()?;
    let pref = d_prefactor(&w);

    let t1 = TensorExpr::from_factor(proj_y(out))
        .mul_expr(e)
        .scale(&(&pref * &w));

    let a = fresh_tangent(Variance::Up);
    let t2 = TensorExpr::from_factor(proj_z(out, a))
        .mul_expr(&apply_nabla(e, a.flipped(), mode))
        .scale(&pref);

    let mut box_e = apply_box_laplacian(e, mode);
    let j_term = TensorExpr::from_factor(Factor::new(sym_schouten_trace(), vec![]))
        .mul_expr(e)
        .scale(&w);
    box_e = box_e.add(&j_term);
    let t3 = TensorExpr::from_factor(proj_x(out))
        .mul_expr(&box_e)
        .scale(&Coefficient::int(-1));

    Ok(t1.add(&t2).add(&t3))
}

// ---------------------------------------------------------------------------
// Adjoint projectors (skew pairs of standard tractor slots)
// ---------------------------------------------------------------------------

/// An adjoint-tractor slot: a skew pair of standard tractor index names.
#[derive(Clone, Copy, Debug)]
pub struct AdjIndex {
    pub a1: Index,
    pub a2: Index,
}

impl AdjIndex {
    pub fn fresh(var: Variance) -> AdjIndex {
        AdjIndex {
            a1: fresh_tractor(var),
            a2: fresh_tractor(var),
        }
    }

    pub fn named(n1: &str, n2: &str, var: Variance) -> AdjIndex {
        AdjIndex {
            a1: Index::tractor(n1, var),
            a2: Index::tractor(n2, var),
        }
    }

    pub fn flipped(&self) -> AdjIndex {
        AdjIndex {
            a1: self.a1.flipped(),
            a2: self.a2.flipped(),
        }
    }
}

fn skew_pair(f1: fn(AdjIndex) -> Vec<Factor>, a: AdjIndex) -> TensorExpr {
    let swapped = AdjIndex { a1: a.a2, a2: a.a1 };
    let t1 = TensorTerm {
        coeff: Coefficient::frac(1, 2),
        factors: f1(a),
    };
    let t2 = TensorTerm {
        coeff: Coefficient::frac(-1, 2),
        factors: f1(swapped),
    };
    TensorExpr { terms: vec![t1, t2] }
}

/// W_A = X_[A1 Y_A2].
pub fn adj_w(a: AdjIndex) -> TensorExpr {
    skew_pair(|p| vec![proj_x(p.a1), proj_y(p.a2)], a)
}

/// X_A^s = X_[A1 Z_A2]^s.
pub fn adj_x(a: AdjIndex, small: Index) -> TensorExpr {
    let mk = move |p: AdjIndex| vec![proj_x(p.a1), proj_z(p.a2, small)];
    skew_pair_dyn(mk, a)
}

/// Y_A^s = Y_[A1 Z_A2]^s.
pub fn adj_y(a: AdjIndex, small: Index) -> TensorExpr {
    let mk = move |p: AdjIndex| vec![proj_y(p.a1), proj_z(p.a2, small)];
    skew_pair_dyn(mk, a)
}

fn skew_pair_dyn<F: Fn(AdjIndex) -> Vec<Factor>>(f1: F, a: AdjIndex) -> TensorExpr {
    let swapped = AdjIndex { a1: a.a2, a2: a.a1 };
    let t1 = TensorTerm {
        coeff: Coefficient::frac(1, 2),
        factors: f1(a),
    };
    let t2 = TensorTerm {
        coeff: Coefficient::frac(-1, 2),
        factors: f1(swapped),
    };
    TensorExpr { terms: vec![t1, t2] }
}

// ---------------------------------------------------------------------------
// Fundamental derivative and curved Casimir
// ---------------------------------------------------------------------------

/// The sharp action of the adjoint endomorphism on every free tractor slot:
/// H_A # F, with H_AB^P = h_[A1|B| h_A2]^P.
fn sharp_action(e: &TensorExpr, a: AdjIndex) -> TensorExpr {
    let h = sym_tractor_metric();
    let mut out = TensorExpr::zero();
    for term in &e.terms {
        let dummies = term.dummy_names();
        for (fi, f) in term.factors.iter().enumerate() {
            for (slot, i) in f.idx.iter().enumerate() {
                if i.kind != IndexKind::Tractor || dummies.contains(&i.name) {
                    continue;
                }
                let r = fresh_tractor(i.var);
                let mk = |first: Index, second: Index, sign: i64, repl: Index| {
                    let mut t = term.clone();
                    t.coeff = &t.coeff * &Coefficient::frac(sign, 2);
                    t.factors[fi].idx[slot] = repl;
                    match i.var {
                        Variance::Down => {
                            // + H_{A C}^R F_R = 1/2 (h_{A1 C} h_{A2}^R - h_{A2 C} h_{A1}^R) F_R
                            t.factors.push(Factor::new(h, vec![first, *i]));
                            t.factors
                                .push(Factor::new(h, vec![second, repl.flipped()]));
                        }
                        Variance::Up => {
                            // - H_{A R}^C F^R
                            t.factors.push(Factor::new(h, vec![first, repl.flipped()]));
                            t.factors.push(Factor::new(h, vec![second, *i]));
                        }
                    }
                    t
                };
                match i.var {
                    Variance::Down => {
                        out.terms.push(mk(a.a1, a.a2, 1, r));
                        out.terms.push(mk(a.a2, a.a1, -1, r));
                    }
                    Variance::Up => {
                        out.terms.push(mk(a.a1, a.a2, -1, r));
                        out.terms.push(mk(a.a2, a.a1, 1, r));
                    }
                }
            }
        }
    }
    out
}

/// Fundamental derivative D_A e = w W_A e + X_A^a nabla_a e + H_A # e,
/// with the adjoint slot written as the skew pair `a`.
pub fn fundamental_derivative(e: &TensorExpr, a: AdjIndex, mode: Mode) -> Result<TensorExpr> {
    let w = e.weight()?;
    let t1 = adj_w(a).mul_expr(e).scale(&w);
    let p = fresh_tangent(Variance::Up);
    let t2 = adj_x(a, p).mul_expr(&apply_nabla(e, p.flipped(), mode));
    let t3 = sharp_action(e, a);
    Ok(t1.add(&t2).add(&t3))
}

/// Curved Casimir: contraction of two fundamental derivatives.
pub fn curved_casimir_apply(e: &TensorExpr, mode: Mode) -> Result<TensorExpr> {
    let a = AdjIndex::fresh(Variance::Down);
    let inner = fundamental_derivative(e, a, mode)?;
    let outer = fundamental_derivative(&inner, a.flipped(), mode)?;
    Ok(outer)
}

// ---------------------------------------------------------------------------
// Tractor curvature
// ---------------------------------------------------------------------------

/// Omega_ab C E as an expression in Weyl and Cotton factors.
pub fn tractor_curvature_expand(a: Index, b: Index, big_c: Index, big_e: Index) -> TensorExpr {
    tractor_curvature(a, b, big_c, big_e)
}

// ---------------------------------------------------------------------------
// Flat commutation identities
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProjectorCase {
    Y,
    Z,
    X,
}

fn require_flat(mode: Mode) -> Result<()> {
    if mode != Mode::Flat {
        return Err(Error::ModeError { expected: "flat" });
    }
    Ok(())
}

fn slot_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("a{i}")).collect()
}

/// Field and projector product the identities act on: projector(B) applied
/// to a generic density; for the Z case the field carries one lower slot.
fn case_field(case: ProjectorCase, w: &Coefficient) -> (TensorExpr, Option<Index>) {
    match case {
        ProjectorCase::Y | ProjectorCase::X => {
            let rho = sym_scalar("rho", w.clone());
            (TensorExpr::from_factor(Factor::new(rho, vec![])), None)
        }
        ProjectorCase::Z => {
            let mu = sym_tensor("mu", 1, Variance::Down, w.clone(), Symmetry::None);
            let b = fresh_tangent(Variance::Down);
            (
                TensorExpr::from_factor(Factor::new(mu, vec![b])),
                Some(b),
            )
        }
    }
}

/// Left-hand side nabla_(a1...ak)0 [proj_B field] computed directly.
pub fn sym_gradient_lhs(k: usize, case: ProjectorCase, mode: Mode) -> Result<TensorExpr> {
    require_flat(mode)?;
    let w = Coefficient::var(Param::W);
    let big = Index::tractor("B", Variance::Down);
    let (field, small) = case_field(case, &w);
    let proj = match case {
        ProjectorCase::Y => TensorExpr::from_factor(proj_y(big)),
        ProjectorCase::X => TensorExpr::from_factor(proj_x(big)),
        ProjectorCase::Z => {
            TensorExpr::from_factor(proj_z(big, small.unwrap().flipped()))
        }
    };
    let base = proj.mul_expr(&field);
    let names = slot_names(k);
    let dirs: Vec<Index> = names.iter().map(|s| Index::down(s)).collect();
    let e = apply_nabla_string(&base, &dirs, Mode::Flat);
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    trace_free_project(&e, &refs)
}

/// Right-hand side of the flat symmetrized-gradient commutation identity.
pub fn commute_sym_gradient_flat(k: usize, case: ProjectorCase, mode: Mode) -> Result<TensorExpr> {
    require_flat(mode)?;
    let w = Coefficient::var(Param::W);
    let big = Index::tractor("B", Variance::Down);
    let (field, small) = case_field(case, &w);
    let names = slot_names(k);
    let dirs: Vec<Index> = names.iter().map(|s| Index::down(s)).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();

    let full_string = |e: &TensorExpr| apply_nabla_string(e, &dirs, Mode::Flat);
    let tail_string = |e: &TensorExpr| apply_nabla_string(e, &dirs[1..], Mode::Flat);

    let out = match case {
        ProjectorCase::Y => {
            let t = TensorExpr::from_factor(proj_y(big)).mul_expr(&full_string(&field));
            trace_free_project(&t, &refs)?
        }
        ProjectorCase::Z => {
            let b = small.unwrap();
            // -k Y_B delta^b_(a1 nabla_a2..ak)0 mu_b + Z_B^b nabla_(a1..ak)0 mu_b
            let mut t1 = TensorExpr::zero();
            if k >= 1 {
                let delta = metric_factor(b.flipped(), dirs[0]);
                let inner = TensorExpr::from_factor(proj_y(big))
                    .mul_expr(&TensorExpr::from_factor(delta))
                    .mul_expr(&tail_string(&field));
                t1 = inner.scale(&Coefficient::int(-(k as i64)));
            }
            let t2 = TensorExpr::from_factor(proj_z(big, b.flipped()))
                .mul_expr(&full_string(&field));
            trace_free_project(&t1.add(&t2), &refs)?
        }
        ProjectorCase::X => {
            // k Z_B^b g_b(a1 nabla_a2..ak)0 rho + X_B nabla_(a1..ak)0 rho
            let mut t1 = TensorExpr::zero();
            if k >= 1 {
                let b = fresh_tangent(Variance::Up);
                let inner = TensorExpr::from_factor(proj_z(big, b))
                    .mul_expr(&TensorExpr::from_factor(metric_factor(
                        b.flipped(),
                        dirs[0],
                    )))
                    .mul_expr(&tail_string(&field));
                t1 = inner.scale(&Coefficient::int(k as i64));
            }
            let t2 = TensorExpr::from_factor(proj_x(big)).mul_expr(&full_string(&field));
            trace_free_project(&t1.add(&t2), &refs)?
        }
    };
    Ok(out)
}

/// Left-hand side Delta^l [proj_B field] computed directly.
pub fn laplacian_lhs(ell: usize, case: ProjectorCase, mode: Mode) -> Result<TensorExpr> {
    require_flat(mode)?;
    let w = Coefficient::var(Param::W);
    let big = Index::tractor("B", Variance::Down);
    let (field, small) = case_field(case, &w);
    let proj = match case {
        ProjectorCase::Y => TensorExpr::from_factor(proj_y(big)),
        ProjectorCase::X => TensorExpr::from_factor(proj_x(big)),
        ProjectorCase::Z => TensorExpr::from_factor(proj_z(big, small.unwrap().flipped())),
    };
    Ok(apply_laplacian_power(&proj.mul_expr(&field), ell, Mode::Flat))
}

/// Right-hand side of the flat Laplacian-power commutation identity.
pub fn commute_laplacian_flat(ell: usize, case: ProjectorCase, mode: Mode) -> Result<TensorExpr> {
    require_flat(mode)?;
    let w = Coefficient::var(Param::W);
    let big = Index::tractor("B", Variance::Down);
    let (field, small) = case_field(case, &w);
    let lap = |e: &TensorExpr, p: usize| apply_laplacian_power(e, p, Mode::Flat);

    Ok(match case {
        ProjectorCase::Y => TensorExpr::from_factor(proj_y(big)).mul_expr(&lap(&field, ell)),
        ProjectorCase::Z => {
            let b = small.unwrap();
            // -2l Y_B nabla^b Delta^(l-1) mu_b + Z_B^b Delta^l mu_b
            let mut t1 = TensorExpr::zero();
            if ell >= 1 {
                let inner = apply_nabla(&lap(&field, ell - 1), b.flipped(), Mode::Flat);
                t1 = TensorExpr::from_factor(proj_y(big))
                    .mul_expr(&inner)
                    .scale(&Coefficient::int(-2 * ell as i64));
            }
            let t2 = TensorExpr::from_factor(proj_z(big, b.flipped())).mul_expr(&lap(&field, ell));
            t1.add(&t2)
        }
        ProjectorCase::X => {
            // -l(n+2l-2) Y_B Delta^(l-1) rho + 2l Z_B^b nabla_b Delta^(l-1) rho
            //   + X_B Delta^l rho
            let mut out = TensorExpr::from_factor(proj_x(big)).mul_expr(&lap(&field, ell));
            if ell >= 1 {
                let c1 = &Coefficient::int(-(ell as i64))
                    * &(&(&coeff_n() + &Coefficient::int(2 * ell as i64)) - &Coefficient::int(2));
                let t1 = TensorExpr::from_factor(proj_y(big))
                    .mul_expr(&lap(&field, ell - 1))
                    .scale(&c1);
                let b = fresh_tangent(Variance::Up);
                let t2 = TensorExpr::from_factor(proj_z(big, b))
                    .mul_expr(&apply_nabla(&lap(&field, ell - 1), b.flipped(), Mode::Flat))
                    .scale(&Coefficient::int(2 * ell as i64));
                out = out.add(&t1).add(&t2);
            }
            out
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::canon::{canonicalize, expr_eq};
    use crate::rescale::{default_upsilon, linearized_invariance_residual};

    fn f_expr() -> TensorExpr {
        TensorExpr::from_factor(Factor::new(sym_f(), vec![]))
    }

    #[test]
    fn tractor_d_lowers_weight_by_one() {
        let e = f_expr();
        let out = apply_tractor_d(&e, Index::tractor("A", Variance::Down), Mode::Curved).unwrap();
        let w = out.weight().unwrap();
        assert_eq!(
            w,
            &Coefficient::var(Param::W) - &Coefficient::int(1)
        );
    }

    #[test]
    fn tractor_d_is_invariant_on_densities() {
        let e = f_expr();
        let d = apply_tractor_d(&e, Index::tractor("A", Variance::Down), Mode::Curved).unwrap();
        let res = linearized_invariance_residual(&d, default_upsilon(), Mode::Curved).unwrap();
        assert!(
            res.is_zero(),
            "tractor-D residual nonzero:\n{}",
            crate::expr::render::render_expr(&res)
        );
    }

    #[test]
    fn tractor_metric_is_parallel() {
        // nabla_a of the projector expansion of h_BC vanishes
        let b = Index::tractor("B", Variance::Down);
        let c = Index::tractor("C", Variance::Down);
        let p = fresh_tangent(Variance::Up);
        let h_exp = TensorExpr {
            terms: vec![
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_y(b), proj_x(c)],
                },
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_z(b, p), proj_z(c, p.flipped())],
                },
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_x(b), proj_y(c)],
                },
            ],
        };
        let d = apply_nabla(&h_exp, Index::down("a"), Mode::Curved);
        let z = canonicalize(&d, Mode::Curved).unwrap();
        assert!(z.is_zero(), "nabla h != 0: {}", crate::expr::render::render_expr(&z));
    }

    #[test]
    fn connection_respects_tractor_contraction() {
        // differentiate V_B W^B expanded in slots both before and after
        // resolving the contraction
        let w0 = Coefficient::zero();
        let vy = sym_scalar("vy", &w0 + &Coefficient::int(1));
        let vz = sym_tensor("vz", 1, Variance::Down, &w0 + &Coefficient::int(1), Symmetry::None);
        let vx = sym_scalar("vx", &w0 - &Coefficient::int(1));
        let wy = sym_scalar("wy", &w0 + &Coefficient::int(1));
        let wz = sym_tensor("wz", 1, Variance::Down, &w0 + &Coefficient::int(1), Symmetry::None);
        let wx = sym_scalar("wx", &w0 - &Coefficient::int(1));

        let b_dn = Index::tractor("B", Variance::Down);
        let b_up = Index::tractor("B", Variance::Up);
        let p = fresh_tangent(Variance::Up);
        let q = fresh_tangent(Variance::Up);

        let v = TensorExpr {
            terms: vec![
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_y(b_dn), Factor::new(vy, vec![])],
                },
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_z(b_dn, p), Factor::new(vz, vec![p.flipped()])],
                },
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_x(b_dn), Factor::new(vx, vec![])],
                },
            ],
        };
        let wv = TensorExpr {
            terms: vec![
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_y(b_up), Factor::new(wy, vec![])],
                },
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_z(b_up, q), Factor::new(wz, vec![q.flipped()])],
                },
                TensorTerm {
                    coeff: Coefficient::one(),
                    factors: vec![proj_x(b_up), Factor::new(wx, vec![])],
                },
            ],
        };
        let prod = v.mul_expr(&wv);
        let route1 = canonicalize(&apply_nabla(&prod, Index::down("a"), Mode::Curved), Mode::Curved).unwrap();
        let contracted = canonicalize(&prod, Mode::Curved).unwrap();
        let route2 =
            canonicalize(&apply_nabla(&contracted, Index::down("a"), Mode::Curved), Mode::Curved)
                .unwrap();
        assert!(expr_eq(&route1, &route2, Mode::Curved).unwrap());
    }

    #[test]
    fn adjoint_pairings() {
        // <W, W> = -1/2 ; <Y^a, X^b> = 1/2 g^ab ; <X, X> = <W, X> = 0
        let a = AdjIndex::named("A1", "A2", Variance::Down);
        let up = a.flipped();
        let ww = canonicalize(&adj_w(a).mul_expr(&adj_w(up)), Mode::Flat).unwrap();
        assert_eq!(ww.terms.len(), 1);
        assert_eq!(ww.terms[0].coeff, Coefficient::frac(-1, 2));
        assert!(ww.terms[0].factors.is_empty());

        let s = Index::up("s");
        let t = Index::up("t");
        let yx = canonicalize(&adj_y(a, s).mul_expr(&adj_x(up, t)), Mode::Flat).unwrap();
        let expect = TensorExpr::from_term(TensorTerm {
            coeff: Coefficient::frac(1, 2),
            factors: vec![metric_factor(s, t)],
        });
        assert!(expr_eq(&yx, &expect, Mode::Flat).unwrap());

        let xx = canonicalize(&adj_x(a, s).mul_expr(&adj_x(up, t)), Mode::Flat).unwrap();
        assert!(xx.is_zero());
        let wx = canonicalize(&adj_w(a).mul_expr(&adj_x(up, t)), Mode::Flat).unwrap();
        assert!(wx.is_zero());
    }

    #[test]
    fn tractor_curvature_contractions() {
        // X^C Omega_abCE = 0, and the g-trace over the tangent pair vanishes
        let a = Index::down("a");
        let b = Index::down("b");
        let cc = Index::tractor("C", Variance::Down);
        let ee = Index::tractor("E", Variance::Down);
        let om = tractor_curvature_expand(a, b, cc, ee);
        let xc = TensorExpr::from_factor(proj_x(cc.flipped()));
        let contracted = canonicalize(&om.mul_expr(&xc), Mode::Curved).unwrap();
        assert!(contracted.is_zero());

        let gtrace = om.mul_expr(&TensorExpr::from_factor(metric_factor(
            a.flipped(),
            b.flipped(),
        )));
        assert!(canonicalize(&gtrace, Mode::Curved).unwrap().is_zero());
    }

    #[test]
    fn flat_commutation_small_cases() {
        for case in [ProjectorCase::Y, ProjectorCase::Z, ProjectorCase::X] {
            for k in 0..=2 {
                let lhs = sym_gradient_lhs(k, case, Mode::Flat).unwrap();
                let rhs = commute_sym_gradient_flat(k, case, Mode::Flat).unwrap();
                assert!(
                    expr_eq(&lhs, &rhs, Mode::Flat).unwrap(),
                    "sym gradient case {case:?} k={k}"
                );
            }
            for ell in 0..=1 {
                let lhs = laplacian_lhs(ell, case, Mode::Flat).unwrap();
                let rhs = commute_laplacian_flat(ell, case, Mode::Flat).unwrap();
                assert!(
                    expr_eq(&lhs, &rhs, Mode::Flat).unwrap(),
                    "laplacian case {case:?} l={ell}"
                );
            }
        }
    }

    #[test]
    fn curved_mode_rejected() {
        assert!(matches!(
            commute_sym_gradient_flat(1, ProjectorCase::X, Mode::Curved),
            Err(Error::ModeError { .. })
        ));
        assert!(matches!(
            commute_laplacian_flat(1, ProjectorCase::X, Mode::Curved),
            Err(Error::ModeError { .. })
        ));
    }
}
