//! The coupled Levi-Civita/tractor covariant derivative on expressions.

use super::*;


/// Apply one covariant derivative in the given direction (Leibniz over all
/// factors). Projector factors differentiate through the standard tractor
/// connection; metrics are parallel; every other symbol stacks a prefix.
pub fn apply_nabla(e: &TensorExpr, dir: Index, mode: Mode) -> TensorExpr {
    debug_assert_eq!(dir.kind, IndexKind::Tangent);
    let mut out = Vec::new();
    for term in &e.terms {
        for fi in 0..term.factors.len() {
            let f = &term.factors[fi];
            let spec = spec_of(f.sym);
            match spec.kind {
                SymbolKind::Metric | SymbolKind::TractorMetric => {}
                SymbolKind::ProjX => {
                    // nabla_a X_B = Z_B{}^b g_ab  (written with the direction
                    // index placed directly on Z)
                    let mut t = term.clone();
                    t.factors[fi] = proj_z(f.idx[0], dir);
                    out.push(t);
                }
                SymbolKind::ProjY => {
                    if mode == Mode::Curved {
                        // nabla_a Y_B = Z_B{}^p P_ap
                        let p = Index {
                            name: fresh_name(IndexKind::Tangent),
                            kind: IndexKind::Tangent,
                            var: Variance::Up,
                        };
                        let mut t = term.clone();
                        t.factors[fi] = proj_z(f.idx[0], p);
                        t.factors
                            .push(Factor::new(sym_schouten(), vec![dir, p.flipped()]));
                        out.push(t);
                    }
                }
                SymbolKind::ProjZ => {
                    // nabla_a Z_B{}^b = -Y_B delta_a{}^b - X_B P_a{}^b
                    let big = f.idx[0];
                    let small = f.idx[1];
                    let mut t1 = term.clone();
                    t1.coeff = -&t1.coeff;
                    t1.factors[fi] = proj_y(big);
                    t1.factors.push(metric_factor(dir, small));
                    out.push(t1);
                    if mode == Mode::Curved {
                        let mut t2 = term.clone();
                        t2.coeff = -&t2.coeff;
                        t2.factors[fi] = proj_x(big);
                        t2.factors
                            .push(Factor::new(sym_schouten(), vec![dir, small]));
                        out.push(t2);
                    }
                }
                _ => {
                    let mut t = term.clone();
                    t.factors[fi].derivs.insert(0, dir);
                    out.push(t);
                }
            }
        }
    }
    TensorExpr { terms: out }
}

/// The Laplacian of the conformal metric.
pub fn apply_box_laplacian(e: &TensorExpr, mode: Mode) -> TensorExpr {
    let name = fresh_name(IndexKind::Tangent);
    let down = Index {
        name,
        kind: IndexKind::Tangent,
        var: Variance::Down,
    };
    let up = down.flipped();
    apply_nabla(&apply_nabla(e, down, mode), up, mode)
}

/// A string of derivatives nabla_{dirs[0]} ... nabla_{dirs[last]} e.
pub fn apply_nabla_string(e: &TensorExpr, dirs: &[Index], mode: Mode) -> TensorExpr {
    let mut out = e.clone();
    for d in dirs.iter().rev() {
        out = apply_nabla(&out, *d, mode);
    }
    out
}

/// nabla^{(k)} as k-fold power of the Laplacian.
pub fn apply_laplacian_power(e: &TensorExpr, ell: usize, mode: Mode) -> TensorExpr {
    let mut out = e.clone();
    for _ in 0..ell {
        out = apply_box_laplacian(&out, mode);
    }
    out
}
