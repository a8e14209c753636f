use cquant::expr::*;
use cquant::expr::canon::canonicalize;
use cquant::expr::render::render_expr;
use cquant::tractor::curved_casimir_apply;

#[test]
fn dbg_casimir_scalar() {
    let f = TensorExpr::from_factor(Factor::new(sym_f(), vec![]));
    let c = curved_casimir_apply(&f, Mode::Flat).unwrap();
    let c = canonicalize(&c, Mode::Flat).unwrap();
    println!("CASIMIR(f) = {}", render_expr(&c));
}
