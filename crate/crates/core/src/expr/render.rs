//! Text and JSON forms of tensor expressions.
//!
//! Grammar (round-trips deterministically):
//!   expr   := term (('+'|'-') term)*
//!   term   := [coeff '*'] factor ('*' factor)*
//!   factor := name '[' idx,... ']' | 'nabla' '[' idx,... ']' '(' factor ')'
//!   idx    := '^'? name          (leading '^' marks an upper index)
//!
//! Symbols must already be registered; the parser resolves them by name.

use super::*;
use crate::coeff::Coefficient;
use serde::{Deserialize, Serialize};

pub fn render_index(i: &Index) -> String {
    match i.var {
        Variance::Up => format!("^{}", i.str_name()),
        Variance::Down => i.str_name().to_string(),
    }
}

pub fn render_factor(f: &Factor) -> String {
    let spec = spec_of(f.sym);
    let core = if f.idx.is_empty() {
        spec.name.clone()
    } else {
        format!(
            "{}[{}]",
            spec.name,
            f.idx.iter().map(render_index).collect::<Vec<_>>().join(",")
        )
    };
    if f.derivs.is_empty() {
        core
    } else {
        format!(
            "nabla[{}]({})",
            f.derivs
                .iter()
                .map(render_index)
                .collect::<Vec<_>>()
                .join(","),
            core
        )
    }
}

pub fn render_term(t: &TensorTerm) -> String {
    let mut parts: Vec<String> = Vec::new();
    if !t.coeff.is_one() || t.factors.is_empty() {
        let c = t.coeff.render();
        if c.contains(' ') || c.contains('/') {
            parts.push(format!("({c})"));
        } else {
            parts.push(c);
        }
    }
    parts.extend(t.factors.iter().map(render_factor));
    parts.join("*")
}

pub fn render_expr(e: &TensorExpr) -> String {
    if e.terms.is_empty() {
        return "0".into();
    }
    e.terms
        .iter()
        .map(render_term)
        .collect::<Vec<_>>()
        .join(" + ")
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct P<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> P<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected `{}` at byte {}",
                c as char, self.pos
            )))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric()
                || matches!(self.s[self.pos], b'_' | b'\'' | b'#' | b'~'))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected name at byte {}", start)));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn index_list(&mut self) -> Result<Vec<(String, Variance)>> {
        self.eat(b'[')?;
        let mut out = Vec::new();
        loop {
            let var = if self.peek() == Some(b'^') {
                self.pos += 1;
                Variance::Up
            } else {
                Variance::Down
            };
            let name = self.ident()?;
            out.push((name, var));
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                other => {
                    return Err(Error::Parse(format!(
                        "expected `,` or `]`, found {:?} at byte {}",
                        other.map(|b| b as char),
                        self.pos
                    )))
                }
            }
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Factor> {
        let name = self.ident()?;
        if name == "nabla" {
            let derivs = self.index_list()?;
            self.eat(b'(')?;
            let mut inner = self.factor()?;
            self.eat(b')')?;
            let mut prefix: Vec<Index> = derivs
                .into_iter()
                .map(|(n, v)| Index::tangent(&n, v))
                .collect();
            prefix.extend(inner.derivs);
            inner.derivs = prefix;
            return Ok(inner);
        }
        let sym = symbol_by_name(&name)
            .ok_or_else(|| Error::Parse(format!("unknown symbol `{name}`")))?;
        let spec = spec_of(sym);
        let idx = if spec.slots.is_empty() {
            vec![]
        } else {
            let raw = self.index_list()?;
            if raw.len() != spec.slots.len() {
                return Err(Error::Parse(format!(
                    "symbol `{name}` expects {} indices, found {}",
                    spec.slots.len(),
                    raw.len()
                )));
            }
            raw.into_iter()
                .zip(spec.slots.iter())
                .map(|((n, v), kind)| Index {
                    name: iname(&n),
                    kind: *kind,
                    var: v,
                })
                .collect()
        };
        Ok(Factor::new(sym, idx))
    }

    fn looks_like_coeff(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'(')
            || self.starts_with_param()
    }

    fn starts_with_param(&mut self) -> bool {
        self.ws();
        let rest = &self.s[self.pos.min(self.s.len())..];
        for p in ["n", "w", "d"] {
            if rest.starts_with(p.as_bytes()) {
                let after = rest.get(p.len()).copied();
                let ident_continues = after
                    .map(|c| c.is_ascii_alphanumeric() || matches!(c, b'_' | b'\'' | b'[' ))
                    .unwrap_or(false);
                if !ident_continues {
                    return true;
                }
            }
        }
        false
    }

    fn coeff_atom(&mut self) -> Result<Coefficient> {
        // grab a balanced chunk up to the next '*' at depth 0
        self.ws();
        let start = self.pos;
        let mut depth = 0i32;
        while self.pos < self.s.len() {
            match self.s[self.pos] {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'*' if depth == 0 => break,
                b'+' | b'-' if depth == 0 && self.pos > start => break,
                _ => {}
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Coefficient::parse(text)
    }

    fn term(&mut self) -> Result<TensorTerm> {
        let mut coeff = Coefficient::one();
        let mut factors = Vec::new();
        loop {
            if self.looks_like_coeff() {
                let c = self.coeff_atom()?;
                coeff = &coeff * &c;
            } else {
                factors.push(self.factor()?);
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(TensorTerm { coeff, factors })
    }

    fn expr(&mut self) -> Result<TensorExpr> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let mut t = self.term()?;
            if sign < 0 {
                t.coeff = -&t.coeff;
            }
            terms.push(t);
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => break,
            }
        }
        Ok(TensorExpr { terms })
    }
}

pub fn parse_expr(s: &str) -> Result<TensorExpr> {
    let mut p = P {
        s: s.as_bytes(),
        pos: 0,
    };
    let mut e = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(Error::Parse(format!("trailing input at byte {}", p.pos)));
    }
    // indices are raised and lowered freely, so input may repeat a name with
    // equal variance to mean a contraction; flip the second occurrence
    for t in &mut e.terms {
        let mut seen: HashMap<IName, Variance> = HashMap::new();
        for f in &mut t.factors {
            for i in f.iter_indices_mut() {
                match seen.get(&i.name) {
                    None => {
                        seen.insert(i.name, i.var);
                    }
                    Some(v) if *v == i.var => {
                        i.var = i.var.flip();
                    }
                    _ => {}
                }
            }
        }
    }
    for t in &e.terms {
        t.validate()?;
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct IndexDto {
    pub name: String,
    pub kind: String,
    pub var: String,
}

#[derive(Serialize, Deserialize)]
pub struct SymbolDto {
    pub name: String,
    pub kind: String,
    pub slots: Vec<String>,
    pub ref_variance: Vec<String>,
    pub weight: String,
    pub symmetry: String,
}

#[derive(Serialize, Deserialize)]
pub struct FactorDto {
    pub symbol: SymbolDto,
    pub derivs: Vec<IndexDto>,
    pub idx: Vec<IndexDto>,
}

#[derive(Serialize, Deserialize)]
pub struct TermDto {
    pub coeff: String,
    pub factors: Vec<FactorDto>,
}

#[derive(Serialize, Deserialize)]
pub struct ExprDto {
    pub terms: Vec<TermDto>,
}

fn index_dto(i: &Index) -> IndexDto {
    IndexDto {
        name: i.str_name().into(),
        kind: format!("{:?}", i.kind),
        var: format!("{:?}", i.var),
    }
}

fn index_from(d: &IndexDto) -> Result<Index> {
    let kind = match d.kind.as_str() {
        "Tangent" => IndexKind::Tangent,
        "Tractor" => IndexKind::Tractor,
        other => return Err(Error::Parse(format!("bad index kind `{other}`"))),
    };
    let var = match d.var.as_str() {
        "Up" => Variance::Up,
        "Down" => Variance::Down,
        other => return Err(Error::Parse(format!("bad variance `{other}`"))),
    };
    Ok(Index {
        name: iname(&d.name),
        kind,
        var,
    })
}

fn kind_from(s: &str) -> Result<SymbolKind> {
    Ok(match s {
        "Field" => SymbolKind::Field,
        "Metric" => SymbolKind::Metric,
        "TractorMetric" => SymbolKind::TractorMetric,
        "ProjX" => SymbolKind::ProjX,
        "ProjY" => SymbolKind::ProjY,
        "ProjZ" => SymbolKind::ProjZ,
        "Schouten" => SymbolKind::Schouten,
        "SchoutenTrace" => SymbolKind::SchoutenTrace,
        "Weyl" => SymbolKind::Weyl,
        "Cotton" => SymbolKind::Cotton,
        "Upsilon" => SymbolKind::Upsilon,
        other => return Err(Error::Parse(format!("bad symbol kind `{other}`"))),
    })
}

fn symmetry_from(s: &str) -> Result<Symmetry> {
    Ok(match s {
        "None" => Symmetry::None,
        "Symmetric" => Symmetry::Symmetric,
        "SymTraceFree" => Symmetry::SymTraceFree,
        "Metric" => Symmetry::Metric,
        "Weyl" => Symmetry::Weyl,
        "Cotton" => Symmetry::Cotton,
        other => return Err(Error::Parse(format!("bad symmetry `{other}`"))),
    })
}

pub fn expr_to_dto(e: &TensorExpr) -> ExprDto {
    ExprDto {
        terms: e
            .terms
            .iter()
            .map(|t| TermDto {
                coeff: t.coeff.render(),
                factors: t
                    .factors
                    .iter()
                    .map(|f| {
                        let spec = spec_of(f.sym);
                        FactorDto {
                            symbol: SymbolDto {
                                name: spec.name.clone(),
                                kind: format!("{:?}", spec.kind),
                                slots: spec.slots.iter().map(|k| format!("{k:?}")).collect(),
                                ref_variance: spec
                                    .ref_variance
                                    .iter()
                                    .map(|v| format!("{v:?}"))
                                    .collect(),
                                weight: spec.weight.render(),
                                symmetry: format!("{:?}", spec.symmetry),
                            },
                            derivs: f.derivs.iter().map(index_dto).collect(),
                            idx: f.idx.iter().map(index_dto).collect(),
                        }
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn expr_from_dto(d: &ExprDto) -> Result<TensorExpr> {
    let mut terms = Vec::new();
    for t in &d.terms {
        let coeff = Coefficient::parse(&t.coeff)?;
        let mut factors = Vec::new();
        for f in &t.factors {
            let slots = f
                .symbol
                .slots
                .iter()
                .map(|s| match s.as_str() {
                    "Tangent" => Ok(IndexKind::Tangent),
                    "Tractor" => Ok(IndexKind::Tractor),
                    other => Err(Error::Parse(format!("bad slot kind `{other}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let ref_variance = f
                .symbol
                .ref_variance
                .iter()
                .map(|s| match s.as_str() {
                    "Up" => Ok(Variance::Up),
                    "Down" => Ok(Variance::Down),
                    other => Err(Error::Parse(format!("bad variance `{other}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let sym = intern_symbol(SymbolSpec {
                name: f.symbol.name.clone(),
                kind: kind_from(&f.symbol.kind)?,
                slots,
                ref_variance,
                weight: Coefficient::parse(&f.symbol.weight)?,
                symmetry: symmetry_from(&f.symbol.symmetry)?,
            });
            factors.push(Factor {
                sym,
                derivs: f
                    .derivs
                    .iter()
                    .map(index_from)
                    .collect::<Result<Vec<_>>>()?,
                idx: f.idx.iter().map(index_from).collect::<Result<Vec<_>>>()?,
            });
        }
        terms.push(TensorTerm { coeff, factors });
    }
    let e = TensorExpr { terms };
    for t in &e.terms {
        t.validate()?;
    }
    Ok(e)
}

pub fn expr_to_json(e: &TensorExpr) -> String {
    serde_json::to_string_pretty(&expr_to_dto(e)).expect("serializable")
}

pub fn expr_from_json(s: &str) -> Result<TensorExpr> {
    let dto: ExprDto =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("json: {e}")))?;
    expr_from_dto(&dto)
}
