//! Critical weight sets and the natural-operator witnesses attached to them.
//!
//! Weights are affine-linear expressions a*n + b with rational coefficients;
//! two weights are equal exactly when the affine forms coincide, with n an
//! indeterminate. Numeric membership at a concrete dimension is provided
//! separately and may pick up accidental coincidences, which are reported
//! with a provenance note.

use crate::coeff::{Coefficient, Param};
use crate::error::{Error, Result};
use crate::poly::{rat_int, Rat};
use num_traits::Zero;
use std::fmt;

/// An affine-linear weight a*n + b.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineWeight {
    pub n_coeff: Rat,
    pub constant: Rat,
}

impl AffineWeight {
    pub fn new(n_coeff: Rat, constant: Rat) -> Self {
        AffineWeight { n_coeff, constant }
    }

    pub fn constant_int(c: i64) -> Self {
        AffineWeight::new(Rat::zero(), rat_int(c))
    }

    pub fn to_coefficient(&self) -> Coefficient {
        &(&Coefficient::rat(self.n_coeff.clone()) * &Coefficient::var(Param::N))
            + &Coefficient::rat(self.constant.clone())
    }

    /// Try to read an affine form off a coefficient (must be polynomial,
    /// degree <= 1 in n, free of w and d).
    pub fn from_coefficient(c: &Coefficient) -> Option<AffineWeight> {
        if !c.is_polynomial() || !c.is_free_of(Param::W) || !c.is_free_of(Param::D) {
            return None;
        }
        let p = c.numerator();
        if p.degree_in(0) > 1 {
            return None;
        }
        let mut n_coeff = Rat::zero();
        let mut constant = Rat::zero();
        for (m, r) in &p.terms {
            if m[0] == 0 {
                constant = r.clone();
            } else {
                n_coeff = r.clone();
            }
        }
        Some(AffineWeight { n_coeff, constant })
    }

    pub fn eval_at(&self, n: &Rat) -> Rat {
        &self.n_coeff * n + &self.constant
    }

    pub fn render(&self) -> String {
        let c = self.to_coefficient();
        c.render()
    }

    /// Rendering in the shape -(n+2), 1/2*(…) used by the table output.
    pub fn render_compact(&self) -> String {
        if self.n_coeff == rat_int(-1) && self.constant < Rat::zero() {
            return format!("-(n+{})", -self.constant.clone());
        }
        if self.n_coeff == rat_int(-1) && self.constant.is_zero() {
            return "-n".to_string();
        }
        self.render()
    }
}

impl fmt::Display for AffineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Which family of the critical set a weight belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SigmaFamily {
    /// Divergence-order family present already at l = 0.
    SigmaZero,
    /// The integer family j - 1, j = 1..l.
    SigmaPrime,
    /// The family -(n + 2k' - 2j)/2, j = 1..l.
    SigmaDoublePrime,
}

impl fmt::Display for SigmaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaFamily::SigmaZero => write!(f, "Sigma_k',0"),
            SigmaFamily::SigmaPrime => write!(f, "Sigma'"),
            SigmaFamily::SigmaDoublePrime => write!(f, "Sigma''"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct CriticalSet {
    pub kprime: usize,
    pub ell: usize,
    pub sigma0: Vec<AffineWeight>,
    pub sigma_prime: Vec<AffineWeight>,
    pub sigma_double_prime: Vec<AffineWeight>,
}

/// The full critical set for (k', l).
pub fn sigma(kprime: usize, ell: usize) -> CriticalSet {
    let sigma0 = (1..=kprime)
        .map(|i| AffineWeight::new(rat_int(-1), rat_int(-((kprime + i) as i64 - 2))))
        .collect();
    let sigma_prime = (1..=ell)
        .map(|j| AffineWeight::constant_int(j as i64 - 1))
        .collect();
    let sigma_double_prime = (1..=ell)
        .map(|j| {
            AffineWeight::new(
                Rat::new((-1).into(), 2.into()),
                rat_int(-(kprime as i64 - j as i64)),
            )
        })
        .collect();
    CriticalSet {
        kprime,
        ell,
        sigma0,
        sigma_prime,
        sigma_double_prime,
    }
}

/// One induction step: adds { l, -(n + 2k' - 2l - 2)/2 } and bumps l.
pub fn sigma_step(s: &CriticalSet) -> CriticalSet {
    let mut out = s.clone();
    out.ell += 1;
    out.sigma_prime
        .push(AffineWeight::constant_int(s.ell as i64));
    out.sigma_double_prime.push(AffineWeight::new(
        Rat::new((-1).into(), 2.into()),
        rat_int(-(s.kprime as i64 - s.ell as i64 - 1)),
    ));
    out
}

impl CriticalSet {
    pub fn families(&self) -> impl Iterator<Item = (SigmaFamily, usize, &AffineWeight)> {
        self.sigma0
            .iter()
            .enumerate()
            .map(|(i, w)| (SigmaFamily::SigmaZero, i + 1, w))
            .chain(
                self.sigma_prime
                    .iter()
                    .enumerate()
                    .map(|(j, w)| (SigmaFamily::SigmaPrime, j + 1, w)),
            )
            .chain(
                self.sigma_double_prime
                    .iter()
                    .enumerate()
                    .map(|(j, w)| (SigmaFamily::SigmaDoublePrime, j + 1, w)),
            )
    }

    /// Symbolic membership: the affine form must coincide with a member.
    pub fn member(&self, w: &AffineWeight) -> Option<(SigmaFamily, usize)> {
        self.families()
            .find(|(_, _, m)| *m == w)
            .map(|(f, i, _)| (f, i))
    }

    /// Numeric membership at a concrete dimension; reports every family that
    /// hits, so accidental coincidences at special n are visible.
    pub fn member_at(&self, value: &Rat, n: &Rat) -> Vec<(SigmaFamily, usize)> {
        self.families()
            .filter(|(_, _, m)| m.eval_at(n) == *value)
            .map(|(f, i, _)| (f, i))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma0.is_empty() && self.sigma_prime.is_empty() && self.sigma_double_prime.is_empty()
    }

    /// Overlap of the primed families (reported, never deduplicated).
    pub fn prime_overlap(&self) -> Vec<AffineWeight> {
        self.sigma_prime
            .iter()
            .filter(|w| self.sigma_double_prime.contains(w))
            .cloned()
            .collect()
    }
}

/// True when the zero-shift weight 2l avoids the critical set.
pub fn zero_shift_check(kprime: usize, ell: usize) -> bool {
    let s = sigma(kprime, ell);
    let w = AffineWeight::constant_int(2 * ell as i64);
    s.member(&w).is_none()
}

/// Witness descriptor for a critical weight: the natural linear conformal
/// operator whose existence obstructs the generic construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorWitness {
    pub family: SigmaFamily,
    pub order: usize,
    pub source: String,
    pub target: String,
    pub description: String,
}

fn bundle(rank: usize, weight: &str) -> String {
    if rank == 0 {
        format!("E[{weight}]")
    } else {
        let idx: Vec<String> = (1..=rank).map(|i| format!("a{i}")).collect();
        format!("E^(({}))0[{}]", idx.join(" "), weight)
    }
}

/// The witness attached to a critical weight, per family.
pub fn natural_operator_witness(
    kprime: usize,
    ell: usize,
    delta: &AffineWeight,
) -> Result<OperatorWitness> {
    let s = sigma(kprime, ell);
    let (family, index) = s.member(delta).ok_or_else(|| {
        Error::NoWitness(format!(
            "{} is not in Sigma for (k'={kprime}, l={ell})",
            delta.render()
        ))
    })?;
    let dstr = delta.render();
    Ok(match family {
        SigmaFamily::SigmaZero => {
            let i = index;
            OperatorWitness {
                family,
                order: kprime - i + 1,
                source: bundle(kprime, &dstr),
                target: bundle(i - 1, &dstr),
                description: format!("divergence type operator of order {}", kprime - i + 1),
            }
        }
        SigmaFamily::SigmaPrime => {
            let j = index;
            OperatorWitness {
                family,
                order: j,
                source: bundle(kprime, &dstr),
                target: bundle(kprime + j, &format!("{dstr} - {}", 2 * j)),
                description: format!("conformal Killing operator of order {j}"),
            }
        }
        SigmaFamily::SigmaDoublePrime => {
            let j = index;
            OperatorWitness {
                family,
                order: 2 * j,
                source: bundle(kprime, &dstr),
                target: bundle(kprime, &format!("{dstr} - {}", 2 * j)),
                description: format!("Laplacian type operator of order {}", 2 * j),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_small_cases() {
        // (3,0): sigma0 = {-(n+2), -(n+3), -(n+4)}
        let s = sigma(3, 0);
        assert_eq!(s.sigma0.len(), 3);
        assert_eq!(s.sigma0[0], AffineWeight::new(rat_int(-1), rat_int(-2)));
        assert_eq!(s.sigma0[2], AffineWeight::new(rat_int(-1), rat_int(-4)));
        assert!(s.sigma_prime.is_empty());
        assert!(s.sigma_double_prime.is_empty());

        // (1,1): {-n} u {0} u {-n/2}
        let s = sigma(1, 1);
        assert_eq!(s.sigma0, vec![AffineWeight::new(rat_int(-1), rat_int(0))]);
        assert_eq!(s.sigma_prime, vec![AffineWeight::constant_int(0)]);
        assert_eq!(
            s.sigma_double_prime,
            vec![AffineWeight::new(Rat::new((-1).into(), 2.into()), rat_int(0))]
        );

        // (0,0): empty
        assert!(sigma(0, 0).is_empty());
    }

    #[test]
    fn sigma_step_matches_closed_form() {
        for kprime in 0..=8 {
            let mut s = sigma(kprime, 0);
            for _ in 0..8 {
                s = sigma_step(&s);
            }
            let direct = sigma(kprime, 8);
            assert_eq!(s, direct);
        }
    }

    #[test]
    fn zero_shift_avoids_sigma() {
        for kprime in 0..=8 {
            for ell in 0..=8 {
                assert!(zero_shift_check(kprime, ell), "failed at ({kprime},{ell})");
            }
        }
        assert!(zero_shift_check(2, 3));
        assert!(zero_shift_check(0, 0));
    }

    #[test]
    fn disjointness_of_sigma0_from_primed() {
        for kprime in 0..=8 {
            for ell in 0..=8 {
                let s = sigma(kprime, ell);
                for w in &s.sigma0 {
                    assert!(!s.sigma_prime.contains(w));
                    assert!(!s.sigma_double_prime.contains(w));
                }
            }
        }
    }

    #[test]
    fn cardinalities_and_overlap() {
        let s = sigma(3, 4);
        assert_eq!(s.sigma0.len(), 3);
        assert_eq!(s.sigma_prime.len(), 4);
        assert_eq!(s.sigma_double_prime.len(), 4);
        // Sigma' and Sigma'' can overlap: k'=3, l=4: Sigma'' contains
        // -(n+6-2j)/2; at j = ... equality with integers j'-1 requires the
        // n-coefficient to vanish, which never happens, so the overlap here
        // is empty; a genuine overlap needs concrete n.
        let s2 = sigma(2, 2);
        assert!(s2.prime_overlap().is_empty());
    }

    #[test]
    fn witnesses() {
        // delta' = -(n+k'+i-2), i=2, k'=3: divergence type of order 2
        let d = AffineWeight::new(rat_int(-1), rat_int(-3));
        let w = natural_operator_witness(3, 0, &d).unwrap();
        assert_eq!(w.family, SigmaFamily::SigmaZero);
        assert_eq!(w.order, 2);
        assert_eq!(w.target, "E^((a1))0[-n - 3]");

        // delta' = 0 = j-1 with j = 1: conformal Killing of order 1
        let d = AffineWeight::constant_int(0);
        let w = natural_operator_witness(2, 1, &d).unwrap();
        assert_eq!(w.family, SigmaFamily::SigmaPrime);
        assert_eq!(w.order, 1);

        // delta' = -(n+2k'-2)/2, j=1: Laplacian type of order 2
        let d = AffineWeight::new(Rat::new((-1).into(), 2.into()), rat_int(-1));
        let w = natural_operator_witness(2, 1, &d).unwrap();
        assert_eq!(w.family, SigmaFamily::SigmaDoublePrime);
        assert_eq!(w.order, 2);

        assert!(natural_operator_witness(1, 0, &AffineWeight::constant_int(5)).is_err());
    }
}
