//! The symbolic monomial algebra spanned by `i_E(u) 1_s i_E(v)*`: the
//! product formula, the grading expectations `Phi_delta` and
//! `Phi_theta`, the block-diagonal compression `Phi_l`, and consistency
//! of the symbolic product with Fock-operator multiplication.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{max_deviation, FockOperator, Truncation};
use crate::monoid::{Join, Monoid, MonoidElement};
use crate::report::CheckRecord;
use crate::system::{inner_product, FibreVector, ProductSystem};

/// The spanning element `i_E(u) 1_s i_E(v)*`: linear in `u`,
/// conjugate-linear in `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub u: FibreVector,
    pub s: MonoidElement,
    pub v: FibreVector,
}

impl Monomial {
    pub fn new(u: FibreVector, s: MonoidElement, v: FibreVector) -> Self {
        Monomial { u, s, v }
    }

    /// The unit of the algebra: `(Ω, e, Ω)`.
    pub fn unit(system: &ProductSystem) -> Self {
        Monomial::new(system.vacuum(), system.monoid().identity(), system.vacuum())
    }

    /// The degree as the pair `(p(u), p(v))`; group elements are never
    /// materialized.
    pub fn degree(&self) -> (&MonoidElement, &MonoidElement) {
        (&self.u.base, &self.v.base)
    }

    /// Signed abelianized degree: exponent differences on `N^k`, theta
    /// differences on free products.
    pub fn degree_vector(&self, monoid: &Monoid) -> Result<Vec<i64>> {
        let image = |t: &MonoidElement| -> Result<Vec<u64>> {
            let el = match monoid {
                Monoid::FreeAbelian { .. } => t.clone(),
                Monoid::FreeProduct { .. } => monoid.theta(t)?,
            };
            match el {
                MonoidElement::Exponents(v) => Ok(v),
                MonoidElement::Word(_) => unreachable!("theta lands in N^m"),
            }
        };
        let a = image(&self.u.base)?;
        let b = image(&self.v.base)?;
        Ok(a.iter().zip(&b).map(|(&x, &y)| x as i64 - y as i64).collect())
    }
}

/// A finite complex combination of monomials, kept in a canonical form:
/// every term expanded over the standard bases of its end fibres, terms
/// with equal keys merged, tiny coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MonomialSum {
    pub terms: Vec<(Complex64, Monomial)>,
}

impl MonomialSum {
    pub fn zero() -> Self {
        MonomialSum::default()
    }

    pub fn from_terms(system: &ProductSystem, terms: Vec<(Complex64, Monomial)>) -> Result<Self> {
        let mut out = MonomialSum { terms };
        out.normalize(system)?;
        Ok(out)
    }

    pub fn single(system: &ProductSystem, m: Monomial) -> Result<Self> {
        Self::from_terms(system, vec![(Complex64::new(1.0, 0.0), m)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Canonical form: expand `u` and `v` over standard basis vectors
    /// (conjugating the `v` coefficients), sort by
    /// `(p(u), index, s, p(v), index)` and merge.
    pub fn normalize(&mut self, system: &ProductSystem) -> Result<()> {
        type Key = (MonoidElement, usize, MonoidElement, MonoidElement, usize);
        let mut expanded: Vec<(Key, Complex64)> = Vec::new();
        for (c, m) in &self.terms {
            for (i, ui) in m.u.coeffs.iter().enumerate() {
                if ui.norm() <= 1e-16 {
                    continue;
                }
                for (j, vj) in m.v.coeffs.iter().enumerate() {
                    let coeff = c * ui * vj.conj();
                    if coeff.norm() <= 1e-16 {
                        continue;
                    }
                    expanded.push((
                        (m.u.base.clone(), i, m.s.clone(), m.v.base.clone(), j),
                        coeff,
                    ));
                }
            }
        }
        expanded.sort_by(|a, b| a.0.cmp(&b.0));
        let mut terms: Vec<(Complex64, Monomial)> = Vec::new();
        let mut iter = expanded.into_iter().peekable();
        while let Some((key, mut coeff)) = iter.next() {
            while iter.peek().map(|(k, _)| k == &key).unwrap_or(false) {
                coeff += iter.next().unwrap().1;
            }
            if coeff.norm() <= 1e-14 {
                continue;
            }
            let (pu, i, s, pv, j) = key;
            terms.push((
                coeff,
                Monomial::new(
                    system.basis_vector(&pu, i)?,
                    s,
                    system.basis_vector(&pv, j)?,
                ),
            ));
        }
        self.terms = terms;
        Ok(())
    }
}

/// The product of two monomials, expanded by the join-simplification
/// chain: zero when `p(v)s ∨ p(w)t` is infinite, otherwise
/// `Σ_{f,g} ⟨wg, vf⟩ (uf, (p(v)∨p(w))⁻¹(p(v)s ∨ p(w)t), zg)`.
pub fn monomial_product(
    system: &ProductSystem,
    m1: &Monomial,
    m2: &Monomial,
) -> Result<MonomialSum> {
    let monoid = system.monoid();
    let (u, s, v) = (&m1.u, &m1.s, &m1.v);
    let (w, t, z) = (&m2.u, &m2.s, &m2.v);
    let pvs = monoid.multiply(&v.base, s)?;
    let pwt = monoid.multiply(&w.base, t)?;
    let Join::Element(big) = monoid.join(&pvs, &pwt)? else {
        return Ok(MonomialSum::zero());
    };
    let Join::Element(pvw) = monoid.join(&v.base, &w.base)? else {
        unreachable!("p(v) ∨ p(w) divides the finite join of p(v)s and p(w)t");
    };
    let middle = monoid
        .left_quotient(&pvw, &big)?
        .expect("p(v) ∨ p(w) divides p(v)s ∨ p(w)t");
    let x = monoid.left_quotient(&v.base, &pvw)?.expect("p(v) divides the join");
    let y = monoid.left_quotient(&w.base, &pvw)?.expect("p(w) divides the join");
    let mut terms = Vec::new();
    for f in system.basis(&x)? {
        let vf = system.multiply_fibres(v, &f)?;
        let uf = system.multiply_fibres(u, &f)?;
        for g in system.basis(&y)? {
            let wg = system.multiply_fibres(w, &g)?;
            let c = inner_product(&wg, &vf)?;
            if c.norm() <= 1e-16 {
                continue;
            }
            let zg = system.multiply_fibres(z, &g)?;
            terms.push((c, Monomial::new(uf.clone(), middle.clone(), zg)));
        }
    }
    MonomialSum::from_terms(system, terms)
}

/// Product of two sums, term by term.
pub fn sum_product(
    system: &ProductSystem,
    a: &MonomialSum,
    b: &MonomialSum,
) -> Result<MonomialSum> {
    let mut terms = Vec::new();
    for (c1, m1) in &a.terms {
        for (c2, m2) in &b.terms {
            for (c, m) in monomial_product(system, m1, m2)?.terms {
                terms.push((c1 * c2 * c, m));
            }
        }
    }
    MonomialSum::from_terms(system, terms)
}

/// The Fock image `l(u) · alpha_I(s) · l(v)*`.
pub fn monomial_to_fock(trunc: &Truncation, m: &Monomial) -> Result<FockOperator> {
    let lu = trunc.l_op(&m.u)?;
    let a = trunc.alpha_i(&m.s)?;
    let lv = trunc.l_op(&m.v)?;
    Ok(lu * a * lv.adjoint())
}

pub fn sum_to_fock(trunc: &Truncation, ms: &MonomialSum) -> Result<FockOperator> {
    let mut out = trunc.zero();
    for (c, m) in &ms.terms {
        out += monomial_to_fock(trunc, m)? * *c;
    }
    Ok(out)
}

/// The diagonal grading expectation: keeps terms with `p(u) = p(v)`.
pub fn phi_delta(ms: &MonomialSum) -> MonomialSum {
    MonomialSum {
        terms: ms
            .terms
            .iter()
            .filter(|(_, m)| m.u.base == m.v.base)
            .cloned()
            .collect(),
    }
}

/// The coarser expectation through the exponent-sum map: keeps terms
/// with `theta(p(u)) = theta(p(v))`. Free products only.
pub fn phi_theta(system: &ProductSystem, ms: &MonomialSum) -> Result<MonomialSum> {
    let monoid = system.monoid();
    let mut terms = Vec::new();
    for (c, m) in &ms.terms {
        if monoid.theta(&m.u.base)? == monoid.theta(&m.v.base)? {
            terms.push((*c, m.clone()));
        }
    }
    Ok(MonomialSum { terms })
}

/// The fibre-block-diagonal compression `Σ_s Q_s X Q_s`.
pub fn phi_l(trunc: &Truncation, x: &FockOperator) -> Result<FockOperator> {
    trunc.check_shape(x)?;
    let mut out = trunc.zero();
    for t in trunc.members() {
        let off = trunc.offset(t)?;
        let d = trunc.system().fibre_dim(t)?;
        for i in 0..d {
            for j in 0..d {
                out[(off + i, off + j)] = x[(off + i, off + j)];
            }
        }
    }
    Ok(out)
}

/// Verifies the commuting square `Phi_l ∘ (Fock image) = (Fock image) ∘
/// Phi_delta` on a sum. Both sides are exact on the truncation: diagonal
/// terms pass through untouched, and off-diagonal Fock images have no
/// fibre-block-diagonal part by cancellativity.
pub fn check_expectation_diagram(
    trunc: &Truncation,
    ms: &MonomialSum,
    tol: f64,
) -> Result<CheckRecord> {
    let lhs = phi_l(trunc, &sum_to_fock(trunc, ms)?)?;
    let rhs = sum_to_fock(trunc, &phi_delta(ms))?;
    let (dev, at) = max_deviation(&lhs, &rhs);
    Ok(CheckRecord::new(
        "expectation_diagram",
        "Phi_l(fock(X)) = fock(Phi_delta(X))",
        trunc.total_dim(),
        dev,
        tol,
        at.map(|(i, j)| {
            format!(
                "worst at fibres ({}, {})",
                trunc.coordinate_fibre(i),
                trunc.coordinate_fibre(j)
            )
        }),
    ))
}

/// Interior projection on which the Fock image of `m1 · m2` agrees with
/// the product of the Fock images: fibres far enough from the length
/// boundary that no intermediate vector leaves the truncation.
pub fn pair_interior(trunc: &Truncation, m1: &Monomial, m2: &Monomial) -> Result<FockOperator> {
    let (pu, pv) = (m1.u.base.word_length() as i64, m1.v.base.word_length() as i64);
    let (pw, pz) = (m2.u.base.word_length() as i64, m2.v.base.word_length() as i64);
    let slack = (pw - pz).max(pw - pz - pv + pu).max(0) as u64;
    let level = trunc.level();
    let mut out = trunc.zero();
    for t in trunc.members() {
        if t.word_length() + slack <= level {
            let off = trunc.offset(t)?;
            for i in 0..trunc.system().fibre_dim(t)? {
                out[(off + i, off + i)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ok(out)
}
