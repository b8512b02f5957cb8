//! The truncated left regular representation: a finite compression of
//! the full direct sum `⊕_t E_t`, carrying `l(v)`, the diagonal
//! projections `alpha_I(s)`, the maps `alpha_s`, `rho_t`, `beta`, the
//! `Q_A` projection calculus and the diagonal symbol calculus `pi_l`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monoid::{Join, MonoidElement};
use crate::system::{FibreVector, ProductSystem};

/// A complex matrix acting on the truncated sum of fibres.
pub type FockOperator = DMatrix<Complex64>;

/// The index set of the truncated space: all elements of word length at
/// most `L`, ordered by length then lexicographically, with contiguous
/// per-fibre coefficient blocks. Length truncation is automatically
/// closed under left divisors.
#[derive(Clone)]
pub struct Truncation {
    system: ProductSystem,
    level: u64,
    members: Vec<MonoidElement>,
    fibre_dims: Vec<usize>,
    offsets: Vec<usize>,
    index: HashMap<MonoidElement, usize>,
    total_dim: usize,
}

/// Builds the truncation at level `L` over the given product system.
pub fn build_truncation(system: &ProductSystem, level: u64) -> Result<Truncation> {
    let members = system.monoid().elements_up_to(level);
    let mut fibre_dims = Vec::with_capacity(members.len());
    let mut offsets = Vec::with_capacity(members.len());
    let mut index = HashMap::new();
    let mut total = 0usize;
    for (k, t) in members.iter().enumerate() {
        let d = system.fibre_dim(t)?;
        offsets.push(total);
        fibre_dims.push(d);
        total += d;
        index.insert(t.clone(), k);
    }
    Ok(Truncation {
        system: system.clone(),
        level,
        members,
        fibre_dims,
        offsets,
        index,
        total_dim: total,
    })
}

impl Truncation {
    pub fn system(&self) -> &ProductSystem {
        &self.system
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn members(&self) -> &[MonoidElement] {
        &self.members
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn contains(&self, t: &MonoidElement) -> bool {
        self.index.contains_key(t)
    }

    pub fn member_index(&self, t: &MonoidElement) -> Result<usize> {
        self.index
            .get(t)
            .copied()
            .ok_or_else(|| Error::NotInTruncation(t.clone()))
    }

    /// Starting coordinate of the fibre at `t`.
    pub fn offset(&self, t: &MonoidElement) -> Result<usize> {
        Ok(self.offsets[self.member_index(t)?])
    }

    pub fn zero(&self) -> FockOperator {
        DMatrix::zeros(self.total_dim, self.total_dim)
    }

    pub fn identity_op(&self) -> FockOperator {
        DMatrix::identity(self.total_dim, self.total_dim)
    }

    /// The creation operator `l(v)`: sends a basis vector `w` at `t` to
    /// `v w` at `p(v) t`, or to zero when `p(v) t` falls outside the
    /// truncation.
    pub fn l_op(&self, v: &FibreVector) -> Result<FockOperator> {
        let s = &v.base;
        if self.system.fibre_dim(s)? != v.coeffs.len() {
            return Err(Error::ShapeMismatch(
                "fibre vector length does not match its base dimension".into(),
            ));
        }
        let mut m = self.zero();
        for (k, t) in self.members.iter().enumerate() {
            let st = self.system.monoid().multiply(s, t)?;
            let Some(&kst) = self.index.get(&st) else { continue };
            let dt = self.fibre_dims[k];
            let mu = self.system.twist_value(s, t);
            let (row0, col0) = (self.offsets[kst], self.offsets[k]);
            for (i, vi) in v.coeffs.iter().enumerate() {
                for j in 0..dt {
                    m[(row0 + i * dt + j, col0 + j)] = mu * vi;
                }
            }
        }
        Ok(m)
    }

    /// The diagonal projection onto `⊕ {E_t : s ≤ t}`. Exact: membership
    /// of a fibre is unaffected by truncation.
    pub fn alpha_i(&self, s: &MonoidElement) -> Result<FockOperator> {
        let mut m = self.zero();
        for (k, t) in self.members.iter().enumerate() {
            if self.system.monoid().leq(s, t)? {
                let off = self.offsets[k];
                for i in 0..self.fibre_dims[k] {
                    m[(off + i, off + i)] = Complex64::new(1.0, 0.0);
                }
            }
        }
        Ok(m)
    }

    /// The transfer map `alpha_s(A) = Σ_u l(u) A l(u)*` summed over the
    /// standard basis of `E_s`.
    pub fn alpha(&self, s: &MonoidElement, a: &FockOperator) -> Result<FockOperator> {
        self.check_shape(a)?;
        let mut out = self.zero();
        for u in self.system.basis(s)? {
            let lu = self.l_op(&u)?;
            out += &lu * a * lu.adjoint();
        }
        Ok(out)
    }

    /// `rho_t(M) = Σ_{ij} M_{ij} l(e_i) l(e_j)*` over the basis of `E_t`.
    pub fn rho(&self, t: &MonoidElement, m: &DMatrix<Complex64>) -> Result<FockOperator> {
        let d = self.system.fibre_dim(t)?;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "rho expects a {d}x{d} matrix at {t}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let basis = self.system.basis(t)?;
        let l_ops: Vec<FockOperator> = basis
            .iter()
            .map(|u| self.l_op(u))
            .collect::<Result<_>>()?;
        let mut out = self.zero();
        for i in 0..d {
            for j in 0..d {
                if m[(i, j)].norm() > 0.0 {
                    out += &l_ops[i] * l_ops[j].adjoint() * m[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Projection onto `⊕ {E_t : t and s t both in the truncation}`:
    /// the part of the space where operators involving `s` see no
    /// boundary effects.
    pub fn interior_domain(&self, s: &MonoidElement) -> Result<FockOperator> {
        let mut m = self.zero();
        for (k, t) in self.members.iter().enumerate() {
            let st = self.system.monoid().multiply(s, t)?;
            if self.index.contains_key(&st) {
                let off = self.offsets[k];
                for i in 0..self.fibre_dims[k] {
                    m[(off + i, off + i)] = Complex64::new(1.0, 0.0);
                }
            }
        }
        Ok(m)
    }

    /// Intersection of interior domains over several elements.
    pub fn interior_domain_all<'a, I>(&self, elems: I) -> Result<FockOperator>
    where
        I: IntoIterator<Item = &'a MonoidElement>,
    {
        let mut acc = self.identity_op();
        for s in elems {
            acc = acc * self.interior_domain(s)?;
        }
        Ok(acc)
    }

    /// The projection `Q_A = 1_{σA} Π_{t ∈ F\A} (1 − 1_t)`, or zero when
    /// `σA` is infinite. Diagonal, hence exact on the truncation.
    pub fn q_a(&self, f: &[MonoidElement], a: &[MonoidElement]) -> Result<FockOperator> {
        for t in f {
            self.member_index(t)?;
        }
        for t in a {
            if !f.contains(t) {
                return Err(Error::Invalid(format!("{t} is in A but not in F")));
            }
        }
        let sigma = match self.system.monoid().sigma(a.iter())? {
            Join::Element(s) => s,
            Join::Infinity => return Ok(self.zero()),
        };
        let mut out = self.alpha_i(&sigma)?;
        let id = self.identity_op();
        for t in f {
            if a.contains(t) {
                continue;
            }
            out = out * (&id - self.alpha_i(t)?);
        }
        Ok(out)
    }

    /// `pi_l(Σ c_t 1_t) = Σ c_t alpha_I(t)`.
    pub fn pi_l(&self, combo: &[(Complex64, MonoidElement)]) -> Result<FockOperator> {
        let mut out = self.zero();
        for (c, t) in combo {
            out += self.alpha_i(t)? * *c;
        }
        Ok(out)
    }

    /// The shift action on diagonal symbols: `tau_s(1_t) = 1_{st}`.
    pub fn tau(
        &self,
        s: &MonoidElement,
        combo: &[(Complex64, MonoidElement)],
    ) -> Result<Vec<(Complex64, MonoidElement)>> {
        combo
            .iter()
            .map(|(c, t)| Ok((*c, self.system.monoid().multiply(s, t)?)))
            .collect()
    }

    fn initial_segment_join(
        &self,
        f: &[MonoidElement],
        a: &[MonoidElement],
    ) -> Result<MonoidElement> {
        let sigma = match self.system.monoid().sigma(a.iter())? {
            Join::Element(s) => s,
            Join::Infinity => return Err(Error::NotInitialSegment),
        };
        for t in f {
            let below = self.system.monoid().leq(t, &sigma)?;
            if below != a.contains(t) {
                return Err(Error::NotInitialSegment);
            }
        }
        Ok(sigma)
    }

    /// The refined projection `Q = alpha_a(Q')` where `Q'` multiplies
    /// `(I − alpha_I(a⁻¹(a∨t)))` over `t ∈ F` with `a < a∨t < ∞` and
    /// `(I − alpha_I(d_{b,c}))` over distinct pairs in `A` with
    /// `b⁻¹a ∨ c⁻¹a` finite. Requires `A` to be an initial segment of `F`.
    pub fn q_prime(&self, f: &[MonoidElement], a: &[MonoidElement]) -> Result<FockOperator> {
        let sigma = self.initial_segment_join(f, a)?;
        let q = self.t_product(f, &sigma)? * self.pair_product(a, &sigma)?;
        self.alpha(&sigma, &q)
    }

    /// The companion projection `R = alpha_a(R')` built from the pair
    /// product alone; satisfies `Q = q_a(F,A) · R`.
    pub fn r_part(&self, f: &[MonoidElement], a: &[MonoidElement]) -> Result<FockOperator> {
        let sigma = self.initial_segment_join(f, a)?;
        let r = self.pair_product(a, &sigma)?;
        self.alpha(&sigma, &r)
    }

    fn t_product(&self, f: &[MonoidElement], sigma: &MonoidElement) -> Result<FockOperator> {
        let monoid = self.system.monoid();
        let id = self.identity_op();
        let mut out = self.identity_op();
        for t in f {
            if let Join::Element(j) = monoid.join(sigma, t)? {
                if &j != sigma {
                    let x = monoid
                        .left_quotient(sigma, &j)?
                        .expect("sigma divides sigma ∨ t");
                    out = out * (&id - self.alpha_i(&x)?);
                }
            }
        }
        Ok(out)
    }

    fn pair_product(&self, a: &[MonoidElement], sigma: &MonoidElement) -> Result<FockOperator> {
        let monoid = self.system.monoid();
        let id = self.identity_op();
        let mut out = self.identity_op();
        for b in a {
            for c in a {
                if b == c {
                    continue;
                }
                match d_small(monoid, b, c, sigma) {
                    Ok(d) => out = out * (&id - self.alpha_i(&d)?),
                    Err(Error::JoinInfinite) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }

    pub fn check_shape(&self, a: &FockOperator) -> Result<()> {
        if a.nrows() != self.total_dim || a.ncols() != self.total_dim {
            return Err(Error::ShapeMismatch(format!(
                "operator is {}x{}, truncation dimension is {}",
                a.nrows(),
                a.ncols(),
                self.total_dim
            )));
        }
        Ok(())
    }

    /// Names the fibre containing coordinate `i`, for witnesses.
    pub fn coordinate_fibre(&self, i: usize) -> &MonoidElement {
        let k = match self.offsets.binary_search(&i) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        &self.members[k]
    }
}

/// The element `d_{b,c}` for `b ≠ c` below `a`: with `x = b⁻¹a`,
/// `y = c⁻¹a` and `j = x ∨ y`, it is `x⁻¹j` when `x < j` and `y⁻¹j`
/// otherwise. Never the identity.
pub fn d_small(
    monoid: &crate::monoid::Monoid,
    b: &MonoidElement,
    c: &MonoidElement,
    a: &MonoidElement,
) -> Result<MonoidElement> {
    if b == c {
        return Err(Error::Invalid("d requires b ≠ c".into()));
    }
    let x = monoid
        .left_quotient(b, a)?
        .ok_or_else(|| Error::NotDivisible(b.clone()))?;
    let y = monoid
        .left_quotient(c, a)?
        .ok_or_else(|| Error::NotDivisible(c.clone()))?;
    let j = match monoid.join(&x, &y)? {
        Join::Element(j) => j,
        Join::Infinity => return Err(Error::JoinInfinite),
    };
    let d = if x != j {
        monoid.left_quotient(&x, &j)?.expect("x divides x ∨ y")
    } else {
        monoid.left_quotient(&y, &j)?.expect("y divides x ∨ y")
    };
    debug_assert!(!d.is_identity(), "d_{{b,c}} is never the identity");
    Ok(d)
}

/// `beta_{t,s}`: pushes an operator on `E_s` forward to `E_t` for
/// `s ≤ t`, acting as `M ⊗ I` under `E_s ⊗ E_{s⁻¹t} ≅ E_t`.
pub fn beta(
    system: &ProductSystem,
    t: &MonoidElement,
    s: &MonoidElement,
    m: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let r = system
        .monoid()
        .left_quotient(s, t)?
        .ok_or_else(|| Error::NotDivisible(s.clone()))?;
    let ds = system.fibre_dim(s)?;
    if m.nrows() != ds || m.ncols() != ds {
        return Err(Error::ShapeMismatch(format!(
            "beta expects a {ds}x{ds} matrix on the fibre at {s}"
        )));
    }
    let dr = system.fibre_dim(&r)?;
    let mut out = DMatrix::zeros(ds * dr, ds * dr);
    for i in 0..ds {
        for j in 0..ds {
            for k in 0..dr {
                out[(i * dr + k, j * dr + k)] = m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Largest entrywise deviation between two operators, with the
/// coordinates where it occurs.
pub fn max_deviation(a: &FockOperator, b: &FockOperator) -> (f64, Option<(usize, usize)>) {
    let mut worst = 0.0;
    let mut at = None;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = (a[(i, j)] - b[(i, j)]).norm();
            if d > worst {
                worst = d;
                at = Some((i, j));
            }
        }
    }
    (worst, at)
}

/// Coordinate-triplet export: one `(row, col, re, im)` per entry of
/// magnitude above 1e-14.
pub fn to_triplets(m: &FockOperator) -> Vec<(usize, usize, f64, f64)> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if z.norm() > 1e-14 {
                out.push((i, j, z.re, z.im));
            }
        }
    }
    out
}
