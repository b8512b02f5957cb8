//! Finite-dimensional product systems: dimension homomorphisms, fibre
//! vectors, lexicographic multiplication/factorisation and multiplier
//! twists.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::monoid::{Monoid, MonoidElement};

/// Default bound on a single fibre dimension.
pub const DEFAULT_DIM_CAP: u64 = 4096;

/// A unit-modulus 2-cocycle on the monoid.
#[derive(Clone)]
pub enum Multiplier {
    /// `mu(s,t) = prod_{i,j} z_{ij}^{s_i t_j}` on `N^k`, for a `k x k`
    /// matrix of unimodular `z_{ij}`. Bicharacters always satisfy the
    /// cocycle identity.
    Bicharacter { phases: Vec<Vec<Complex64>> },
    /// An arbitrary closure; validated probabilistically on construction
    /// of the product system.
    Custom(Arc<dyn Fn(&Monoid, &MonoidElement, &MonoidElement) -> Complex64 + Send + Sync>),
}

impl Multiplier {
    pub fn bicharacter(phases: Vec<Vec<Complex64>>) -> Result<Self> {
        let k = phases.len();
        for row in &phases {
            if row.len() != k {
                return Err(Error::InvalidMultiplier("phase matrix must be square".into()));
            }
            for z in row {
                if (z.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidMultiplier(format!(
                        "phase {z} is not unimodular"
                    )));
                }
            }
        }
        Ok(Multiplier::Bicharacter { phases })
    }

    /// Bicharacter with entries `exp(2 pi i t)` for a matrix of turns `t`.
    pub fn bicharacter_from_turns(turns: &[Vec<f64>]) -> Result<Self> {
        let phases = turns
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t))
                    .collect()
            })
            .collect();
        Self::bicharacter(phases)
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&Monoid, &MonoidElement, &MonoidElement) -> Complex64 + Send + Sync + 'static,
    {
        Multiplier::Custom(Arc::new(f))
    }

    pub fn value(&self, monoid: &Monoid, s: &MonoidElement, t: &MonoidElement) -> Complex64 {
        match self {
            Multiplier::Bicharacter { phases } => {
                let (MonoidElement::Exponents(a), MonoidElement::Exponents(b)) = (s, t) else {
                    // Construction rejects bicharacters on free products.
                    return Complex64::new(1.0, 0.0);
                };
                let mut angle = 0.0;
                for (i, &ai) in a.iter().enumerate() {
                    for (j, &bj) in b.iter().enumerate() {
                        angle += phases[i][j].arg() * (ai as f64) * (bj as f64);
                    }
                }
                Complex64::from_polar(1.0, angle)
            }
            Multiplier::Custom(f) => f(monoid, s, t),
        }
    }
}

/// Checks normalisation and the cocycle identity on `samples` random
/// triples of elements of length at most `max_len`.
pub fn validate_multiplier(
    monoid: &Monoid,
    mu: &Multiplier,
    samples: usize,
    max_len: u64,
    seed: u64,
    tol: f64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = monoid.identity();
    for _ in 0..samples {
        let r = random_element(monoid, max_len, &mut rng);
        let s = random_element(monoid, max_len, &mut rng);
        let t = random_element(monoid, max_len, &mut rng);
        for x in [&r, &s, &t] {
            if (mu.value(monoid, x, &e) - 1.0).norm() > tol
                || (mu.value(monoid, &e, x) - 1.0).norm() > tol
            {
                return Err(Error::InvalidMultiplier(format!(
                    "normalisation fails at {x}"
                )));
            }
            if (mu.value(monoid, x, x).norm() - 1.0).abs() > tol {
                return Err(Error::InvalidMultiplier(format!(
                    "value at ({x},{x}) is not unimodular"
                )));
            }
        }
        let rs = monoid.multiply(&r, &s)?;
        let st = monoid.multiply(&s, &t)?;
        let lhs = mu.value(monoid, &r, &s) * mu.value(monoid, &rs, &t);
        let rhs = mu.value(monoid, &s, &t) * mu.value(monoid, &r, &st);
        if (lhs - rhs).norm() > tol {
            return Err(Error::InvalidMultiplier(format!(
                "cocycle identity fails at ({r}, {s}, {t}): {lhs} vs {rhs}"
            )));
        }
    }
    Ok(())
}

/// A uniformly random element of length at most `max_len`.
pub fn random_element<R: Rng>(monoid: &Monoid, max_len: u64, rng: &mut R) -> MonoidElement {
    let len = rng.gen_range(0..=max_len);
    let mut out = monoid.identity();
    for _ in 0..len {
        let g = rng.gen_range(0..monoid.generator_count());
        out = monoid
            .multiply(&out, &monoid.generator(g))
            .expect("length-bounded product cannot overflow");
    }
    out
}

/// An element of a fibre: base point plus coefficients in the
/// lexicographic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FibreVector {
    pub base: MonoidElement,
    pub coeffs: Vec<Complex64>,
}

impl FibreVector {
    pub fn new(base: MonoidElement, coeffs: Vec<Complex64>) -> Self {
        FibreVector { base, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        FibreVector {
            base: self.base.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }
}

/// Hermitian inner product, linear in the first slot.
pub fn inner_product(u: &FibreVector, v: &FibreVector) -> Result<Complex64> {
    if u.base != v.base {
        return Err(Error::BaseMismatch(format!(
            "inner product of fibres at {} and {}",
            u.base, v.base
        )));
    }
    if u.coeffs.len() != v.coeffs.len() {
        return Err(Error::ShapeMismatch("fibre coefficient lengths differ".into()));
    }
    Ok(u.coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// A product system determined by per-generator fibre dimensions and an
/// optional multiplier twist.
#[derive(Clone)]
pub struct ProductSystem {
    monoid: Monoid,
    dims: Vec<u64>,
    twist: Option<Multiplier>,
    dim_cap: u64,
}

impl ProductSystem {
    pub fn new(monoid: Monoid, dims: Vec<u64>) -> Result<Self> {
        if dims.len() != monoid.generator_count() {
            return Err(Error::Invalid(format!(
                "expected {} generator dimensions, got {}",
                monoid.generator_count(),
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Invalid("generator dimensions must be >= 1".into()));
        }
        Ok(ProductSystem { monoid, dims, twist: None, dim_cap: DEFAULT_DIM_CAP })
    }

    /// Installs a multiplier twist, validating it on 200 random triples.
    pub fn with_twist(mut self, mu: Multiplier) -> Result<Self> {
        if let Multiplier::Bicharacter { phases } = &mu {
            match self.monoid {
                Monoid::FreeAbelian { rank } if phases.len() == rank => {}
                Monoid::FreeAbelian { rank } => {
                    return Err(Error::InvalidMultiplier(format!(
                        "bicharacter matrix is {}x{}, monoid rank is {rank}",
                        phases.len(),
                        phases.len()
                    )));
                }
                Monoid::FreeProduct { .. } => {
                    return Err(Error::InvalidMultiplier(
                        "bicharacter twists are defined on N^k only".into(),
                    ));
                }
            }
        }
        validate_multiplier(&self.monoid, &mu, 200, 4, 0, 1e-9)?;
        self.twist = Some(mu);
        Ok(self)
    }

    pub fn with_dim_cap(mut self, cap: u64) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn twist(&self) -> Option<&Multiplier> {
        self.twist.as_ref()
    }

    pub fn twist_value(&self, s: &MonoidElement, t: &MonoidElement) -> Complex64 {
        match &self.twist {
            Some(mu) => mu.value(&self.monoid, s, t),
            None => Complex64::new(1.0, 0.0),
        }
    }

    /// `dim E_t`: the product of generator dimensions over the letters of `t`.
    pub fn fibre_dim(&self, t: &MonoidElement) -> Result<usize> {
        self.monoid.validate(t)?;
        let mut acc: u64 = 1;
        let mut push = |gen: usize, exp: u64| -> Result<()> {
            for _ in 0..exp {
                acc = acc.checked_mul(self.dims[gen]).ok_or(Error::DimensionCap {
                    dim: u64::MAX,
                    cap: self.dim_cap,
                })?;
                if acc > self.dim_cap {
                    return Err(Error::DimensionCap { dim: acc, cap: self.dim_cap });
                }
            }
            Ok(())
        };
        match t {
            MonoidElement::Exponents(v) => {
                for (g, &e) in v.iter().enumerate() {
                    push(g, e)?;
                }
            }
            MonoidElement::Word(blocks) => {
                for b in blocks {
                    push(b.component, b.exponent)?;
                }
            }
        }
        Ok(acc as usize)
    }

    /// The identity of the system: the unit vector of the fibre at `e`.
    pub fn vacuum(&self) -> FibreVector {
        FibreVector::new(self.monoid.identity(), vec![Complex64::new(1.0, 0.0)])
    }

    /// The `i`-th standard basis vector of `E_t` (0-based).
    pub fn basis_vector(&self, t: &MonoidElement, i: usize) -> Result<FibreVector> {
        let d = self.fibre_dim(t)?;
        if i >= d {
            return Err(Error::Invalid(format!("basis index {i} out of range (dim {d})")));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
        coeffs[i] = Complex64::new(1.0, 0.0);
        Ok(FibreVector::new(t.clone(), coeffs))
    }

    /// The standard orthonormal basis of `E_t` in lexicographic order.
    pub fn basis(&self, t: &MonoidElement) -> Result<Vec<FibreVector>> {
        let d = self.fibre_dim(t)?;
        (0..d).map(|i| self.basis_vector(t, i)).collect()
    }

    /// A random fibre vector at `t` with independent entries.
    pub fn random_fibre<R: Rng>(&self, t: &MonoidElement, rng: &mut R) -> Result<FibreVector> {
        let d = self.fibre_dim(t)?;
        let coeffs = (0..d)
            .map(|_| Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        Ok(FibreVector::new(t.clone(), coeffs))
    }

    /// Lexicographic multiplication `u v`, twisted by the multiplier when
    /// present: `w[i*d(t) + j] = mu(p(u), p(v)) u_i v_j`.
    pub fn multiply_fibres(&self, u: &FibreVector, v: &FibreVector) -> Result<FibreVector> {
        let du = self.fibre_dim(&u.base)?;
        let dv = self.fibre_dim(&v.base)?;
        if du != u.coeffs.len() || dv != v.coeffs.len() {
            return Err(Error::ShapeMismatch("coefficient length != fibre dimension".into()));
        }
        let base = self.monoid.multiply(&u.base, &v.base)?;
        let d = self.fibre_dim(&base)?;
        debug_assert_eq!(d, du * dv);
        let mu = self.twist_value(&u.base, &v.base);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
        for (i, a) in u.coeffs.iter().enumerate() {
            for (j, b) in v.coeffs.iter().enumerate() {
                coeffs[i * dv + j] = mu * a * b;
            }
        }
        Ok(FibreVector::new(base, coeffs))
    }

    /// Inverts the multiplication isomorphism: returns the `d(s) x d(t)`
    /// matrix `c` with `w = sum_{i,j} c_{ij} (e_i at s)(f_j at t)`.
    pub fn factorize(
        &self,
        w: &FibreVector,
        s: &MonoidElement,
        t: &MonoidElement,
    ) -> Result<DMatrix<Complex64>> {
        let st = self.monoid.multiply(s, t)?;
        if st != w.base {
            return Err(Error::BaseMismatch(format!(
                "cannot factorize a vector at {} across ({}, {})",
                w.base, s, t
            )));
        }
        let ds = self.fibre_dim(s)?;
        let dt = self.fibre_dim(t)?;
        let mu_conj = self.twist_value(s, t).conj();
        Ok(DMatrix::from_fn(ds, dt, |i, j| mu_conj * w.coeffs[i * dt + j]))
    }
}
