//! Representations given by generator images: extension to the whole
//! system, emission of the multiplication/covariance relation sets, the
//! representation and covariance checkers, and the faithfulness
//! criterion.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{max_deviation, FockOperator, Truncation};
use crate::monoid::{Join, Monoid, MonoidElement};
use crate::report::{CheckRecord, Report};
use crate::system::{inner_product, FibreVector, ProductSystem};

/// One factor in a relation word: the image of the `idx`-th basis vector
/// of the `gen`-th generator fibre, possibly adjointed. Indices are
/// 0-based internally and rendered 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub gen: usize,
    pub idx: usize,
    pub adjoint: bool,
}

impl Symbol {
    pub fn plain(gen: usize, idx: usize) -> Self {
        Symbol { gen, idx, adjoint: false }
    }

    pub fn star(gen: usize, idx: usize) -> Self {
        Symbol { gen, idx, adjoint: true }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{},{}]", self.gen + 1, self.idx + 1)?;
        if self.adjoint {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// `lhs = Σ c · word`; an empty right side means zero and an empty word
/// means the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub lhs: Vec<Symbol>,
    pub rhs: Vec<(Complex64, Vec<Symbol>)>,
}

fn fmt_real(v: f64) -> String {
    // Shortest round-trip form, with a tidy "-0".
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

fn fmt_coeff(c: Complex64) -> Option<String> {
    if (c - Complex64::new(1.0, 0.0)).norm() < 1e-9 {
        return None;
    }
    let s = if c.im.abs() < 1e-12 {
        fmt_real(c.re)
    } else if c.re.abs() < 1e-12 {
        format!("{}i", fmt_real(c.im))
    } else {
        format!("({}{}{}i)", fmt_real(c.re), if c.im < 0.0 { "-" } else { "+" }, fmt_real(c.im.abs()))
    };
    Some(s)
}

fn fmt_word(word: &[Symbol]) -> String {
    if word.is_empty() {
        "I".to_string()
    } else {
        word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", fmt_word(&self.lhs))?;
        if self.rhs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .rhs
            .iter()
            .map(|(c, word)| match fmt_coeff(*c) {
                Some(cs) => format!("{cs} * {}", fmt_word(word)),
                None => fmt_word(word),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationSet {
    pub relations: Vec<Relation>,
}

impl RelationSet {
    pub fn lines(&self) -> Vec<String> {
        self.relations.iter().map(|r| r.to_string()).collect()
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn sort_rhs(rhs: &mut Vec<(Complex64, Vec<Symbol>)>) {
    rhs.retain(|(c, _)| c.norm() > 1e-14);
    rhs.sort_by_key(|(_, w)| {
        w.iter()
            .map(|s| (s.gen, s.idx, s.adjoint))
            .collect::<Vec<_>>()
    });
}

/// Commutation relations between the generator fibres of a free abelian
/// monoid: one relation per generator pair `g < h` and basis pair,
/// re-expressing `S[g,i] S[h,j]` across the reversed factorization. Free
/// products yield the empty set (free generators carry no relations).
pub fn gen_mult_relations(system: &ProductSystem) -> Result<RelationSet> {
    let monoid = system.monoid();
    let mut relations = Vec::new();
    if let Monoid::FreeProduct { .. } = monoid {
        return Ok(RelationSet { relations });
    }
    let n = monoid.generator_count();
    for g in 0..n {
        for h in g + 1..n {
            let (sg, sh) = (monoid.generator(g), monoid.generator(h));
            let (dg, dh) = (system.fibre_dim(&sg)?, system.fibre_dim(&sh)?);
            for i in 0..dg {
                for j in 0..dh {
                    let u = system.basis_vector(&sg, i)?;
                    let v = system.basis_vector(&sh, j)?;
                    let w = system.multiply_fibres(&u, &v)?;
                    let m = system.factorize(&w, &sh, &sg)?;
                    let mut rhs = Vec::new();
                    for j2 in 0..dh {
                        for i2 in 0..dg {
                            let c = m[(j2, i2)];
                            if c.norm() > 1e-14 {
                                rhs.push((c, vec![Symbol::plain(h, j2), Symbol::plain(g, i2)]));
                            }
                        }
                    }
                    sort_rhs(&mut rhs);
                    relations.push(Relation {
                        lhs: vec![Symbol::plain(g, i), Symbol::plain(h, j)],
                        rhs,
                    });
                }
            }
        }
    }
    Ok(RelationSet { relations })
}

/// Adjoint (covariance) relations `S[g,i]' S[h,j] = Σ ⟨wg,vf⟩ · φ(f)φ(g)*`
/// for generator pairs `g < h`, with a zero right side when the join of
/// the generators is infinite. Single-generator monoids instead get the
/// orthogonality relations `S[1,i]' S[1,j] = δ_ij I`.
pub fn gen_cov_relations(system: &ProductSystem) -> Result<RelationSet> {
    let monoid = system.monoid();
    let n = monoid.generator_count();
    let mut relations = Vec::new();
    if n == 1 {
        let s = monoid.generator(0);
        let d = system.fibre_dim(&s)?;
        for i in 0..d {
            for j in 0..d {
                let rhs = if i == j {
                    vec![(Complex64::new(1.0, 0.0), Vec::new())]
                } else {
                    Vec::new()
                };
                relations.push(Relation {
                    lhs: vec![Symbol::star(0, i), Symbol::plain(0, j)],
                    rhs,
                });
            }
        }
        return Ok(RelationSet { relations });
    }
    for g in 0..n {
        for h in g + 1..n {
            let (s, t) = (monoid.generator(g), monoid.generator(h));
            let (ds, dt) = (system.fibre_dim(&s)?, system.fibre_dim(&t)?);
            let join = monoid.join(&s, &t)?;
            for i in 0..ds {
                for j in 0..dt {
                    let lhs = vec![Symbol::star(g, i), Symbol::plain(h, j)];
                    let Join::Element(st) = &join else {
                        relations.push(Relation { lhs, rhs: Vec::new() });
                        continue;
                    };
                    let x = monoid.left_quotient(&s, st)?.expect("s divides s ∨ t");
                    let y = monoid.left_quotient(&t, st)?.expect("t divides s ∨ t");
                    // For distinct generators of N^k: x = t and y = s,
                    // so right-side words are S[h,·] S[g,·]'.
                    debug_assert_eq!((&x, &y), (&t, &s));
                    let v = system.basis_vector(&s, i)?;
                    let w = system.basis_vector(&t, j)?;
                    let mut rhs = Vec::new();
                    for (a, f) in system.basis(&x)?.into_iter().enumerate() {
                        let vf = system.multiply_fibres(&v, &f)?;
                        for (b, gg) in system.basis(&y)?.into_iter().enumerate() {
                            let wg = system.multiply_fibres(&w, &gg)?;
                            let c = inner_product(&wg, &vf)?;
                            if c.norm() > 1e-14 {
                                rhs.push((c, vec![Symbol::plain(h, a), Symbol::star(g, b)]));
                            }
                        }
                    }
                    sort_rhs(&mut rhs);
                    relations.push(Relation { lhs, rhs });
                }
            }
        }
    }
    Ok(RelationSet { relations })
}

/// Operator images of the generator basis vectors, with an optional
/// interior projection that restricts where identities are asserted.
#[derive(Clone)]
pub struct GeneratorAssignment {
    space_dim: usize,
    images: Vec<Vec<DMatrix<Complex64>>>,
    interior: Option<Arc<dyn Fn(&MonoidElement) -> FockOperator + Send + Sync>>,
}

impl GeneratorAssignment {
    /// A user assignment from explicit matrices, `images[g][i]` being the
    /// image of the `i`-th basis vector of the `g`-th generator fibre.
    pub fn from_matrices(
        system: &ProductSystem,
        images: Vec<Vec<DMatrix<Complex64>>>,
    ) -> Result<Self> {
        let monoid = system.monoid();
        if images.len() != monoid.generator_count() {
            return Err(Error::Invalid(format!(
                "expected images for {} generators, got {}",
                monoid.generator_count(),
                images.len()
            )));
        }
        let space_dim = images
            .first()
            .and_then(|v| v.first())
            .map(|m| m.nrows())
            .ok_or_else(|| Error::Invalid("assignment has no matrices".into()))?;
        for (g, per_gen) in images.iter().enumerate() {
            let d = system.fibre_dim(&monoid.generator(g))?;
            if per_gen.len() != d {
                return Err(Error::Invalid(format!(
                    "generator {g} needs {d} images, got {}",
                    per_gen.len()
                )));
            }
            for m in per_gen {
                if m.nrows() != space_dim || m.ncols() != space_dim {
                    return Err(Error::ShapeMismatch(format!(
                        "all images must be {space_dim}x{space_dim}"
                    )));
                }
            }
        }
        Ok(GeneratorAssignment { space_dim, images, interior: None })
    }

    /// The Fock assignment: images are `l_op` of the generator basis
    /// vectors, and the interior projection comes from the truncation.
    pub fn fock(trunc: &Truncation) -> Result<Self> {
        let system = trunc.system();
        let monoid = system.monoid();
        let mut images = Vec::new();
        for g in 0..monoid.generator_count() {
            let s = monoid.generator(g);
            let per_gen = system
                .basis(&s)?
                .iter()
                .map(|u| trunc.l_op(u))
                .collect::<Result<Vec<_>>>()?;
            images.push(per_gen);
        }
        let captured = trunc.clone();
        Ok(GeneratorAssignment {
            space_dim: trunc.total_dim(),
            images,
            interior: Some(Arc::new(move |s| {
                captured.interior_domain(s).expect("members validate")
            })),
        })
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn image(&self, gen: usize, idx: usize) -> &DMatrix<Complex64> {
        &self.images[gen][idx]
    }

    /// The compression projection for identities involving the given
    /// elements: the intersection of their interior domains, or the
    /// identity when the assignment carries no interior.
    pub fn interior_projection(&self, elems: &[MonoidElement]) -> DMatrix<Complex64> {
        let mut p = DMatrix::identity(self.space_dim, self.space_dim);
        if let Some(f) = &self.interior {
            for s in elems {
                p = p * f(s);
            }
        }
        p
    }

    fn symbol_matrix(&self, s: &Symbol) -> DMatrix<Complex64> {
        let m = &self.images[s.gen][s.idx];
        if s.adjoint {
            m.adjoint()
        } else {
            m.clone()
        }
    }

    fn word_matrix(&self, word: &[Symbol]) -> DMatrix<Complex64> {
        let mut out = DMatrix::identity(self.space_dim, self.space_dim);
        for s in word {
            out = out * self.symbol_matrix(s);
        }
        out
    }
}

/// Splits an element into its sequence of generator letters, leftmost
/// first, together with per-letter dimensions.
fn letters(system: &ProductSystem, t: &MonoidElement) -> Result<Vec<usize>> {
    system.monoid().validate(t)?;
    let mut out = Vec::new();
    match t {
        MonoidElement::Exponents(v) => {
            for (g, &e) in v.iter().enumerate() {
                for _ in 0..e {
                    out.push(g);
                }
            }
        }
        MonoidElement::Word(blocks) => {
            for b in blocks {
                for _ in 0..b.exponent {
                    out.push(b.component);
                }
            }
        }
    }
    Ok(out)
}

/// The extended image `φ(v)`: factor `v.base` into generator letters,
/// decompose each coefficient index in the corresponding mixed radix,
/// compose generator images, and undo the multiplier phase picked up by
/// the letter-by-letter product.
pub fn extend_rep(
    assignment: &GeneratorAssignment,
    system: &ProductSystem,
    v: &FibreVector,
) -> Result<DMatrix<Complex64>> {
    let d = system.fibre_dim(&v.base)?;
    if d != v.coeffs.len() {
        return Err(Error::ShapeMismatch("fibre vector length mismatch".into()));
    }
    let gens = letters(system, &v.base)?;
    let dims: Vec<usize> = gens
        .iter()
        .map(|&g| system.fibre_dim(&system.monoid().generator(g)))
        .collect::<Result<_>>()?;

    // Phase of the letter-by-letter basis product, independent of indices.
    let mut phase = Complex64::new(1.0, 0.0);
    let mut prefix = system.monoid().identity();
    for &g in &gens {
        let letter = system.monoid().generator(g);
        phase *= system.twist_value(&prefix, &letter);
        prefix = system.monoid().multiply(&prefix, &letter)?;
    }

    let n = assignment.space_dim;
    let mut out = DMatrix::zeros(n, n);
    for (idx, c) in v.coeffs.iter().enumerate() {
        if c.norm() <= 1e-16 {
            continue;
        }
        // Mixed-radix digits of idx, leftmost letter most significant.
        let mut digits = vec![0usize; dims.len()];
        let mut rem = idx;
        for k in (0..dims.len()).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let mut term = DMatrix::identity(n, n);
        for (k, &g) in gens.iter().enumerate() {
            term = term * assignment.image(g, digits[k]);
        }
        out += term * (c * phase.conj());
    }
    Ok(out)
}

/// `alpha_phi(s, A) = Σ_u φ(u) A φ(u)*` over the standard basis of `E_s`.
pub fn alpha_phi(
    assignment: &GeneratorAssignment,
    system: &ProductSystem,
    s: &MonoidElement,
    a: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let n = assignment.space_dim;
    let mut out = DMatrix::zeros(n, n);
    for u in system.basis(s)? {
        let phi_u = extend_rep(assignment, system, &u)?;
        out += &phi_u * a * phi_u.adjoint();
    }
    Ok(out)
}

/// The product over the non-adjoint symbols' bases: the element whose
/// interior controls boundary effects for the relation.
fn relation_interior_element(
    system: &ProductSystem,
    lhs: &[Symbol],
) -> Result<MonoidElement> {
    let monoid = system.monoid();
    let mut acc = monoid.identity();
    for s in lhs {
        if !s.adjoint {
            acc = monoid.multiply(&acc, &monoid.generator(s.gen))?;
        }
    }
    Ok(acc)
}

/// Max deviation of one relation on the assignment, after compression to
/// the appropriate interior.
pub fn evaluate_relation(
    assignment: &GeneratorAssignment,
    system: &ProductSystem,
    relation: &Relation,
) -> Result<f64> {
    let n = assignment.space_dim;
    let lhs = assignment.word_matrix(&relation.lhs);
    let mut rhs = DMatrix::zeros(n, n);
    for (c, word) in &relation.rhs {
        rhs += assignment.word_matrix(word) * *c;
    }
    let p = assignment.interior_projection(&[relation_interior_element(system, &relation.lhs)?]);
    Ok(max_deviation(&(lhs * &p), &(rhs * &p)).0)
}

/// Checks the representation axioms: multiplicativity on generator
/// pairs, the inner-product identity on each generator fibre, and all
/// emitted multiplication relations.
pub fn check_representation(
    assignment: &GeneratorAssignment,
    system: &ProductSystem,
    tol: f64,
) -> Result<Report> {
    let monoid = system.monoid();
    let mut report = Report::default();
    let n = monoid.generator_count();

    // (i) φ(u)φ(v) = φ(uv) on generator basis pairs.
    let mut worst = 0.0f64;
    let mut dim = assignment.space_dim;
    for g in 0..n {
        for h in 0..n {
            let (s, t) = (monoid.generator(g), monoid.generator(h));
            let st = monoid.multiply(&s, &t)?;
            let p = assignment.interior_projection(&[st.clone()]);
            dim = dim.min(projection_rank(&p));
            for u in system.basis(&s)? {
                for v in system.basis(&t)? {
                    let uv = system.multiply_fibres(&u, &v)?;
                    let lhs = extend_rep(assignment, system, &u)?
                        * extend_rep(assignment, system, &v)?;
                    let rhs = extend_rep(assignment, system, &uv)?;
                    worst = worst.max(max_deviation(&(lhs * &p), &(rhs * &p)).0);
                }
            }
        }
    }
    report.push(CheckRecord::new(
        "multiplicativity",
        "phi(u) phi(v) = phi(uv) on generator pairs",
        dim,
        worst,
        tol,
        Some("generator pair products".into()),
    ));

    // (ii) φ(e_i)* φ(e_j) = δ_ij I on each generator fibre.
    let mut worst = 0.0f64;
    let mut dim = assignment.space_dim;
    for g in 0..n {
        let s = monoid.generator(g);
        let p = assignment.interior_projection(&[s.clone()]);
        dim = dim.min(projection_rank(&p));
        let d = system.fibre_dim(&s)?;
        for i in 0..d {
            for j in 0..d {
                let lhs = assignment.image(g, i).adjoint() * assignment.image(g, j);
                let delta = if i == j { 1.0 } else { 0.0 };
                let rhs = &p * Complex64::new(delta, 0.0);
                worst = worst.max(max_deviation(&(lhs * &p), &rhs).0);
            }
        }
    }
    report.push(CheckRecord::new(
        "inner_product_identity",
        "phi(v)* phi(u) = <u,v> I on generator fibres",
        dim,
        worst,
        tol,
        Some("generator fibre orthogonality".into()),
    ));

    // (iii) the emitted multiplication relations.
    for relation in gen_mult_relations(system)?.relations {
        let dev = evaluate_relation(assignment, system, &relation)?;
        let dim = projection_rank(
            &assignment.interior_projection(&[relation_interior_element(system, &relation.lhs)?]),
        );
        report.push(CheckRecord::new(
            "mult_relation",
            relation.to_string(),
            dim,
            dev,
            tol,
            None,
        ));
    }
    Ok(report)
}

/// Checks the covariance relations (the adjoint expansions); on totally
/// ordered monoids these reduce to the orthogonality identities.
pub fn check_covariance(
    assignment: &GeneratorAssignment,
    system: &ProductSystem,
    tol: f64,
) -> Result<Report> {
    let mut report = Report::default();
    for relation in gen_cov_relations(system)?.relations {
        let dev = evaluate_relation(assignment, system, &relation)?;
        let dim = projection_rank(
            &assignment.interior_projection(&[relation_interior_element(system, &relation.lhs)?]),
        );
        report.push(CheckRecord::new(
            "cov_relation",
            relation.to_string(),
            dim,
            dev,
            tol,
            None,
        ));
    }
    Ok(report)
}

fn projection_rank(p: &DMatrix<Complex64>) -> usize {
    let mut rank = 0.0;
    for i in 0..p.nrows() {
        rank += p[(i, i)].re;
    }
    rank.round() as usize
}

/// Outcome of evaluating `∏_{s∈S} (I − alpha_phi_s(I))`.
#[derive(Clone, Debug)]
pub struct FaithfulnessOutcome {
    pub nonzero: bool,
    pub norm: f64,
    /// A vector on which the product attains its largest column norm.
    pub witness: Option<DVector<Complex64>>,
    /// Coordinate index of the witness basis vector.
    pub witness_index: Option<usize>,
}

/// Evaluates the faithfulness product for a finite set of nonidentity
/// elements; errors if the identity is in `S`.
pub fn check_faithfulness_criterion(
    assignment: &GeneratorAssignment,
    system: &ProductSystem,
    set: &[MonoidElement],
    tol: f64,
) -> Result<FaithfulnessOutcome> {
    let n = assignment.space_dim;
    let id = DMatrix::identity(n, n);
    let mut prod = id.clone();
    for s in set {
        if s.is_identity() {
            return Err(Error::IdentityNotAllowed);
        }
        prod = prod * (&id - alpha_phi(assignment, system, s, &id)?);
    }
    let mut best = 0.0;
    let mut best_col = None;
    for j in 0..n {
        let norm = prod.column(j).norm();
        if norm > best {
            best = norm;
            best_col = Some(j);
        }
    }
    Ok(FaithfulnessOutcome {
        nonzero: best > tol,
        norm: best,
        witness: best_col.map(|j| DVector::from_column_slice(prod.column(j).as_slice())),
        witness_index: best_col,
    })
}

/// Human-readable name for the `g`-th generator family.
pub fn generator_letter(count: usize, g: usize) -> String {
    if count == 1 {
        "V".to_string()
    } else if count <= 3 {
        ["U", "V", "W"][g].to_string()
    } else {
        format!("S{}", g + 1)
    }
}

/// The faithfulness criterion display for the system: the condition
/// under which the generated representation is faithful.
pub fn criterion_string(system: &ProductSystem) -> Result<String> {
    let monoid = system.monoid();
    let n = monoid.generator_count();
    if n == 1 {
        let letter = generator_letter(1, 0);
        return Ok(format!("sum_k {letter}_k{letter}_k* < I"));
    }
    let mut factors = Vec::new();
    for g in 0..n {
        let letter = generator_letter(n, g);
        let d = system.fibre_dim(&monoid.generator(g))?;
        let mut s = String::from("(I");
        for i in 1..=d {
            s.push_str(&format!(" - {letter}_{i}{letter}_{i}*"));
        }
        s.push(')');
        factors.push(s);
    }
    Ok(format!("{} != 0", factors.join("")))
}
