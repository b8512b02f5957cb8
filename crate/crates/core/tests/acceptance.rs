//! The acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`).

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prodsys::crossed::{
    check_expectation_diagram, monomial_product, monomial_to_fock, pair_interior, phi_delta,
    phi_l, phi_theta, sum_to_fock, Monomial, MonomialSum,
};
use prodsys::fock::{build_truncation, max_deviation, FockOperator};
use prodsys::monoid::{Join, Monoid, MonoidElement};
use prodsys::reps::{criterion_string, gen_cov_relations, gen_mult_relations};
use prodsys::system::{inner_product, Multiplier, ProductSystem};

fn criterion(n: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {n:2} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {n} ({name}) failed: {detail}");
}

fn ab(v: &[u64]) -> MonoidElement {
    MonoidElement::Exponents(v.to_vec())
}

fn sys23() -> ProductSystem {
    ProductSystem::new(Monoid::FreeAbelian { rank: 2 }, vec![2, 3]).unwrap()
}

fn sys_free22() -> ProductSystem {
    ProductSystem::new(Monoid::FreeProduct { components: 2 }, vec![2, 2]).unwrap()
}

#[test]
fn criterion_01_relation_reproduction() {
    let mult = gen_mult_relations(&sys23()).unwrap().lines();
    let cov = gen_cov_relations(&sys23()).unwrap().lines();
    let expect_mult = [
        "S[1,1] S[2,1] = S[2,1] S[1,1]",
        "S[1,1] S[2,2] = S[2,1] S[1,2]",
        "S[1,1] S[2,3] = S[2,2] S[1,1]",
        "S[1,2] S[2,1] = S[2,2] S[1,2]",
        "S[1,2] S[2,2] = S[2,3] S[1,1]",
        "S[1,2] S[2,3] = S[2,3] S[1,2]",
    ];
    let expect_cov = [
        "S[1,1]' S[2,1] = S[2,1] S[1,1]' + S[2,2] S[1,2]'",
        "S[1,1]' S[2,2] = S[2,3] S[1,1]'",
        "S[1,1]' S[2,3] = 0",
        "S[1,2]' S[2,1] = 0",
        "S[1,2]' S[2,2] = S[2,1] S[1,2]'",
        "S[1,2]' S[2,3] = S[2,2] S[1,1]' + S[2,3] S[1,2]'",
    ];
    let pass = mult == expect_mult && cov == expect_cov;
    criterion(
        1,
        "relation reproduction",
        pass,
        &format!("{} multiplication + {} covariance relations", mult.len(), cov.len()),
    );
}

#[test]
fn criterion_02_left_regular_covariance() {
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for (sys, level) in [(sys23(), 2u64), (sys_free22(), 2)] {
        let trunc = build_truncation(&sys, level).unwrap();
        let monoid = *sys.monoid();
        for s in trunc.members() {
            for t in trunc.members() {
                let lhs = trunc.alpha_i(s).unwrap() * trunc.alpha_i(t).unwrap();
                let rhs = match monoid.join(s, t).unwrap() {
                    Join::Element(j) if trunc.contains(&j) => trunc.alpha_i(&j).unwrap(),
                    // A join beyond the truncation dominates no member.
                    Join::Element(_) | Join::Infinity => trunc.zero(),
                };
                worst = worst.max(max_deviation(&lhs, &rhs).0);
                pairs += 1;
            }
        }
    }
    criterion(
        2,
        "left-regular covariance",
        worst == 0.0,
        &format!("{pairs} member pairs, max deviation {worst:.1e}"),
    );
}

#[test]
fn criterion_03_representation_axiom_on_interior() {
    let mut worst = 0.0f64;
    for (sys, level) in [(sys23(), 2u64), (sys_free22(), 2)] {
        let trunc = build_truncation(&sys, level).unwrap();
        let monoid = sys.monoid();
        for g in 0..monoid.generator_count() {
            let s = monoid.generator(g);
            let p = trunc.interior_domain(&s).unwrap();
            let basis = sys.basis(&s).unwrap();
            for u in &basis {
                for v in &basis {
                    let ip = inner_product(u, v).unwrap();
                    let lhs =
                        trunc.l_op(v).unwrap().adjoint() * trunc.l_op(u).unwrap() * &p;
                    let rhs = &p * ip;
                    worst = worst.max(max_deviation(&lhs, &rhs).0);
                }
            }
        }
    }
    criterion(
        3,
        "representation axiom on interior",
        worst <= 1e-12,
        &format!("max deviation {worst:.1e}"),
    );
}

#[test]
fn criterion_04_q_a_calculus() {
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (sys, level) in [(sys23(), 2u64), (sys_free22(), 2)] {
        let trunc = build_truncation(&sys, level).unwrap();
        let monoid = *sys.monoid();
        for _ in 0..50 {
            let size = rng.gen_range(1..=4usize);
            let f: Vec<MonoidElement> = trunc
                .members()
                .choose_multiple(&mut rng, size)
                .cloned()
                .collect();
            let subsets: Vec<Vec<MonoidElement>> = (0..1u32 << f.len())
                .map(|mask| {
                    f.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, t)| t.clone())
                        .collect()
                })
                .collect();
            let qs: Vec<FockOperator> = subsets.iter().map(|a| trunc.q_a(&f, a).unwrap()).collect();

            // Partition of the identity; pairwise orthogonal.
            let total = qs.iter().fold(trunc.zero(), |acc, q| acc + q);
            worst = worst.max(max_deviation(&total, &trunc.identity_op()).0);
            for i in 0..qs.len() {
                for j in 0..qs.len() {
                    if i != j {
                        worst = worst.max(max_deviation(&(&qs[i] * &qs[j]), &trunc.zero()).0);
                    }
                }
            }

            for (a, q) in subsets.iter().zip(&qs) {
                // Nonzero exactly on initial segments.
                let nonzero = q.iter().any(|z| z.norm() > 0.0);
                let initial = match monoid.sigma(a.iter()).unwrap() {
                    Join::Infinity => false,
                    Join::Element(sigma) => {
                        trunc.contains(&sigma)
                            && f.iter().all(|t| {
                                monoid.leq(t, &sigma).unwrap() == a.contains(t)
                            })
                    }
                };
                if nonzero != initial {
                    worst = worst.max(1.0);
                }
                // Pointwise rule vs the product formula, entrywise.
                for s in trunc.members() {
                    let below_matches_a = f
                        .iter()
                        .all(|t| monoid.leq(t, s).unwrap() == a.contains(t));
                    let off = trunc.offset(s).unwrap();
                    let expect = if below_matches_a { 1.0 } else { 0.0 };
                    worst = worst.max((q[(off, off)].re - expect).abs());
                }
                checked += 1;
            }
        }
    }
    criterion(
        4,
        "Q_A projection calculus",
        worst == 0.0,
        &format!("{checked} (F, A) pairs, max deviation {worst:.1e}"),
    );
}

#[test]
fn criterion_05_adjoint_expansion() {
    let mut worst = 0.0f64;
    let mut infinite_cases = 0usize;
    for (sys, level) in [(sys23(), 2u64), (sys_free22(), 2)] {
        let trunc = build_truncation(&sys, level).unwrap();
        let monoid = *sys.monoid();
        let n = monoid.generator_count();
        for g in 0..n {
            for h in 0..n {
                let (s, t) = (monoid.generator(g), monoid.generator(h));
                for v in sys.basis(&s).unwrap() {
                    for w in sys.basis(&t).unwrap() {
                        let lhs =
                            trunc.l_op(&v).unwrap().adjoint() * trunc.l_op(&w).unwrap();
                        match monoid.join(&s, &t).unwrap() {
                            Join::Infinity => {
                                worst = worst.max(max_deviation(&lhs, &trunc.zero()).0);
                                infinite_cases += 1;
                            }
                            Join::Element(j) => {
                                let x = monoid.left_quotient(&s, &j).unwrap().unwrap();
                                let y = monoid.left_quotient(&t, &j).unwrap().unwrap();
                                let mut rhs = trunc.zero();
                                for f in sys.basis(&x).unwrap() {
                                    let vf = sys.multiply_fibres(&v, &f).unwrap();
                                    for gg in sys.basis(&y).unwrap() {
                                        let wg = sys.multiply_fibres(&w, &gg).unwrap();
                                        let c = inner_product(&wg, &vf).unwrap();
                                        rhs += trunc.l_op(&f).unwrap()
                                            * trunc.l_op(&gg).unwrap().adjoint()
                                            * c;
                                    }
                                }
                                let p = trunc.interior_domain(&t).unwrap();
                                worst = worst.max(max_deviation(&(lhs * &p), &(rhs * &p)).0);
                            }
                        }
                    }
                }
            }
        }
    }
    criterion(
        5,
        "adjoint expansion",
        worst <= 1e-9 && infinite_cases > 0,
        &format!("max deviation {worst:.1e}, {infinite_cases} infinite-join zero cases"),
    );
}

/// A random monomial whose three parts have word length at most one.
fn random_small_monomial<R: Rng>(sys: &ProductSystem, rng: &mut R) -> Monomial {
    let pick = |rng: &mut R| {
        let n = sys.monoid().generator_count();
        match rng.gen_range(0..=n) {
            0 => sys.monoid().identity(),
            g => sys.monoid().generator(g - 1),
        }
    };
    let (pu, s, pv) = (pick(rng), pick(rng), pick(rng));
    Monomial::new(
        sys.random_fibre(&pu, rng).unwrap(),
        s,
        sys.random_fibre(&pv, rng).unwrap(),
    )
}

#[test]
fn criterion_06_monomial_algebra_vs_fock() {
    let sys = sys23();
    let trunc = build_truncation(&sys, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m1 = random_small_monomial(&sys, &mut rng);
        let m2 = random_small_monomial(&sys, &mut rng);
        let p = pair_interior(&trunc, &m1, &m2).unwrap();
        let symbolic =
            sum_to_fock(&trunc, &monomial_product(&sys, &m1, &m2).unwrap()).unwrap();
        let direct =
            monomial_to_fock(&trunc, &m1).unwrap() * monomial_to_fock(&trunc, &m2).unwrap();
        worst = worst.max(max_deviation(&(symbolic * &p), &(direct * &p)).0);
    }
    criterion(
        6,
        "monomial algebra vs Fock",
        worst <= 1e-9,
        &format!("200 random pairs, max interior deviation {worst:.1e}"),
    );
}

fn random_sum<R: Rng>(sys: &ProductSystem, terms: usize, rng: &mut R) -> MonomialSum {
    let terms: Vec<(Complex64, Monomial)> = (0..terms)
        .map(|_| {
            (
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                random_small_monomial(sys, rng),
            )
        })
        .collect();
    MonomialSum::from_terms(sys, terms).unwrap()
}

#[test]
fn criterion_07_expectation_diagram() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;

    let sys = sys23();
    let trunc = build_truncation(&sys, 2).unwrap();
    for _ in 0..100 {
        let ms = random_sum(&sys, 8, &mut rng);
        let rec = check_expectation_diagram(&trunc, &ms, 1e-9).unwrap();
        worst = worst.max(rec.max_deviation);

        // Phi_l is idempotent and faithful on positives over the span.
        let x = sum_to_fock(&trunc, &ms).unwrap();
        let once = phi_l(&trunc, &x).unwrap();
        let twice = phi_l(&trunc, &once).unwrap();
        worst = worst.max(max_deviation(&once, &twice).0);
        let pos = x.adjoint() * &x;
        let compressed = phi_l(&trunc, &pos).unwrap();
        let trace: Complex64 = (0..compressed.nrows()).map(|i| compressed[(i, i)]).sum();
        if x.norm() > 1e-9 && trace.re <= 1e-9 {
            worst = worst.max(1.0);
        }
    }

    // Phi_delta ∘ Phi_theta = Phi_delta on free-product samples.
    let free = sys_free22();
    for _ in 0..100 {
        let ms = random_sum(&free, 8, &mut rng);
        let via_theta = phi_delta(&phi_theta(&free, &ms).unwrap());
        if via_theta != phi_delta(&ms) {
            worst = worst.max(1.0);
        }
    }

    criterion(
        7,
        "expectation diagram",
        worst <= 1e-9,
        &format!("100 sums per family, max deviation {worst:.1e}"),
    );
}

#[test]
fn criterion_08_faithfulness_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pass = true;
    for (sys, level) in [(sys23(), 2u64), (sys_free22(), 2), (sys23(), 3)] {
        let trunc = build_truncation(&sys, level).unwrap();
        let nonidentity: Vec<MonoidElement> = trunc
            .members()
            .iter()
            .filter(|t| !t.is_identity())
            .cloned()
            .collect();
        for _ in 0..20 {
            let size = rng.gen_range(1..=nonidentity.len());
            let set: Vec<MonoidElement> = nonidentity
                .choose_multiple(&mut rng, size)
                .cloned()
                .collect();
            let id = trunc.identity_op();
            let mut prod = id.clone();
            for s in &set {
                prod = prod * (&id - trunc.alpha_i(s).unwrap());
            }
            // The vacuum fibre survives every factor exactly.
            if prod[(0, 0)] != Complex64::new(1.0, 0.0) {
                pass = false;
            }
        }
    }

    let over_n = ProductSystem::new(Monoid::FreeAbelian { rank: 1 }, vec![2]).unwrap();
    pass &= criterion_string(&over_n).unwrap() == "sum_k V_kV_k* < I";
    pass &= criterion_string(&sys23()).unwrap()
        == "(I - U_1U_1* - U_2U_2*)(I - V_1V_1* - V_2V_2* - V_3V_3*) != 0";
    criterion(
        8,
        "faithfulness criterion",
        pass,
        "vacuum entry 1 on all sampled S; criterion strings match",
    );
}

/// Order oracle built purely from the multiplication closure: `a ≤ r`
/// iff `r = a c` for some enumerated `c`. Shares no order logic with the
/// library.
struct BruteOrder {
    elems: Vec<MonoidElement>,
    index: HashMap<MonoidElement, usize>,
    above: Vec<HashSet<usize>>,
}

impl BruteOrder {
    fn new(monoid: &Monoid, bound: u64) -> Self {
        let elems = monoid.elements_up_to(bound);
        let index: HashMap<MonoidElement, usize> =
            elems.iter().cloned().zip(0..).collect();
        let mut above = vec![HashSet::new(); elems.len()];
        for (i, a) in elems.iter().enumerate() {
            for c in &elems {
                if a.word_length() + c.word_length() > bound {
                    continue;
                }
                let r = monoid.multiply(a, c).unwrap();
                above[i].insert(index[&r]);
            }
        }
        BruteOrder { elems, index, above }
    }

    fn leq(&self, a: &MonoidElement, b: &MonoidElement) -> bool {
        self.above[self.index[a]].contains(&self.index[b])
    }

    /// Least common upper bound among the enumerated elements; correct
    /// whenever `|a| + |b| ≤ bound`.
    fn join(&self, a: &MonoidElement, b: &MonoidElement) -> Join {
        let ubs: Vec<usize> = (0..self.elems.len())
            .filter(|&r| {
                self.above[self.index[a]].contains(&r) && self.above[self.index[b]].contains(&r)
            })
            .collect();
        let Some(&first) = ubs.first() else { return Join::Infinity };
        // Elements are ordered by length; a least upper bound must be of
        // minimal length, and must sit below every other upper bound.
        let least = ubs
            .iter()
            .take_while(|&&r| self.elems[r].word_length() == self.elems[first].word_length())
            .find(|&&cand| ubs.iter().all(|&r| self.above[cand].contains(&r)));
        match least {
            Some(&r) => Join::Element(self.elems[r].clone()),
            None => panic!("upper bounds without a least one; (QL2) violated"),
        }
    }
}

#[test]
fn criterion_09_join_oracle() {
    // Exhaustive agreement on all word pairs of length ≤ 5 in N*N.
    let free = Monoid::FreeProduct { components: 2 };
    let brute = BruteOrder::new(&free, 10);
    let words = free.elements_up_to(5);
    assert_eq!(words.len(), 63);
    let mut pass = true;
    for a in &words {
        for b in &words {
            pass &= free.leq(a, b).unwrap() == brute.leq(a, b);
            pass &= free.join(a, b).unwrap() == brute.join(a, b);
        }
    }

    // 1000 random pairs in N^3.
    let cube = Monoid::FreeAbelian { rank: 3 };
    let brute3 = BruteOrder::new(&cube, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let a = prodsys::system::random_element(&cube, 6, &mut rng);
        let b = prodsys::system::random_element(&cube, 6, &mut rng);
        pass &= cube.leq(&a, &b).unwrap() == brute3.leq(&a, &b);
        pass &= cube.join(&a, &b).unwrap() == brute3.join(&a, &b);
        let sigma = cube.sigma([&a, &b].into_iter()).unwrap();
        pass &= sigma == brute3.join(&a, &b);
    }

    // Theta grading properties on 1000 random word pairs.
    let target = free.theta_target().unwrap();
    for _ in 0..1000 {
        let a = prodsys::system::random_element(&free, 5, &mut rng);
        let b = prodsys::system::random_element(&free, 5, &mut rng);
        let (ta, tb) = (free.theta(&a).unwrap(), free.theta(&b).unwrap());
        let ab = free.multiply(&a, &b).unwrap();
        pass &= free.theta(&ab).unwrap() == target.multiply(&ta, &tb).unwrap();
        if let Join::Element(j) = free.join(&a, &b).unwrap() {
            pass &= Join::Element(free.theta(&j).unwrap()) == target.join(&ta, &tb).unwrap();
            if ta == tb {
                pass &= a == b;
            }
        }
    }

    criterion(
        9,
        "join oracle",
        pass,
        "exhaustive words ≤ 5, 1000 random N^3 pairs, 1000 theta pairs",
    );
}

#[test]
fn criterion_10_associativity_and_twisted_relations() {
    let mut pass = true;
    let mut worst = 0.0f64;

    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.15);
    let one = Complex64::new(1.0, 0.0);
    let mu = Multiplier::bicharacter(vec![vec![one, one], vec![omega, one]]).unwrap();
    let plain = sys23();
    let twisted = sys23().with_twist(mu).unwrap();

    // Associativity of fibre multiplication, twisted and untwisted.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for sys in [&plain, &twisted] {
        for _ in 0..100 {
            let r = ab(&[1, 0]);
            let s = ab(&[0, 1]);
            let t = ab(&[1, 1]);
            let u = sys.random_fibre(&r, &mut rng).unwrap();
            let v = sys.random_fibre(&s, &mut rng).unwrap();
            let w = sys.random_fibre(&t, &mut rng).unwrap();
            let lhs = sys
                .multiply_fibres(&sys.multiply_fibres(&u, &v).unwrap(), &w)
                .unwrap();
            let rhs = sys
                .multiply_fibres(&u, &sys.multiply_fibres(&v, &w).unwrap())
                .unwrap();
            for (a, b) in lhs.coeffs.iter().zip(&rhs.coeffs) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    pass &= worst <= 1e-12;

    // The twisted relation sets differ from the untwisted ones exactly by
    // the predicted multiplier phases.
    let monoid = plain.monoid();
    let (g1, g2) = (monoid.generator(0), monoid.generator(1));
    let mult_phase = twisted.twist_value(&g1, &g2) * twisted.twist_value(&g2, &g1).conj();
    let cov_phase = twisted.twist_value(&g2, &g1) * twisted.twist_value(&g1, &g2).conj();

    let plain_mult = gen_mult_relations(&plain).unwrap();
    let twist_mult = gen_mult_relations(&twisted).unwrap();
    for (a, b) in plain_mult.relations.iter().zip(&twist_mult.relations) {
        pass &= a.lhs == b.lhs && a.rhs.len() == b.rhs.len();
        for ((ca, wa), (cb, wb)) in a.rhs.iter().zip(&b.rhs) {
            pass &= wa == wb;
            worst = worst.max((ca * mult_phase - cb).norm());
        }
    }
    let plain_cov = gen_cov_relations(&plain).unwrap();
    let twist_cov = gen_cov_relations(&twisted).unwrap();
    for (a, b) in plain_cov.relations.iter().zip(&twist_cov.relations) {
        pass &= a.lhs == b.lhs && a.rhs.len() == b.rhs.len();
        for ((ca, wa), (cb, wb)) in a.rhs.iter().zip(&b.rhs) {
            pass &= wa == wb;
            worst = worst.max((ca * cov_phase - cb).norm());
        }
    }
    pass &= worst <= 1e-12;

    // The twisted relations still hold on the twisted Fock assignment.
    let trunc = build_truncation(&twisted, 2).unwrap();
    let fock = prodsys::reps::GeneratorAssignment::fock(&trunc).unwrap();
    let rep = prodsys::reps::check_representation(&fock, &twisted, 1e-9).unwrap();
    let cov = prodsys::reps::check_covariance(&fock, &twisted, 1e-9).unwrap();
    pass &= rep.pass_all() && cov.pass_all();

    criterion(
        10,
        "associativity and twisted relations",
        pass,
        &format!("max deviation {worst:.1e}"),
    );
}

// Shared smoke check: the two reference systems drive a dense DMatrix
// pipeline; make sure the truncations have the documented sizes so the
// other criteria exercise what they claim to.
#[test]
fn reference_truncation_sizes() {
    let t23 = build_truncation(&sys23(), 3).unwrap();
    assert_eq!(t23.total_dim(), 90);
    let tf = build_truncation(&sys_free22(), 2).unwrap();
    assert_eq!(tf.members().len(), 7);
    let _unused: DMatrix<Complex64> = tf.zero();
}
