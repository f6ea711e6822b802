//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line with
//! its measured time and budget; every comparison is exact (tolerance 0).

use std::time::{Duration, Instant};

use jetcomplex::cauchyfueter::{
    cf_apply, cf_kernel_formula, cf_symbol, cf_system, degree7_certificate, exactness_dims, tor0_apply, tor0_symbol,
    tor1_symbol, CFPair, NVARS,
};
use jetcomplex::complexbuilder::{build_complex, compatibility_operator, hilbert_series_u64, syzygy_generators, SymbolMatrix};
use jetcomplex::exactalg::{choose, ExactScalar, RankPolicy, SumIdentity};
use jetcomplex::forms::{ext_d, euler_contraction, koszul_solve, torsion_residuals, PolyForm};
use jetcomplex::involution::{is_involutive, Verdict};
use jetcomplex::jets::{jet_dim, tableau_dim, PDESystem};
use jetcomplex::poly::Poly;
use jetcomplex::wfamily::{make_wsystem, wdim_formula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOLERANCE: &str = "exact (tolerance 0)";

fn report(id: u32, name: &str, pass: bool, detail: &str, start: Instant, budget: Duration) {
    let el = start.elapsed();
    let status = if pass && el <= budget { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:>2} [{status}] {name}: {detail}; {TOLERANCE}; {:.2}s of {}s budget",
        el.as_secs_f64(),
        budget.as_secs()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(el <= budget, "criterion {id} exceeded its time budget");
}

#[test]
fn c01_closed_form_dimension_grid() {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 2..=4 {
        for m in 2..=4 {
            for t in 1..=n.min(m) {
                let diagonal: Vec<(usize, usize)> = (1..=t).map(|i| (i, i)).collect();
                let canonical: Vec<(usize, usize)> = (0..t).map(|k| (n - k, m - k)).collect();
                for pairs in [diagonal, canonical] {
                    let w = make_wsystem(n, m, &pairs).unwrap();
                    for q in 0..=4 {
                        let brute = tableau_dim(&w.base, q) as u64;
                        let formula = wdim_formula(n, m, t, q).unwrap();
                        checked += 1;
                        if brute != formula {
                            bad.push((n, m, t, q, brute, formula));
                        }
                    }
                }
            }
        }
    }
    report(
        1,
        "closed-form tableau dimension vs kernel",
        bad.is_empty(),
        &format!("{checked} grid points, mismatches {bad:?}"),
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn c02_cf_kernel_dimensions() {
    let start = Instant::now();
    let got: Vec<u64> = (0..=3).map(|k| tableau_dim(&cf_system(), k + 3) as u64).collect();
    let formula: Vec<u64> = (0..=3).map(cf_kernel_formula).collect();
    // k=2 is 4*126 + 2*84 = 672
    let pass = got == formula && got == vec![210, 392, 672, 1080];
    report(2, "CF prolongation kernels", pass, &format!("kernels {got:?}, formula {formula:?}"), start, Duration::from_secs(300));
}

#[test]
fn c03_cf_jet_exactness() {
    let start = Instant::now();
    let r0 = exactness_dims(0, &RankPolicy::Rational, 1_000_000).unwrap();
    let r1 = exactness_dims(1, &RankPolicy::Modular { trials: 2, seed: 0 }, 1_000_000).unwrap();
    let primes = r1.report.ranks.iter().map(|r| r.modular.as_ref().map_or(0, |m| m.primes.len())).min().unwrap();
    let exact_k = |r: &jetcomplex::cauchyfueter::CfExactness, k: u32| {
        let slot1 = &r.report.slots[1];
        slot1.kernel_dim == slot1.rank_in && r.ranks[2] == jet_dim(2, k, NVARS)
    };
    let pass = exact_k(&r0, 0)
        && exact_k(&r1, 1)
        && r0.ranks == vec![450, 30, 2]
        && r1.ranks[2] == 16
        && r0.report.ranks.iter().all(|r| r.modular.is_none())
        && primes >= 2;
    report(
        3,
        "CF jet-level exactness",
        pass,
        &format!("k=0 ranks {:?} (rational), k=1 ranks {:?} (modular, {primes} primes per rank)", r0.ranks, r1.ranks),
        start,
        Duration::from_secs(300),
    );
}

#[test]
fn c04_degree_seven_certificate() {
    let start = Instant::now();
    let c = degree7_certificate();
    report(
        4,
        "degree-7 certificate",
        c.passed && c.values == vec![0; 8] && c.eighth_difference == 0,
        &format!("P(0..7) = {:?}, 8th difference {}", c.values, c.eighth_difference),
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn c05_torsion_recovery() {
    let start = Instant::now();
    let stage = syzygy_generators(&cf_symbol(), 3).unwrap();
    let (op, _) = compatibility_operator(&cf_symbol(), 3).unwrap();
    let first = op.row_space_equal(&tor0_symbol()).unwrap();
    let (op2, stage2) = compatibility_operator(&tor0_symbol(), 3).unwrap();
    let second = op2.row_space_equal(&tor1_symbol()).unwrap();
    let chain = build_complex(&cf_system(), 3, 9).unwrap();
    let pass = stage.count_at(1) == 0
        && stage.count_at(2) == 4
        && stage.total() == 4
        && first
        && stage2.total() == 2
        && second
        && chain.sizes == vec![2, 4, 4, 2];
    report(
        5,
        "torsion recovery from syzygies",
        pass,
        &format!(
            "degree 1/2 generators {}/{}, second stage {}, row spaces equal {first}/{second}, chain {:?}",
            stage.count_at(1),
            stage.count_at(2),
            stage2.total(),
            chain.sizes
        ),
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn c06_wfamily_torsion_count() {
    let start = Instant::now();
    let mut counts = Vec::new();
    for t in 1..=5 {
        let pairs: Vec<(usize, usize)> = (1..=t).map(|i| (i, i)).collect();
        let w = make_wsystem(5, 5, &pairs).unwrap();
        let stage = syzygy_generators(&SymbolMatrix::from_system(&w.base), 2).unwrap();
        counts.push((stage.count_at(2) as u64, choose(t as i64, 3)));
    }
    report(
        6,
        "W-family degree-2 syzygy count",
        counts.iter().all(|(a, b)| a == b),
        &format!("(found, C(t,3)) for t=1..5: {counts:?}"),
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn c07_involution_verdicts() {
    let start = Instant::now();
    let cf = is_involutive(&cf_system(), 50, 2024).unwrap();
    let all_42 = cf.rhs_samples.iter().all(|s| s.rhs == 42);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let terms: Vec<(usize, usize, usize, ExactScalar)> = (0..2)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (0, i, j, ExactScalar::from_int(rng.gen_range(1..=9))))
        .collect();
    let single = PDESystem::from_terms(1, 2, 4, terms, "generic").unwrap();
    let s = is_involutive(&single, 10, 7).unwrap();
    let pass = cf.lhs == 40 && cf.rhs_min == 42 && all_42 && cf.verdict == Verdict::NotInvolutive && s.verdict == Verdict::Involutive;
    report(
        7,
        "involution verdicts",
        pass,
        &format!(
            "CF (lhs, rhs_min) = ({}, {}) over {} seeds, all samples 42: {all_42}; single equation ({}, {}) {:?}",
            cf.lhs, cf.rhs_min, cf.samples, s.lhs, s.rhs_min, s.verdict
        ),
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn c08_summation_identities() {
    let start = Instant::now();
    let mut checked = 0;
    let mut failed = Vec::new();
    let r = 0..=10i64;
    for id in 1..=6u8 {
        let arity = if matches!(id, 1 | 4) { 2 } else { 3 };
        let mut tuples: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..arity {
            tuples = tuples.into_iter().flat_map(|t| r.clone().map(move |x| [t.clone(), vec![x]].concat())).collect();
        }
        for p in tuples {
            let ident = SumIdentity::from_id(id, &p).unwrap();
            match ident.holds() {
                Ok(true) => checked += 1,
                Ok(false) => failed.push((id, p)),
                Err(_) => {}
            }
        }
    }
    report(
        8,
        "binomial summation identities",
        failed.is_empty() && checked > 0,
        &format!("{checked} admissible parameter tuples, failures {failed:?}"),
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn c09_hilbert_series() {
    let start = Instant::now();
    let dims: Vec<u64> = (0..20).map(|q| wdim_formula(4, 4, 4, q).unwrap()).collect();
    let s = hilbert_series_u64(&dims, 9).unwrap();
    let shown = s.to_string();
    let ten: Vec<ExactScalar> = s.terms(10);
    let expect: Vec<ExactScalar> = dims[..10].iter().map(|&d| ExactScalar::from(d)).collect();
    let brute: Vec<u64> = (0..4).map(|q| tableau_dim(&cf_system(), q) as u64).collect();
    let pass = shown == "(12 - 20z + 20z^2 - 10z^3 + 2z^4) / (1-z)^5" && ten == expect && brute == dims[..4];
    report(9, "Hilbert-Poincare series of CF", pass, &format!("{shown}, 10 terms reproduced"), start, Duration::from_secs(10));
}

#[test]
fn c10_forms_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=4);
        let r = rng.gen_range(1..=3.min(n));
        let s = rng.gen_range(1..=3);
        let f = PolyForm::random(n, r, s, 0.8, &mut rng);
        let dd = ext_d(&ext_d(&f)).is_zero();
        let euler = ext_d(&euler_contraction(&f))
            .add(&euler_contraction(&ext_d(&f)))
            .unwrap()
            == f.scale(&ExactScalar::from((s as usize + r) as u64));
        let df = ext_d(&f);
        let round = df.is_zero() || ext_d(&koszul_solve(&df).unwrap()) == df;
        if dd && euler && round {
            ok += 1;
        }
    }
    let mut residual_ok = 0;
    let mut nontrivial = 0;
    for _ in 0..50 {
        let pair = CFPair {
            phi0: Poly::random_homogeneous(NVARS, 3, 5, 0.5, &mut rng),
            phi1: Poly::random_homogeneous(NVARS, 3, 5, 0.5, &mut rng),
        };
        let phi = tor0_apply(&cf_apply(&pair)).to_full();
        let free: [Poly; 4] = std::array::from_fn(|_| Poly::random_homogeneous(NVARS, 3, 5, 0.3, &mut rng));
        let psi = tor0_apply(&free);
        if !psi.is_zero() {
            nontrivial += 1;
        }
        let psi = psi.to_full();
        if (0..2).all(|d| torsion_residuals(&phi, d).unwrap().is_zero() && torsion_residuals(&psi, d).unwrap().is_zero()) {
            residual_ok += 1;
        }
    }
    report(
        10,
        "forms suite",
        ok == 200 && residual_ok == 50 && nontrivial > 0,
        &format!("{ok}/200 forms pass d^2=0, Euler and primitive checks; {residual_ok}/50 cubic pairs with vanishing residuals"),
        start,
        Duration::from_secs(60),
    );
}
