//! Randomized invariants across modules.

use jetcomplex::complexbuilder::{build_complex, hilbert_series};
use jetcomplex::exactalg::{choose, ExactMatrix, ExactScalar};
use jetcomplex::forms::{euler_contraction, ext_d, koszul_solve, PolyForm};
use jetcomplex::involution::{cartan_test, is_involutive, witness_extension_tally, Verdict};
use jetcomplex::jets::{change_coordinates, jet_dim, tableau_dim, CoordinateChange, MonomialBasis, PDESystem};
use jetcomplex::wfamily::{make_wsystem, torsion_condition, wdim_formula, wtorsion_conditions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Small first-order systems with no identically zero equation.
fn small_system() -> impl Strategy<Value = PDESystem> {
    (1usize..=3, 1usize..=2, 2usize..=4).prop_flat_map(|(eqs, unk, vars)| {
        proptest::collection::vec(proptest::collection::vec(proptest::collection::vec(-2i64..=2, vars), unk), eqs)
            .prop_filter("nonzero equations", |c| c.iter().all(|e| e.iter().flatten().any(|&x| x != 0)))
            .prop_map(move |c| {
                let c = c
                    .into_iter()
                    .map(|e| e.into_iter().map(|r| r.into_iter().map(ExactScalar::from_int).collect()).collect())
                    .collect();
                PDESystem::new(c, unk, vars, "random").unwrap()
            })
    })
}

fn coords(n: usize, seed: u64) -> CoordinateChange {
    CoordinateChange::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity_and_modular_bound(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 1..8), 1..8), seed in any::<u64>()) {
        let w = rows[0].len();
        let rows: Vec<Vec<i64>> = rows.into_iter().map(|mut r| { r.resize(w, 0); r }).collect();
        let m = ExactMatrix::from_i64(&rows);
        let rank = m.rank();
        prop_assert_eq!(rank + m.nullity(), m.ncols());
        prop_assert_eq!(m.kernel_basis().ncols(), m.nullity());
        let modular = m.rank_modp(2, seed).unwrap();
        prop_assert!(modular.rank <= rank);
        prop_assert_eq!(modular.rank, rank);
    }

    #[test]
    fn jet_dim_counts_the_basis(p in 1usize..=4, n in 1usize..=8, k in 0u32..=6) {
        prop_assert_eq!(jet_dim(p, k, n), p * MonomialBasis::new(n, k).len());
        prop_assert_eq!(MonomialBasis::new(n, k).len() as u64, choose((n as i64) + k as i64 - 1, k as i64));
    }

    #[test]
    fn tableau_dim_is_coordinate_free(sys in small_system(), seed in any::<u64>()) {
        let t = coords(sys.variables(), seed);
        let moved = change_coordinates(&sys, &t).unwrap();
        for q in 0..=2 {
            prop_assert_eq!(tableau_dim(&moved, q), tableau_dim(&sys, q));
        }
    }

    #[test]
    fn cartan_inequality(sys in small_system(), seed in any::<u64>()) {
        let r = cartan_test(&sys, &coords(sys.variables(), seed)).unwrap();
        prop_assert!(r.lhs <= r.rhs);
    }

    #[test]
    fn chains_compose_to_zero(sys in small_system()) {
        let n = sys.variables();
        let chain = build_complex(&sys, 3, n + 1).unwrap();
        prop_assert!(chain.len() <= n + 1);
        prop_assert!(chain.verify_products().is_ok());
        for w in chain.operators.windows(2) {
            prop_assert!(w[1].compose(&w[0]).unwrap().is_zero());
        }
    }

    #[test]
    fn hilbert_fit_resums(c in proptest::collection::vec(-5i64..=5, 1..=4), head in -3i64..=3) {
        // polynomial sequence with a perturbed first term: rational with denominator (1-z)^deg+1
        let dims: Vec<ExactScalar> = (0..14i64)
            .map(|q| {
                let v: i64 = c.iter().rev().fold(0, |acc, &a| acc * q + a);
                ExactScalar::from_int(if q == 0 { v + head } else { v })
            })
            .collect();
        let s = hilbert_series(&dims, 6).unwrap();
        prop_assert_eq!(s.terms(dims.len()), dims);
        prop_assert!(s.denominator.len() <= c.len() + 1);
    }

    #[test]
    fn wfamily_conditions_alternate(n in 3usize..=5, m in 3usize..=5, perm_seed in any::<u64>()) {
        let t = n.min(m);
        let mut js: Vec<usize> = (1..=m).collect();
        let mut j0s: Vec<usize> = (1..=n).collect();
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        js.shuffle(&mut rng);
        j0s.shuffle(&mut rng);
        let pairs: Vec<(usize, usize)> = j0s.iter().zip(&js).take(t).map(|(&a, &b)| (a, b)).collect();
        let w = make_wsystem(n, m, &pairs).unwrap();
        prop_assert_eq!(wtorsion_conditions(&w).len() as u64, choose(t as i64, 3));
        let up = w.index_set.upper();
        let nv = n + m;
        let row = |a, b, c| torsion_condition(&w.index_set, a, b, c).unwrap().symbol_row(t, nv);
        let (a, b, c) = (up[0], up[1], up[2]);
        let base = row(a, b, c);
        let neg: Vec<_> = base.iter().map(|p| -p).collect();
        prop_assert_eq!(row(b, a, c), neg.clone());
        prop_assert_eq!(row(a, c, b), neg.clone());
        prop_assert_eq!(row(c, b, a), neg);
        prop_assert_eq!(row(b, c, a), base);
    }

    #[test]
    fn form_identities(n in 2usize..=4, r in 0usize..=3, s in 1u32..=3, seed in any::<u64>()) {
        prop_assume!(r <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PolyForm::random(n, r, s, 0.7, &mut rng);
        let df = ext_d(&f);
        prop_assert!(ext_d(&df).is_zero());
        let weight = ExactScalar::from((s as usize + r) as u64);
        let lhs = if r == 0 {
            euler_contraction(&df)
        } else {
            ext_d(&euler_contraction(&f)).add(&euler_contraction(&df)).unwrap()
        };
        prop_assert_eq!(lhs, f.scale(&weight));
        if !df.is_zero() {
            prop_assert_eq!(ext_d(&koszul_solve(&df).unwrap()), df);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Every sampled regular witness extends exactly when the Cartan test says involutive.
    #[test]
    fn witnesses_agree_with_cartan(sys in small_system(), seed in any::<u64>()) {
        let t = coords(sys.variables(), seed);
        let cartan = cartan_test(&sys, &t).unwrap();
        let tally = witness_extension_tally(&sys, &t, 20, seed).unwrap();
        prop_assert_eq!(tally.all_extend(), cartan.equal, "tally {:?}, cartan {:?}", tally, cartan);
    }

    #[test]
    fn involution_survives_restriction(sys in small_system(), seed in any::<u64>()) {
        let n = sys.variables();
        let rep = is_involutive(&sys, 3, seed).unwrap();
        prop_assume!(rep.verdict == Verdict::Involutive);
        let moved = change_coordinates(&sys, &coords(n, seed ^ 1)).unwrap();
        for j in 1..n.saturating_sub(1) {
            let r = is_involutive(&moved.restrict(j), 3, seed).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Involutive, "restriction to the last {} variables", n - j);
        }
    }

    #[test]
    fn wfamily_formula_matches_kernel(n in 2usize..=4, m in 2usize..=4, t in 1usize..=4, q in 0u32..=3) {
        prop_assume!(t <= n.min(m));
        let pairs: Vec<(usize, usize)> = (1..=t).map(|i| (i, i)).collect();
        let w = make_wsystem(n, m, &pairs).unwrap();
        prop_assert_eq!(tableau_dim(&w.base, q) as u64, wdim_formula(n, m, t, q).unwrap());
    }
}
