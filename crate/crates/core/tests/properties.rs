use proptest::prelude::*;

use irr_core::corpus::{default_doc_ids, intra_topic_pairs, TopicModel};
use irr_core::evalmetrics::{contingency_score, kappa_average_precision, rank_pairs, ContingencyTable};
use irr_core::linalg::{canonical_angles, norm, orthonormality_error, project, svd, Matrix};
use irr_core::subspace::{irr, lsi, rescale, IrrConfig};

fn sized(r: usize, c: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, r * c).prop_map(move |d| Matrix::new(r, c, d).unwrap())
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_rows, 2..=max_cols).prop_flat_map(|(r, c)| sized(r, c))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rescale_scales_norm(r in prop::collection::vec(-2.0f64..2.0, 1..20), q in 0.0f64..4.0) {
        let n = norm(&r);
        let s = rescale(&r, q);
        prop_assert!((norm(&s) - n.powf(q + 1.0)).abs() <= 1e-9 * n.powf(q + 1.0).max(1.0));
    }

    #[test]
    fn irr_basis_is_orthonormal_with_shrinking_residuals(a in matrix(12, 10), q in 0.0f64..5.0) {
        let rank = svd(&a).unwrap().rank();
        let out = irr(&a, &IrrConfig::fixed(q, rank)).unwrap();
        prop_assert!(orthonormality_error(out.basis.matrix()) < 1e-8);
        for w in out.residual_ratios.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        // At full rank the residual is gone.
        prop_assert!(*out.residual_ratios.last().unwrap() < 1e-16 * out.residual_ratios[0].max(1.0) + 1e-20);
    }

    #[test]
    fn irr_without_rescaling_is_lsi(a in matrix(15, 10), pick in 0usize..100) {
        let rank = svd(&a).unwrap().rank();
        let ell = 1 + pick % rank;
        let p_lsi = project(&lsi(&a, ell).unwrap().basis, &a).unwrap();
        let p_irr = project(&irr(&a, &IrrConfig::fixed(0.0, ell)).unwrap().basis, &a).unwrap();
        prop_assert!(p_lsi.sub(&p_irr).unwrap().frobenius_norm() < 1e-8);
    }

    #[test]
    fn singular_values_move_at_most_frobenius(a in matrix(10, 8), scale in 1e-6f64..1.0, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let e = Matrix::new(a.rows(), a.cols(), (0..a.rows() * a.cols()).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let b = a.add(&e).unwrap();
        let len = a.rows().min(a.cols());
        let (sa, sb) = (svd(&a).unwrap().padded_values(len), svd(&b).unwrap().padded_values(len));
        let ef = e.frobenius_norm();
        for (x, y) in sa.iter().zip(&sb) {
            prop_assert!((x - y).abs() <= ef + 1e-10);
        }
    }

    #[test]
    fn canonical_angles_are_symmetric((a, b) in (4..10usize, 1..4usize).prop_flat_map(|(r, c)| (sized(r, c), sized(r, c)))) {
        prop_assume!(svd(&a).unwrap().rank() == a.cols() && svd(&b).unwrap().rank() == b.cols());
        let ba = lsi(&a, a.cols()).unwrap().basis;
        let bb = lsi(&b, b.cols()).unwrap().basis;
        let x = canonical_angles(&ba, &bb).unwrap();
        let y = canonical_angles(&bb, &ba).unwrap();
        for (u, v) in x.angles.iter().zip(&y.angles) {
            prop_assert!((u - v).abs() < 1e-7);
        }
        prop_assert!(x.angles.iter().all(|t| (0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(t)));
    }

    #[test]
    fn kappa_ignores_document_order(
        a in sized(6, 9),
        perm in Just((0..9usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let tm = TopicModel::single_topic(&[4, 3, 2]).unwrap();
        let ids = default_doc_ids(9);
        let kappa = kappa_average_precision(&rank_pairs(&a, &ids).unwrap(), &intra_topic_pairs(&tm)).unwrap();

        // Move document d to position perm[d], carrying its id and topic.
        let mut cols = vec![Vec::new(); 9];
        let mut pids = vec![String::new(); 9];
        let mut rel = Matrix::zeros(3, 9);
        for d in 0..9 {
            cols[perm[d]] = a.column(d);
            pids[perm[d]] = ids[d].clone();
            for t in 0..3 {
                rel[(t, perm[d])] = tm.relevance()[(t, d)];
            }
        }
        let pa = Matrix::from_columns(a.rows(), &cols).unwrap();
        let ptm = TopicModel::new(rel, tm.topic_ids().to_vec(), pids.clone()).unwrap();
        let pk = kappa_average_precision(&rank_pairs(&pa, &pids).unwrap(), &intra_topic_pairs(&ptm)).unwrap();
        prop_assert_eq!(kappa, pk);
    }

    #[test]
    fn contingency_score_is_a_fraction(cells in prop::collection::vec(prop::collection::vec(0usize..20, 3), 1..5)) {
        let t = ContingencyTable::new(cells).unwrap();
        let s = contingency_score(&t);
        prop_assert!((0.0..=1.0).contains(&s));
    }
}
