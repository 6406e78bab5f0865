use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treedist::metrics::{
    align, align_matrix, cophenetic, mast, node_dist, quartet, rf, rfl, similarity_prob, triplet, triplet_length,
    ClassAssignment, Flag,
};
use treedist::oracle::brute_assignment_max;
use treedist::random::random_tree;
use treedist::tree::{enumerate_binary_topologies, parse_newick};
use treedist::{Error, LabelBits, Tree};

fn t(s: &str) -> Tree {
    parse_newick(s).unwrap()
}

#[test]
fn exhaustive_four_leaf_pairs() {
    let all = enumerate_binary_topologies(4).unwrap();
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate() {
            let same = i == j;
            let r = rf(a, b).unwrap().value;
            assert_eq!(r == 0.0, same);
            assert_eq!(r % 2.0, 0.0);
            // Rooted triplets determine a rooted binary tree.
            assert_eq!(triplet(a, b).unwrap().value == 0.0, same);
            assert_eq!(mast(a, b).unwrap().value == 0.0, same);
            assert!(quartet(a, b).unwrap().value <= 1.0);
            let nd = node_dist(a, b, 1).unwrap().value;
            assert_eq!(nd, node_dist(b, a, 1).unwrap().value);
            if same {
                assert_eq!(nd, 0.0);
                assert_eq!(align(a, b).unwrap().value, 2.0);
                assert_eq!(similarity_prob(a, b).unwrap().value, 0.0);
                assert!((cophenetic(a, b, None, None).unwrap().value - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn align_matches_permutation_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let a = random_tree(9, 0.3, &mut rng);
        let b = random_tree(9, 0.3, &mut rng);
        let m = align_matrix(&a, &b);
        let got = align(&a, &b).unwrap();
        assert!((got.value - brute_assignment_max(&m).unwrap()).abs() < 1e-9);
        let uneven = a.internal_edges().count() != b.internal_edges().count();
        assert_eq!(got.flags.contains(&Flag::Degenerate), uneven);
    }
}

#[test]
fn mast_examples() {
    assert_eq!(mast(&t("(((1,2),3),4);"), &t("(((1,3),2),4);")).unwrap().value, 1.0);
    assert_eq!(mast(&t("((1,2),(3,4));"), &t("((1,3),(2,4));")).unwrap().value, 2.0);
    assert_eq!(mast(&t("(1,2,3,4);"), &t("(1,2,3,4);")).unwrap().value, 0.0);
    let big = (1..=17).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    let star = t(&format!("({big});"));
    assert!(matches!(mast(&star, &star), Err(Error::Size(_))));
}

#[test]
fn node_distance_exponents() {
    let a = t("(((1,2),3),4);");
    let b = t("((1,2),(3,4));");
    // Unweighted paths: a = [2,3,4,3,4,3] and b = [2,4,4,4,4,2] over pairs i<j.
    assert!((node_dist(&a, &b, 1).unwrap().value - 0.5).abs() < 1e-12);
    assert!((node_dist(&a, &b, 2).unwrap().value - 0.5).abs() < 1e-12);
    let c = t("((1,2),3,4);");
    // Against c = [2,3,3,3,3,2]: differences 0,0,1,0,1,1.
    assert!((node_dist(&a, &c, 1).unwrap().value - 0.5).abs() < 1e-12);
    assert!(matches!(node_dist(&a, &b, 3), Err(Error::Domain(_))));
}

#[test]
fn triplet_length_counts_weighted_disagreement() {
    let a = t("((1:1,2:1):1,3:1);");
    assert_eq!(triplet_length(&a, &a).unwrap().value, 0.0);
    // The only triplet agrees; paths 1-2 and 1-3 grow by 1 and 1.
    let b = t("((1:2,2:1):1,3:1);");
    assert_eq!(triplet_length(&a, &b).unwrap().value, 2.0);
    // A disagreeing triplet contributes nothing.
    let c = t("((1:1,3:1):1,2:1);");
    assert_eq!(triplet_length(&a, &c).unwrap().value, 0.0);
}

#[test]
fn rfl_is_symmetric_and_weighted() {
    let a = t("((1:1,2:1):0.5,(3:1,4:1):1,5:2);");
    let b = t("((1:1,2:1):1.5,3:1,4:1,5:1);");
    let x = rfl(&a, &b).unwrap().value;
    assert_eq!(x, rfl(&b, &a).unwrap().value);
    // {1,2}: 1.0, {3,4}: 1.0, leaf 5: 1.0.
    assert!((x - 3.0).abs() < 1e-12);
}

#[test]
fn cophenetic_class_maps() {
    let a = t("(((1,2),3),(4,5));");
    let b = t("((1,2),(3,(4,5)));");
    let plain = cophenetic(&a, &b, None, None).unwrap().value;
    assert!(plain.is_finite() && plain.abs() <= 1.0);

    let key = |ls: &[usize]| LabelBits::from_labels(5, ls.iter().copied());
    let mut classes = BTreeMap::new();
    classes.insert(key(&[1, 2, 3]), 5);
    let bad = ClassAssignment::new(classes);
    assert!(matches!(cophenetic(&a, &b, Some(&bad), None), Err(Error::NonMonotoneClasses(_))));

    let mut classes = BTreeMap::new();
    classes.insert(key(&[1, 3]), 2);
    let unknown = ClassAssignment::new(classes);
    assert!(matches!(cophenetic(&a, &b, Some(&unknown), None), Err(Error::UnknownCluster(_))));

    let star = t("(1,2,3,4,5);");
    let r = cophenetic(&star, &a, None, None).unwrap();
    assert!(r.value.is_nan());
    assert!(r.flags.contains(&Flag::Degenerate));
}

#[test]
fn similarity_prob_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let a = random_tree(8, 0.3, &mut rng);
        let b = random_tree(8, 0.3, &mut rng);
        let v = similarity_prob(&a, &b).unwrap().value;
        assert!((0.0..=1.0).contains(&v), "{v}");
        assert!((v - similarity_prob(&b, &a).unwrap().value).abs() < 1e-12);
    }
    let zero = t("((1:0,2:0):0,3:0);");
    assert!(matches!(similarity_prob(&zero, &zero), Err(Error::ZeroLengthTree)));
}
