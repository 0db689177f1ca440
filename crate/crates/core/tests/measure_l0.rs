mod common;

use common::q;
use proptest::prelude::*;
use randfix_core::{
    commutes_with_concatenation, compare_event, concatenate, l0_norm_squared, random_subsequence_bw,
    Concatenate, Error, Event, L0Label, L0Scalar, L0Vector, PartitionOfUnity, ProbabilitySpace, Rational,
    Relation, Weights,
};

fn space_and_masks() -> impl Strategy<Value = (usize, Vec<bool>, Vec<bool>, Vec<bool>)> {
    (1usize..10).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(any::<bool>(), k),
            prop::collection::vec(any::<bool>(), k),
            prop::collection::vec(any::<bool>(), k),
        )
    })
}

fn event(space: &ProbabilitySpace, mask: &[bool]) -> Event {
    Event::from_fn(space, |a| mask[a])
}

proptest! {
    #[test]
    fn boolean_laws((k, ma, mb, mc) in space_and_masks()) {
        let s = ProbabilitySpace::uniform(k).unwrap();
        let (a, b, c) = (event(&s, &ma), event(&s, &mb), event(&s, &mc));
        // De Morgan
        prop_assert_eq!(a.join(&b).unwrap().complement(), a.complement().meet(&b.complement()).unwrap());
        prop_assert_eq!(a.meet(&b).unwrap().complement(), a.complement().join(&b.complement()).unwrap());
        // distributivity
        prop_assert_eq!(
            a.meet(&b.join(&c).unwrap()).unwrap(),
            a.meet(&b).unwrap().join(&a.meet(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.difference(&b).unwrap(), a.meet(&b.complement()).unwrap());
        prop_assert!(a.join(&a.complement()).unwrap().is_full());
        prop_assert!(a.meet(&a.complement()).unwrap().is_empty());
        // additivity of P
        let disjoint = a.difference(&b).unwrap();
        prop_assert_eq!(
            a.join(&b).unwrap().probability(),
            disjoint.probability() + b.probability()
        );
    }

    #[test]
    fn refinement_is_finer(keys1 in prop::collection::vec(0u8..3, 1..10), seed in 0u8..3) {
        let k = keys1.len();
        let s = ProbabilitySpace::uniform(k).unwrap();
        let p1 = PartitionOfUnity::group_by(&s, |a| keys1[a]);
        let p2 = PartitionOfUnity::group_by(&s, |a| (a as u8 + seed) % 2);
        let r = p1.refine(&p2).unwrap();
        prop_assert!(r.is_finer_than(&p1).unwrap());
        prop_assert!(r.is_finer_than(&p2).unwrap());
        let total: Rational = r.parts().iter().map(Event::probability).sum();
        prop_assert_eq!(total, q(1, 1));
    }

    #[test]
    fn splicing_commutes_with_pointwise_ops(
        rows in prop::collection::vec(prop::collection::vec(-20i64..20, 2), 4),
        other in prop::collection::vec(prop::collection::vec(-20i64..20, 2), 4),
        keys in prop::collection::vec(0u8..2, 4),
    ) {
        let s = ProbabilitySpace::uniform(4).unwrap();
        let to_q = |r: &Vec<Vec<i64>>| r.iter().map(|v| v.iter().map(|&x| q(x, 1)).collect()).collect::<Vec<Vec<Rational>>>();
        let x = L0Vector::new(&s, to_q(&rows)).unwrap();
        let y = L0Vector::new(&s, to_q(&other)).unwrap();
        let p = PartitionOfUnity::group_by(&s, |a| keys[a]);
        let items: Vec<L0Vector<Rational>> = if p.len() == 1 { vec![x] } else { vec![x, y] };
        prop_assert!(commutes_with_concatenation(&items, &p, |v| Ok(l0_norm_squared(v))).unwrap());
        prop_assert!(commutes_with_concatenation(&items, &p, |v| v.add(v)).unwrap());
    }
}

#[test]
fn weights_must_sum_to_one() {
    let err = ProbabilitySpace::new(Weights::Exact(vec![q(1, 2), q(1, 3)])).unwrap_err();
    assert!(matches!(err, Error::InvalidWeights(_)));
    let err = ProbabilitySpace::new(Weights::Exact(vec![q(1, 1), q(0, 1)])).unwrap_err();
    assert!(matches!(err, Error::InvalidWeights(_)));
}

#[test]
fn partition_rejects_overlap_and_gaps() {
    let s = ProbabilitySpace::uniform(3).unwrap();
    let a = Event::from_atoms(&s, &[0, 1]).unwrap();
    let b = Event::from_atoms(&s, &[1, 2]).unwrap();
    assert!(PartitionOfUnity::new(&s, vec![a.clone(), b]).is_err());
    assert!(PartitionOfUnity::new(&s, vec![a]).is_err());
}

#[test]
fn label_concatenation_follows_partition() {
    let s = ProbabilitySpace::uniform(3).unwrap();
    let p = PartitionOfUnity::group_by(&s, |a| a == 1);
    let l1 = L0Label::constant(&s, 3, 1).unwrap();
    let l2 = L0Label::constant(&s, 3, 3).unwrap();
    let spliced = L0Label::concatenate(&[l1, l2], &p).unwrap();
    assert_eq!(spliced.labels(), &[1, 3, 1]);
}

#[test]
fn comparison_events() {
    let s = ProbabilitySpace::uniform(3).unwrap();
    let xi = L0Scalar::new(&s, vec![q(1, 1), q(2, 1), q(3, 1)]).unwrap();
    let eta = L0Scalar::constant(&s, q(2, 1));
    assert_eq!(compare_event(&xi, &eta, Relation::Lt).unwrap(), s.atom(0));
    assert_eq!(compare_event(&xi, &eta, Relation::Eq).unwrap(), s.atom(1));
    assert_eq!(
        compare_event(&xi, &eta, Relation::Le).unwrap(),
        Event::from_atoms(&s, &[0, 1]).unwrap()
    );
    let spliced: L0Scalar<Rational> = concatenate(&[xi.clone(), eta.clone()], &PartitionOfUnity::group_by(&s, |a| a >= 1)).unwrap();
    assert_eq!(spliced.values(), &[q(1, 1), q(2, 1), q(2, 1)]);
}

#[test]
fn bolzano_weierstrass_on_alternating_signs() {
    // atom 0 sees (−1)^n, atom 1 sees 1/(n+1)
    let s = ProbabilitySpace::uniform(2).unwrap();
    let seq: Vec<L0Vector<f64>> = (0..=200)
        .map(|n| L0Vector::new(&s, vec![vec![if n % 2 == 0 { 1.0 } else { -1.0 }], vec![1.0 / (n as f64 + 1.0)]]).unwrap())
        .collect();
    let (sub, limit) = random_subsequence_bw(&seq, &1e-3).unwrap();
    assert!(sub.len() >= 2);
    let idx0 = sub.indices_at(0);
    assert!(idx0.windows(2).all(|w| w[0] < w[1]));
    // a constant subsequence at atom 0
    let first = seq[idx0[0]].row(0)[0];
    assert!(idx0.iter().all(|&i| seq[i].row(0)[0] == first));
    assert!((limit.row(0)[0] - first).abs() <= 1e-3);
    assert!(limit.row(1)[0].abs() <= 1e-2);
}

#[test]
fn empty_sequence_is_an_error() {
    let seq: Vec<L0Vector<f64>> = Vec::new();
    assert_eq!(random_subsequence_bw(&seq, &0.1).unwrap_err(), Error::EmptySequence);
}
