mod common;

use std::collections::BTreeSet;

use common::*;
use nilsplit::amalgam::{AmalgamSpec, NormalForm, Side};
use nilsplit::dynamics::{self, StabilizedAxis};
use nilsplit::exec::Execution;
use nilsplit::groups::FiniteGroup;
use nilsplit::nil_index::{
    self, axes_conjugate, check_adapted, enumerate_vc_classes, enumerate_vc_classes_with, NilIndexError,
    VcClass, VcKind, Witness,
};

/// Embeds `Z/n` into `g` by sending 1 to the least element of order `n`.
fn cyclic_embedding(g: &FiniteGroup, n: usize) -> Vec<usize> {
    let x = (0..g.order()).find(|&x| g.element_order(x) == n).unwrap();
    let mut map = vec![0];
    for k in 1..n {
        map.push(g.mul(map[k - 1], x));
    }
    map
}

fn s3() -> FiniteGroup {
    FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
}

/// Extra amalgams beyond the shipped samples.
fn extras() -> Vec<AmalgamSpec> {
    let s3 = s3();
    let z3_in_s3 = cyclic_embedding(&s3, 3);
    let z2_in_s3 = cyclic_embedding(&s3, 2);
    vec![
        AmalgamSpec::new("S3 *_Z/3 Z/6", s3.clone(), FiniteGroup::cyclic(6), FiniteGroup::cyclic(3), &z3_in_s3, &[0, 2, 4])
            .unwrap(),
        AmalgamSpec::new("S3 *_Z/2 Z/4", s3.clone(), FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), &z2_in_s3, &[0, 2])
            .unwrap(),
        AmalgamSpec::new("Z/2 * S3", FiniteGroup::cyclic(2), s3, FiniteGroup::cyclic(1), &[0], &[0]).unwrap(),
    ]
}

fn oracle_class_count(spec: &AmalgamSpec, bound: usize) -> usize {
    let oracle = Oracle::new(spec);
    let ball = oracle.ball(6);
    let hyperbolic: Vec<Elt> = oracle
        .elements_up_to(bound)
        .into_iter()
        .filter(|g| oracle.min_displacement(g, &ball) > 0)
        .collect();
    let conjugators = oracle.elements_up_to(6);
    oracle.commensurability_classes(&hyperbolic, &conjugators, 6)
}

#[test]
fn class_counts_match_pairwise_conjugacy_oracle() {
    for spec in samples().into_iter().chain(extras()) {
        let classes = enumerate_vc_classes(&spec, 4).unwrap();
        assert_eq!(classes.len(), oracle_class_count(&spec, 4), "{}", spec.name);
    }
}

#[test]
fn enumeration_is_independent_of_execution() {
    for spec in samples().into_iter().chain(extras()) {
        let par = enumerate_vc_classes_with(&spec, 4, Execution::Parallel).unwrap();
        let seq = enumerate_vc_classes_with(&spec, 4, Execution::Sequential).unwrap();
        assert_eq!(par, seq);
    }
}

#[test]
fn adapted_family_axioms_hold() {
    for spec in samples().into_iter().chain(extras()) {
        let classes = enumerate_vc_classes(&spec, 4).unwrap();
        let report = check_adapted(&spec, &classes, 4, 4).unwrap();
        assert!(report.all_passed(), "{}: {report:?}", spec.name);
    }
}

#[test]
fn injected_duplicate_is_caught() {
    for spec in samples() {
        let mut classes = enumerate_vc_classes(&spec, 4).unwrap();
        let g = classes[0].rep.axis.translator.clone();
        let x = spec.from_factor(Side::Two, spec.factor(Side::Two).syllable_reps()[0]);
        let dup = VcClass::from_translator(&spec, &spec.conjugate(&g, &x)).unwrap();
        classes.push(dup);
        let report = check_adapted(&spec, &classes, 4, 4).unwrap();
        let two = report.axiom(2);
        assert!(!two.passed);
        match &two.witness {
            Some(Witness::ConjugateRepresentatives {
                first,
                second,
                conjugator,
            }) => {
                let (a, b) = (&classes[*first].rep, &classes[*second].rep);
                // The witness carries the first axis onto the second.
                let y = spec.conjugate(&a.axis.translator, conjugator);
                assert!(b.translates_along(&spec, &y, a.axis.translation_length()));
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(!report.axiom(1).passed);
    }
}

#[test]
fn classes_are_closed_under_conjugation_and_powers() {
    for spec in samples().into_iter().chain(extras()) {
        let classes = enumerate_vc_classes(&spec, 4).unwrap();
        for class in &classes {
            let g = &class.rep.axis.translator;
            for x in spec.normal_forms_up_to(2) {
                let moved = StabilizedAxis::of(&spec, &spec.conjugate(&spec.pow(g, 2), &x)).unwrap();
                let hits: Vec<_> = classes
                    .iter()
                    .filter(|c| axes_conjugate(&spec, &moved, &c.rep).is_some())
                    .collect();
                assert_eq!(hits.len(), 1);
                assert_eq!(hits[0], class);
            }
        }
    }
}

#[test]
fn structure_of_each_class() {
    for spec in samples().into_iter().chain(extras()) {
        for class in enumerate_vc_classes(&spec, 4).unwrap() {
            assert!(class.constraints.all_hold(), "{}: {class:?}", spec.name);
            let fixer: BTreeSet<NormalForm> = class.fixer().iter().cloned().collect();
            let t = &class.rep.stab.t_min;
            let twist = class.twist();
            // alpha(f) = t f t^-1 in the numbering of the fixer.
            for (i, f) in class.fixer().iter().enumerate() {
                assert_eq!(class.fixer()[twist.apply(i)], spec.conjugate(f, t));
            }
            if let VcKind::DInfinity { a, b, c, reflection, .. } = &class.kind {
                assert_eq!(c.iter().cloned().collect::<BTreeSet<_>>(), fixer);
                assert_eq!((a.len(), b.len()), (2 * c.len(), 2 * c.len()));
                let g = &class.rep.axis.translator;
                let flipped = spec.multiply(&spec.conjugate(g, reflection), g);
                assert!(fixer.contains(&flipped));
                // Both vertex groups are finite subgroups.
                for set in [a, b] {
                    let s: BTreeSet<_> = set.iter().cloned().collect();
                    assert!(s.iter().all(|x| s.iter().all(|y| s.contains(&spec.multiply(x, y)))));
                }
            }
        }
    }
}

#[test]
fn twisted_example_has_nontrivial_alpha() {
    // In S3 *_Z/3 Z/6 the tree is a line, so there is a single class; the
    // transposition in S3 inverts Z/3 while Z/6 centralizes it.
    let spec = &extras()[0];
    let classes = enumerate_vc_classes(spec, 4).unwrap();
    assert_eq!(classes.len(), 1);
    assert!(classes[0].is_dihedral());
    assert_eq!(classes[0].fixer_fingerprint().name, "Z/3");
    assert_eq!(classes[0].twist().order(), 2);
    let report = nil_index::splitting_report(spec, 4).unwrap();
    assert!(report.truncation.complete);
    let v_prime = report.summands[0].v_prime_label.as_deref().unwrap();
    assert!(v_prime.starts_with("NK(R[Z/3], alpha["), "{v_prime}");
}

#[test]
fn bounds_below_two_are_rejected() {
    let spec = sample("psl2z");
    assert_eq!(
        enumerate_vc_classes(&spec, 1).unwrap_err(),
        NilIndexError::BoundTooSmall { bound: 1 }
    );
    assert!(dynamics::classify_element(&spec, &word(&spec, "g1:1 g2:1")).unwrap().is_hyperbolic());
}

#[test]
fn labels() {
    let spec = sample("sl2z");
    let report = nil_index::splitting_report(&spec, 4).unwrap();
    assert_eq!(report.left_label, "Nil^W(R[Z/2]; R[Z/4 − Z/2], R[Z/6 − Z/2])");
    assert!(!report.truncation.complete);
    for s in &report.summands {
        match s.class.kind {
            VcKind::Semidirect { .. } => {
                assert_eq!(s.nil_label, "2 × NK(R[Z/2], id)");
                assert!(s.v_prime_label.is_none());
            }
            VcKind::DInfinity { .. } => {
                assert_eq!(s.nil_label, "Nil^W(R[Z/2]; R[Z/4 − Z/2], R[Z/4 − Z/2])");
                assert_eq!(s.v_prime_label.as_deref(), Some("NK(R[Z/2], id)"));
            }
        }
    }
}

#[test]
fn class_counts_match_oracle_at_bound_six() {
    for spec in samples() {
        let classes = enumerate_vc_classes(&spec, 6).unwrap();
        assert_eq!(classes.len(), oracle_class_count(&spec, 6), "{}", spec.name);
        assert!(check_adapted(&spec, &classes, 6, 4).unwrap().all_passed(), "{}", spec.name);
    }
}
