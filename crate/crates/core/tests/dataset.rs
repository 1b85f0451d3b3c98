use std::collections::BTreeSet;

use opb::canonical::{are_equivalent, canonical_key};
use opb::io::{dataset, parse, serialize, Style};
use opb::lattice::is_maximal;

#[test]
fn three_qubit_listing_has_the_displayed_nu() {
    let nu: Vec<usize> = dataset::matrices("n3-classes").iter().map(|m| m.nu()).collect();
    assert_eq!(nu, [7, 7, 6, 6, 6, 6, 6, 5, 5, 5, 5, 5, 5, 4, 4, 4, 3]);
}

#[test]
fn switching_representatives_have_the_displayed_nu() {
    let nu: Vec<usize> = dataset::matrices("n4-switching").iter().map(|m| m.nu()).collect();
    assert_eq!(nu, [15, 14, 14, 13, 13, 13, 12, 12, 12, 12, 12, 11, 11, 11, 10]);
}

#[test]
fn maximal_collections_are_maximal() {
    for coll in ["n3-maximal", "n4-switching", "n4-classes"] {
        for e in dataset::collection(coll) {
            assert!(is_maximal(&e.matrix().unwrap()).unwrap(), "{coll}/{}", e.file);
        }
    }
    let three: Vec<bool> = dataset::matrices("n3-classes")
        .iter()
        .map(|m| is_maximal(m).unwrap())
        .collect();
    assert_eq!(three.iter().filter(|&&b| b).count(), 3);
}

#[test]
fn four_qubit_groups_have_the_listed_sizes() {
    let mut sizes = [0usize; 15];
    for e in dataset::collection("n4-classes") {
        sizes[e.group().unwrap() - 1] += 1;
    }
    assert_eq!(sizes, [6, 2, 4, 1, 4, 3, 2, 2, 2, 2, 1, 1, 1, 1, 1]);
}

#[test]
fn every_representative_is_one_of_the_listed_classes() {
    let listed: Vec<_> = dataset::collection("n4-classes");
    for (g, rep) in dataset::matrices("n4-switching").iter().enumerate() {
        let hits: Vec<_> = listed
            .iter()
            .filter(|e| are_equivalent(rep, &e.matrix().unwrap()).unwrap())
            .collect();
        assert_eq!(hits.len(), 1, "representative {}", g + 1);
        assert_eq!(hits[0].group(), Some(g + 1));
    }
}

#[test]
fn listed_four_qubit_classes_are_pairwise_inequivalent() {
    let keys: BTreeSet<_> = dataset::matrices("n4-classes")
        .iter()
        .map(|m| canonical_key(m).unwrap())
        .collect();
    assert_eq!(keys.len(), 33);
}

#[test]
fn shorthand_expansions() {
    let short = dataset::matrix("examples", "irreducible-shorthand");
    assert_eq!(short.num_rows(), 8);
    let normalized = dataset::matrix("examples", "irreducible-normalized");
    assert!(are_equivalent(&short, &normalized).unwrap());
    let full = dataset::matrix("n3-maximal", "irreducible");
    assert!(are_equivalent(&short, &full).unwrap());
    let first = dataset::matrix("n4-switching", "switching-01");
    assert_eq!(first.num_rows(), 16);
    assert_eq!(first.signature().unwrap().to_string(), "8 | 4^2 | 2^4 | 1^8 ; nu=15");
    let doc = dataset::get("examples", "two-star-rows").unwrap().document().unwrap();
    assert_eq!(doc.expand().unwrap().num_rows(), 4);
}

#[test]
fn full_serialization_roundtrips_every_bundled_matrix() {
    for e in dataset::all() {
        let doc = e.document().unwrap();
        if doc.fragment {
            continue;
        }
        let m = doc.to_matrix().unwrap();
        let back = parse(&serialize(&m, Style::Full, None)).unwrap();
        assert_eq!(back.to_rows(), m.to_rows(), "{}/{}", e.collection, e.file);
        let compact = parse(&serialize(&m, Style::Compact, None)).unwrap();
        assert!(are_equivalent(&compact, &m).unwrap(), "{}/{}", e.collection, e.file);
    }
}

#[test]
fn compact_form_of_the_irreducible_matrix_has_five_rows() {
    let m = dataset::matrix("n3-maximal", "irreducible");
    let text = serialize(&m, Style::Compact, None);
    assert_eq!(text.lines().filter(|l| !l.starts_with('@')).count(), 5);
}
