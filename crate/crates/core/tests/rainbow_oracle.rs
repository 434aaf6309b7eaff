mod common;

use arcade_core::graph::OrderedStructure;
use arcade_core::rainbow::{enumerate_atoms, RainbowSignature};

#[test]
fn brute_force_count_matches_enumeration() {
    let count = common::rainbow_count::count();
    assert_eq!(count, 184_317);
    let sig = RainbowSignature::new(3, OrderedStructure::complete(3), OrderedStructure::chain(2)).unwrap();
    assert_eq!(enumerate_atoms(&sig).unwrap().len(), count);
}
