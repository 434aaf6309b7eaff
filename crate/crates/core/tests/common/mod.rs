// Each test target uses a different part of this.
#![allow(dead_code)]

pub mod coherence;
pub mod ef_tree;
pub mod rainbow_count;
