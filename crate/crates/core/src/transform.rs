//! Proof-tree transformations (to be filled in).
