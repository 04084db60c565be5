//! Axiomatic proofs and their translation (to be filled in).
