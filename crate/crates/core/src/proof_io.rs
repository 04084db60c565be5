//! Proof serialization and LaTeX export (to be filled in).
