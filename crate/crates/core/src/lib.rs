//! Desk-scale cross-lingual transfer pipeline.
//!
//! The crate wires together three mechanisms and the machinery to study them:
//!
//! * **Code-switching augmentation** — replace a fraction of the words in a
//!   dependency-parsed sentence with dictionary translations while keeping the
//!   tree intact ([`codeswitch`], backed by MUSE-format lexicons in
//!   [`lexicon`]).
//! * **A dependency-tree graph attention network** — attention restricted by
//!   tree distance, no feed-forward sub-layers, residuals, or positional
//!   representations ([`syntax`], [`gat`]).
//! * **Attention-bias fusion** — the GAT output is projected into the query
//!   and key matrices of every layer of a small transformer encoder
//!   ([`encoder`]).
//!
//! Everything runs in 64-bit floats with hand-written backward passes so that
//! gradients can be verified against central finite differences
//! ([`train::grad_check`]). [`synth`] generates deterministic toy multilingual
//! corpora (CoNLL-U plus MUSE lexicons) so the whole pipeline is exercisable
//! without external data.

pub mod codeswitch;
pub mod conllu;
pub mod encoder;
pub mod eval;
pub mod gat;
pub mod lexicon;
pub mod model;
pub mod rng;
pub mod synth;
pub mod syntax;
pub mod tensor;
pub mod train;

pub use conllu::{parse_conllu, serialize_conllu, validate_tree, DependencyTree, Sentence, Token};
pub use tensor::Mat;
