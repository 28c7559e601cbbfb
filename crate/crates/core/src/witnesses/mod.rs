//! Finite-stage versions of the constructions: each returns a stem and the
//! inequalities it was built to satisfy.

mod brute;
mod certificate;
mod dense_open;
mod growth;
mod limsup;
mod nowhere;
mod rearrange;

pub use brute::{rearrangement_prefix_bound, uniform_bound_bruteforce, Alphabet, MAX_PATTERN_LEN, MAX_PERMUTATION_LEN};
pub use certificate::{
    verify_certificate, verify_checkpoints, CertificateFault, Checkpoint, Construction, IntervalClaim, Quantity,
    Relation, WitnessCertificate, NORM_TOLERANCE,
};
pub use dense_open::{dense_open_witness_am, dense_open_witness_bm, dense_open_witness_cm, small_norm_block};
pub use growth::{
    doubling_chain, grow_unbounded_subseries, observe_growth, GrowthOracle, Requirement, Strategy, UnboundedRearr,
    UnboundedSubseq, EXHAUSTIVE_WINDOW,
};
pub use limsup::limsup_subseries;
pub use nowhere::{nowhere_dense_witness_rearr, nowhere_dense_witness_subseq};
pub use rearrange::subseries_to_rearrangement;
