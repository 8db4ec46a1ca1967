pub mod cli;
pub mod cocycle_pairing;
pub mod gap_certificate;
pub mod lattice_sim;
pub mod linalg;
pub mod model_operator;
pub mod twisted_algebra;
