//! Feynman clocked computer with a CNOT switch.
//!
//! The register is never stored as a vector: the conservation law confines
//! the cursor (x) register state to one computational subspace per control
//! value, so each branch reduces to an `s - 2` site chain in path
//! coordinates and register labels are attached symbolically.

mod layout;
mod machine;
mod register;

pub use layout::{
    check_subspace_conservation, commutator_with_projector, peres_basis, reduced_chain_hamiltonian,
    Branch, CircuitLayout, PathCoordinateMap, PeresBasis, PeresEntry, RegisterLabel, Spin,
};
pub use machine::{
    run_classical_input, run_superposed_input, superposed_series, truth_table_output, BlockDensity,
    CircuitSeries, CnotMachine, CONDITIONING_FLOOR,
};
pub use register::{
    bell_fidelity, bell_phi_plus, register_reduced_state, von_neumann_entropy, PositionBlocks,
    RegisterState,
};
