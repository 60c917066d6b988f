//! Hermitian `O_F`-lattices: exact field arithmetic, Gram matrices, genus
//! symbols, Jordan splitting, overlattices and coset counts.
//!
//! Conventions: `π² = p`, conjugation `a + bπ ↦ a - bπ`, and the form is
//! `(v, w) = v^T T conj(w)`. A hyperbolic plane of odd scale `a` has Gram
//! `[[0, π^a], [-π^a, 0]]` and unit determinant part `1`, so it contributes
//! `+1` to `χ`.

pub mod felement;
pub mod genus;
pub mod gram;
pub mod jordan;
pub mod lattice;
pub mod mu;

pub use felement::FElement;
pub use genus::{enumerate_symbols, t_max, BlockKind, GenusSymbol, JordanBlock, LatticeStats};
pub use gram::GramMatrix;
pub use jordan::{chi_from_gram, fundamental_invariants, genus_from_gram, jordan_decompose, JordanDecomposition};
pub use lattice::{
    count_isometric_overlattices, overlattice_profile, overlattices, AmbientLattice, NormalFrame, Overlattice,
    OverlatticeConstraint,
};
pub use mu::{mu_counts, MuCounts};
