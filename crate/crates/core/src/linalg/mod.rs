//! Dense complex linear algebra kernel.

pub mod blocks;
pub mod eig;
pub mod matrix;
pub mod tensor;

pub use blocks::{pattern_blocks, UnionFind};
pub use eig::{
    exp_antihermitian, hermitian_eig, psd_inv_sqrt, psd_project, psd_sqrt, psd_sqrt_default,
    HermitianEig, CLIP_REL, HERMITIAN_TOL,
};
pub use matrix::{commutator, ComplexMatrix, MatrixJson};
pub use tensor::{kron, partial_trace, unvectorize, vectorize, Factor};
