//! Dense complex linear algebra on multi-qudit tensor spaces.

mod eig;
mod matrix;
mod space;

pub use eig::{hermitian_eig, hermitian_eig_tol, max_eig_matfree, Eigen, PowerIteration, PowerScalar};
pub use matrix::{kron_all, ComplexMatrix, C64, I, ONE, ZERO};
pub use space::{embed, partial_trace, partial_transpose, reduce, DensityMatrix, TensorSpace};

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}
