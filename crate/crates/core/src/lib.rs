pub mod adi;
pub mod bench;
pub mod cli;
pub mod dense;
pub mod error;
pub mod gmres;
pub mod history;
pub mod kaczmarz;
pub mod matrix_market;
pub mod preconditioner;
pub mod rpcg;
pub mod sparse;
pub mod spectral;
pub mod vector;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use history::ConvergenceHistory;
pub use sparse::SparseMatrix;
