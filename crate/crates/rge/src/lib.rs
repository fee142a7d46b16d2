pub mod bench;
pub mod cli;
pub mod constants;
pub mod cv;
pub mod dataset_io;
pub(crate) mod eigen;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod kernels;
pub(crate) mod seeding;
mod simplex;
pub mod spectral;
pub mod svm;
pub mod synthetic;
pub mod transport;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{Dataset, Graph};
pub use spectral::{node_embeddings, normalized_laplacian, NodeEmbeddings};
