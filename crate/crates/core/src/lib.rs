//! Document classification benchmark toolkit.
//!
//! Loads labeled corpora (Reuters-21578 SGML, 20 Newsgroups directory trees,
//! generic TSV), turns documents into L2-normalized TF-IDF vectors, trains a
//! Crammer-Singer multi-class SVM and a one-vs-rest relevance vector machine,
//! and compares them with stratified k-fold cross-validation, micro/macro F1
//! and paired t-tests.
//!
//! The numeric kernel and both trainers are generic over [`Real`]; the
//! aliases below fix the scalar to `f64`, which is what the rest of the
//! toolkit uses.

// `!(x > 0)` guards are written that way so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod eval;
pub mod model;
pub mod numerics;
pub mod preprocess;
pub mod rvm;
mod scalar;
pub mod svm;
pub mod synthetic;

pub use scalar::{fmt_sig17, Real};

pub type Model = model::Model<f64>;
pub type ModelConfig = model::ModelConfig<f64>;

pub type SparseVector = preprocess::SparseVector<f64>;
pub type LabeledVector = preprocess::LabeledVector<f64>;
pub type VectorSet = preprocess::io::VectorSet<f64>;
pub type DenseMatrix = numerics::DenseMatrix<f64>;
pub type CholeskyFactor = numerics::CholeskyFactor<f64>;
pub type SvmConfig = svm::SvmConfig<f64>;
pub type SvmModel = svm::SvmModel<f64>;
pub type RvmConfig = rvm::RvmConfig<f64>;
pub type RvmModel = rvm::RvmModel<f64>;
pub type RvmBinaryModel = rvm::RvmBinaryModel<f64>;

pub type SparseVectorF32 = preprocess::SparseVector<f32>;
pub type SvmModelF32 = svm::SvmModel<f32>;
pub type RvmModelF32 = rvm::RvmModel<f32>;
