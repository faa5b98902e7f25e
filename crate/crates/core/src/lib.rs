pub mod bundle_file;
pub mod bundles;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod field;
pub mod hom_algebra;
pub mod linalg;
pub mod module_rep;
pub mod poly;
