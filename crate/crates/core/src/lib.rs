pub mod abstraction;
pub mod context;
pub mod dsl;
pub mod error;
pub mod fixtures;
pub mod import;
pub mod model;
pub mod render;
pub mod segment;
pub mod service;
pub mod view;

pub use error::{Error, Result};
