pub mod cli;
pub mod core;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod mincut;
pub mod oracle;
pub mod spectral;
pub mod stability;
