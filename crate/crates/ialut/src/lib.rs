//! Files, parallel video processing and the command-line front end for
//! intensity-aware lookup tables. The numerical core lives in `ialut-core`.

pub mod cli;
pub mod error;
pub mod frames;
pub mod intensity;
pub mod lutfile;
pub mod pipeline;
mod seqdir;

pub use error::{Error, Result};
pub use seqdir::{DIMS_FILE, frame_name};
