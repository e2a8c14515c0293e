pub mod approx;
pub mod bridging;
pub mod dist_prod;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod paths;
pub mod weight;

pub use error::{ApspError, Result};
pub use weight::Weight;
