//! Training objective (negated SI-SDR) and the evaluation metric suite.

pub mod loss;
pub mod metrics;

pub use loss::{si_sdr_db_graph, si_sdr_loss_graph};
pub use metrics::{sdr, si_sdr, si_sdr_loss_value, si_sdr_no_demean, CEILING_DB, EPS, FLOOR_DB};
