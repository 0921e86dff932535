pub mod cli;
pub mod gridmetrics;
pub mod pipeline;
pub mod stats;
pub mod timeseries;
pub mod vmd;
