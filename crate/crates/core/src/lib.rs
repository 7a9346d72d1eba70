pub mod cache;
pub mod chart;
pub mod cli;
pub mod cpl;
pub mod ext;
pub mod f2;
pub mod graded;
pub mod module;
pub mod render;
pub mod specseq;
pub mod steenrod;
