//! Complex special functions: gamma family, hypergeometric series and their
//! continuation, Macdonald K of complex order, Whittaker W.

pub mod bessel;
pub mod gamma;
pub mod hyper;
pub mod whittaker;

pub use bessel::macdonald_k;
pub use gamma::{beta, gamma, log_gamma, pochhammer, rgamma};
pub use hyper::{hyp1f1, hyp2f1, hyp2f1_continued, hyp_pfq, hyp_pfq_with, ContinuationPath, TruncationPolicy};
pub use whittaker::whittaker_w;
