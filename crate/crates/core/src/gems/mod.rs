//! Number-theory side results: card shuffles, Beatty spectra and Wythoff's
//! game, and the partition function.

pub mod beatty;
pub mod partitions;
pub mod shuffle;
