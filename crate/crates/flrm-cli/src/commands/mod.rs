pub mod ci;
pub mod diagnose;
pub mod fit;
pub mod simulate;
