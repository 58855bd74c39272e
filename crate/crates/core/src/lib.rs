pub mod chamber_search;
pub mod diagrams;
pub mod diophantine;
pub mod lorentz;
pub mod pipeline;
pub mod roots;
pub mod scalars;
