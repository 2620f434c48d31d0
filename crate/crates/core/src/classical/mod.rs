//! Classical side: discrete measures on the complex plane, exact `W₂²` by
//! network simplex, and semiclassical states built from them.

pub mod measure;
pub mod semiclassical;
pub mod simplex;

pub use measure::DiscreteMeasure;
pub use semiclassical::{husimi_w2, p_mixture_state, p_mixture_state_with_tail};
pub use simplex::{w2_discrete, w2_discrete_with, ClassicalPlan, PivotRule, W2Result};
