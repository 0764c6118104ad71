//! Plug-in standard errors, Wald intervals and the resampling bootstrap.

mod bootstrap;
mod se;

pub use bootstrap::{bootstrap_se, BootstrapResult};
pub use se::{
    confidence_interval, estimate, plugin_se, se_ingredients, variance_components, Estimate, IntervalResult,
    SeIngredients, SeVariant,
};
