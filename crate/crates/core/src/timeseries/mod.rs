//! Quarterly series, frames and the data-preparation transforms.

mod frame;
pub mod io;
mod quarter;
mod series;
mod summary;

pub use frame::{align, Frame};
pub use quarter::{parse_quarter, QuarterIndex};
pub use series::{
    diff, forward_fill, interpolate_yearly_to_quarterly, lag, trailing_mean, QuarterlySeries, Unit,
};
pub use summary::{quantile, SummaryStats};
