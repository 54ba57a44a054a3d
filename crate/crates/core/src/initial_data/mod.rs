//! Explicit initial data: the odd-odd bubble, smoothed Bahouri-Chemin data,
//! dyadic bubble sums and the small-scale profiles.

mod bahouri_chemin;
mod bubbles;
pub mod profiles;
mod small_scale;

pub use bahouri_chemin::{cut_sign_pattern, mollify, smoothed_bahouri_chemin};
pub use bubbles::{
    bourgain_li_bubbles, bourgain_li_bubbles_with, bubble_term, phi0, single_bubble, single_bubble_with,
    BubbleCoefficients, PolarRect, RectangleLadder,
};
pub use profiles::BubbleProfile;
pub use small_scale::{linear_cutoff, linear_cutoff_slope, small_scale_profile, ProfileShape, SmallScaleMode};
