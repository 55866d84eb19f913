//! (p,q)-form arithmetic over callable coefficient fields.

pub mod field;
pub mod form;
pub mod index;

pub use field::{EvalCtx, Expr, Field, SmoothFn, WeightField};
pub use form::{
    boundary_flux, hessian_action_values, inner, norm_sq, real_expansion, star_table,
    top_factor, Form, FormJet, PreparedForm,
};
pub use index::{binomial, complement, increasing, insert_signed, merge_signed, rank, sort_signed};
