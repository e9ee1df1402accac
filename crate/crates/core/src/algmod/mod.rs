//! Algebras, modules, tensor products over an algebra and right-linear homs.

mod algebra;
mod hom;
mod module;
mod tensor;

pub use algebra::Algebra;
pub use hom::{adjunction_iso, hom_right_a, Adjunction, GenValues, HomSpace};
pub use module::{direct_sum, scale_cols, Action, LinMap, Linearity, ModuleSpace, Submodule};
pub use tensor::{
    tensor_over_a, tensor_power_over_a, tensor_power_single_pass, ModuleTower, TensorAlgebra, TensorPower,
    TensorProduct,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not associative at basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit fails on basis element {0}")]
    NotUnital(usize),
    #[error("missing {0}")]
    MissingAction(String),
    #[error("{side} action is not unital on basis {basis}")]
    ActionNotUnital { side: &'static str, basis: usize },
    #[error("{side} action is not associative for e_{a} e_{b} on basis {basis}")]
    ActionNotAssociative { side: &'static str, a: usize, b: usize, basis: usize },
    #[error("left and right actions do not commute for e_{a}, e_{b} on basis {basis}")]
    ActionsDoNotCommute { a: usize, b: usize, basis: usize },
    #[error("map is not {side} linear: basis {basis}, algebra element {alg}")]
    NotLinear { side: &'static str, basis: usize, alg: usize },
    #[error("span is not closed under the action: basis {basis}, algebra element {alg}")]
    NotClosed { basis: usize, alg: usize },
    #[error("adjunction check failed: {0}")]
    AdjunctionFailed(String),
}
