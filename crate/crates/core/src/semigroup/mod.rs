//! Discrete operators on grid domains and semigroup experiments.

pub mod data;
pub mod domain;
pub mod experiments;
pub mod flow;
pub mod operator;
pub mod sparse;
pub mod stepping;

pub use data::InitialData;
pub use domain::{DomainDescriptor, GridDomain, Side};
pub use experiments::{
    bilinear, contractivity, spectral_gap, BilinearConfig, BilinearReport, ContractivityConfig,
    ContractivityReport, ContractivityVerdict, Level, Setup,
};
pub use flow::{flow_trace, heat_flow, FlowTrace, HeatFlowConfig, HeatFlowReport};
pub use operator::{CellLayout, Operator};
pub use stepping::{evolve, Method, StepPolicy};
