//! Samples and datasets for the inverse problem.

use alloc::vec::Vec;

use crate::model::{ParamFop, PhiParams, ThetaWeights};

/// One observation: the instance-specific forward model together with the
/// expert's solution for that instance.
#[derive(Debug, Clone)]
pub struct Sample {
    pub model: ParamFop,
    pub expert: Vec<f64>,
}

/// A sequence of observations plus, for synthetic data, the generating
/// ground truth.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub truth: Option<(ThetaWeights, PhiParams)>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Self {
        Dataset { samples, truth: None }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
