//! Per-vertex diagonal parameters: bias factors `B`, delay factors `T` and
//! replicating factors `Z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn validate(name: &'static str, values: &[f64], floor: f64, strict: bool) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        let ok = value.is_finite() && if strict { value > floor } else { value >= floor };
        if !ok {
            let reason = match (strict, floor == 0.0) {
                (true, true) => "must be positive and finite",
                _ => "must be at least 1",
            };
            return Err(Error::InvalidParameter {
                name,
                index,
                value,
                reason,
            });
        }
    }
    Ok(())
}

macro_rules! positive_vector {
    ($(#[$meta:meta])* $name:ident, $label:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(values: Vec<f64>) -> Result<Self> {
                validate($label, &values, 0.0, true)?;
                Ok($name(values))
            }

            pub fn ones(n: usize) -> Self {
                $name(vec![1.0; n])
            }

            pub fn uniform(n: usize, value: f64) -> Result<Self> {
                Self::new(vec![value; n])
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub(crate) fn check_len(&self, n: usize) -> Result<&[f64]> {
                crate::linalg::check_len(&self.0, n)?;
                Ok(&self.0)
            }
        }
    };
}

positive_vector!(
    /// Target bias factors `b_v > 0` of a biased random walk.
    Bias,
    "bias"
);

positive_vector!(
    /// Replicating factors `z_v > 0`; `z > 1` expands, `z < 1` shrinks.
    Replication,
    "replicate"
);

/// Floor applied to delay factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayFloor {
    /// `tau >= 1`, the usual normalization.
    #[default]
    AtLeastOne,
    /// Any `tau > 0`, as needed when a Z-matrix is decomposed with `T = delta I`.
    Positive,
}

/// Per-vertex delay factors (inverse clock rates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delays {
    values: Vec<f64>,
    floor: DelayFloor,
}

impl Delays {
    /// Delays with the default `tau >= 1` floor.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_floor(values, DelayFloor::AtLeastOne)
    }

    /// Delays that only need to be positive.
    pub fn relaxed(values: Vec<f64>) -> Result<Self> {
        Self::with_floor(values, DelayFloor::Positive)
    }

    pub fn with_floor(values: Vec<f64>, floor: DelayFloor) -> Result<Self> {
        match floor {
            DelayFloor::AtLeastOne => validate("delay", &values, 1.0, false)?,
            DelayFloor::Positive => validate("delay", &values, 0.0, true)?,
        }
        Ok(Delays { values, floor })
    }

    pub fn ones(n: usize) -> Self {
        Delays {
            values: vec![1.0; n],
            floor: DelayFloor::AtLeastOne,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn floor(&self) -> DelayFloor {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fails unless every entry is at least 1, whatever floor it was built with.
    pub fn require_at_least_one(&self) -> Result<()> {
        validate("delay", &self.values, 1.0, false)
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<&[f64]> {
        crate::linalg::check_len(&self.values, n)?;
        Ok(&self.values)
    }
}

/// The three diagonal families bundled together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalParams {
    pub bias: Bias,
    pub delay: Delays,
    pub replicate: Replication,
}

impl DiagonalParams {
    pub fn identity(n: usize) -> Self {
        DiagonalParams {
            bias: Bias::ones(n),
            delay: Delays::ones(n),
            replicate: Replication::ones(n),
        }
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        self.bias.check_len(n)?;
        self.delay.check_len(n)?;
        self.replicate.check_len(n)?;
        Ok(())
    }
}
