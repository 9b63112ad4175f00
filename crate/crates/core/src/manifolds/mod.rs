//! Concrete manifold families and the descriptor that selects them.

pub mod euclidean;
pub mod so3;
pub mod spd3;
pub mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::Manifold;

/// Serializable description of a manifold, e.g. `{"type": "sphere", "n": 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ManifoldDescriptor {
    Euclidean {
        n: usize,
    },
    Sphere {
        n: usize,
    },
    So3,
    Spd3,
    Product {
        factors: Vec<ManifoldDescriptor>,
    },
    Power {
        base: Box<ManifoldDescriptor>,
        count: usize,
    },
}

impl ManifoldDescriptor {
    /// `(SO(3) x Sym+(3))^faces`, the differential-coordinates shape space.
    pub fn shape_space(faces: usize) -> Self {
        ManifoldDescriptor::Power {
            base: Box::new(ManifoldDescriptor::Product {
                factors: vec![ManifoldDescriptor::So3, ManifoldDescriptor::Spd3],
            }),
            count: faces,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ManifoldDescriptor::Euclidean { n } | ManifoldDescriptor::Sphere { n } if *n == 0 => {
                Err(Error::InvalidDescriptor(
                    "dimension must be at least 1".into(),
                ))
            }
            ManifoldDescriptor::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "product needs at least one factor".into(),
                    ));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            ManifoldDescriptor::Power { base, count } => {
                if *count == 0 {
                    return Err(Error::InvalidDescriptor(
                        "power count must be at least 1".into(),
                    ));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }
}

/// Builds the operation table for a descriptor.
pub fn make_manifold(descriptor: &ManifoldDescriptor) -> Result<Manifold> {
    Manifold::new(descriptor.clone())
}
