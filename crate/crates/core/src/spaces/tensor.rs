//! Tensor products of feature maps on product grids.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{GridSpace, HVector};
use crate::rkhs::{Domain, FeatureMap};

pub const MAX_FACTORS: usize = 3;

/// `⊗φ_i : ∏E_i → ⊗H_i`, sampled on the row-major product of factor grids.
#[derive(Debug, Clone)]
pub struct ProductMap<M> {
    factors: Vec<M>,
    space: Arc<GridSpace>,
}

impl<M: FeatureMap> ProductMap<M> {
    pub fn new(factors: Vec<M>) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_FACTORS {
            return Err(Error::InvalidParameter(format!(
                "product maps take 1..={MAX_FACTORS} factors, got {}",
                factors.len()
            )));
        }
        let spaces: Vec<&GridSpace> = factors.iter().map(|f| f.space().as_ref()).collect();
        let space = GridSpace::product(&spaces)?;
        Ok(Self { factors, space })
    }

    pub fn factors(&self) -> &[M] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }
}

impl<M: FeatureMap> FeatureMap for ProductMap<M> {
    type Point = Vec<M::Point>;

    fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    fn domain(&self) -> Domain {
        Domain::Product(self.factors.iter().map(FeatureMap::domain).collect())
    }

    fn feature(&self, x: &Vec<M::Point>) -> Result<HVector> {
        if x.len() != self.factors.len() {
            return Err(Error::ArityMismatch { expected: self.factors.len(), got: x.len() });
        }
        let parts = self.factors.iter().zip(x).map(|(m, xi)| m.feature(xi)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&HVector> = parts.iter().collect();
        HVector::tensor_on(self.space.clone(), &refs)
    }
}

pub fn tensor_feature<M: FeatureMap>(maps: Vec<M>) -> Result<ProductMap<M>> {
    ProductMap::new(maps)
}

/// A factor kernel usable by [`tensor_kernel`].
pub type KernelFn<'a, P> = &'a dyn Fn(&P, &P) -> Complex64;

/// `∏ k_i(x_i, y_i)`, with no quadrature involved.
pub fn tensor_kernel<P>(kernels: &[KernelFn<'_, P>], xs: &[P], ys: &[P]) -> Result<Complex64> {
    for got in [xs.len(), ys.len()] {
        if got != kernels.len() {
            return Err(Error::ArityMismatch { expected: kernels.len(), got });
        }
    }
    Ok(kernels.iter().zip(xs.iter().zip(ys)).map(|(k, (x, y))| k(x, y)).product())
}
