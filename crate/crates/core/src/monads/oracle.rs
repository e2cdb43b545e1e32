use std::sync::Arc;

use crate::dist::Dist;
use crate::error::Result;
use crate::free::FreeModel;
use crate::metric::MetricSpace;

use super::{Elem, MonadInstance};

/// A monad instance on a fixed generator space, viewed as a model of the
/// free algebra for [`compare_with_oracle`](crate::free::compare_with_oracle).
pub struct MonadModel<'a> {
    pub monad: &'a dyn MonadInstance,
    pub space: Arc<MetricSpace>,
}

impl<'a> MonadModel<'a> {
    pub fn new(monad: &'a dyn MonadInstance, space: Arc<MetricSpace>) -> Self {
        MonadModel { monad, space }
    }
}

impl FreeModel for MonadModel<'_> {
    type Elem = Elem;

    fn name(&self) -> String {
        self.monad.name()
    }

    fn generator(&self, x: usize) -> Option<Elem> {
        self.monad.unit(&self.space, x).ok()
    }

    fn operation(&self, symbol: &str, args: &[Elem]) -> Option<Elem> {
        self.monad.operation(symbol, args)
    }

    fn distance(&self, a: &Elem, b: &Elem) -> Result<Dist> {
        self.monad.distance(&self.space, a, b)
    }
}
