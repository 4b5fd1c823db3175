use crate::jet::{Jet, Real};

/// A smooth map on a coordinate patch, written once for any [`Real`] scalar.
///
/// Metric fields return their `n × n` entries row-major; projections return base coordinates.
pub trait CoordinateMap: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_len(&self) -> usize;
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R>;

    /// Whether `x` lies in the coordinate patch.
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
}

/// Object-safe face of [`CoordinateMap`].
pub trait DynMap: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_len(&self) -> usize;
    fn eval_f64(&self, x: &[f64]) -> Vec<f64>;
    fn eval_jet(&self, x: &[Jet]) -> Vec<Jet>;
    fn contains(&self, x: &[f64]) -> bool;
}

impl<T: CoordinateMap> DynMap for T {
    fn input_dim(&self) -> usize {
        CoordinateMap::input_dim(self)
    }
    fn output_len(&self) -> usize {
        CoordinateMap::output_len(self)
    }
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }
    fn eval_jet(&self, x: &[Jet]) -> Vec<Jet> {
        self.eval(x)
    }
    fn contains(&self, x: &[f64]) -> bool {
        CoordinateMap::contains(self, x)
    }
}
