use crate::error::{Error, Result};

/// Far-field values `(v-, u-)` and `(v+, u+)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndStates {
    pub v_minus: f64,
    pub v_plus: f64,
    pub u_minus: f64,
    pub u_plus: f64,
}

impl EndStates {
    pub fn new(v_minus: f64, v_plus: f64, u_minus: f64, u_plus: f64) -> Result<Self> {
        if !(v_minus > 0.0 && v_plus > 0.0) {
            return Err(Error::Domain(format!(
                "end-state volumes must be positive, got v- = {v_minus}, v+ = {v_plus}"
            )));
        }
        if !(u_minus.is_finite() && u_plus.is_finite()) {
            return Err(Error::Domain("end-state velocities must be finite".into()));
        }
        Ok(Self {
            v_minus,
            v_plus,
            u_minus,
            u_plus,
        })
    }

    /// `|v+ - v-|`
    pub fn volume_jump(&self) -> f64 {
        (self.v_plus - self.v_minus).abs()
    }

    /// `|u+ - u-|`
    pub fn velocity_jump(&self) -> f64 {
        (self.u_plus - self.u_minus).abs()
    }

    pub fn equal_volumes(&self) -> bool {
        self.v_minus == self.v_plus
    }
}

/// Cell averages of `(v, u)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
}

impl FlowState {
    pub fn new(t: f64, v: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if v.len() != u.len() {
            return Err(Error::State(format!(
                "v has {} cells but u has {}",
                v.len(),
                u.len()
            )));
        }
        let state = Self { t, v, u };
        state.check_positive()?;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Index and value of the first non-positive (or non-finite) volume.
    pub fn first_nonpositive(&self) -> Option<(usize, f64)> {
        self.v
            .iter()
            .zip(&self.u)
            .position(|(&v, &u)| !(v > 0.0 && v.is_finite() && u.is_finite()))
            .map(|i| (i, self.v[i]))
    }

    pub fn check_positive(&self) -> Result<()> {
        match self.first_nonpositive() {
            None => Ok(()),
            Some((i, v)) => Err(Error::State(format!(
                "non-positive specific volume {v} in cell {i} at t = {}",
                self.t
            ))),
        }
    }
}
