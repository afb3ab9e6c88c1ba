//! Particle swarm state and box-bound handling.

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array1, Array2, Array3, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::benchmarks::Problem;
use crate::error::{PaoError, Result};
use crate::record::Evaluator;

/// State index of the position component in the last tensor axis.
pub const POS: usize = 0;
/// State index of the velocity component in the last tensor axis.
pub const VEL: usize = 1;

/// N particles × D dimensions × (position, velocity), plus best-so-far archives.
#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub state: Array3<f64>,
    pub fitness: Array1<f64>,
    pub local_best_pos: Array2<f64>,
    pub local_best_fit: Array1<f64>,
    pub global_best_pos: Array1<f64>,
    pub global_best_fit: f64,
    pub generation: usize,
}

impl Swarm {
    /// Builds a swarm from an initial state, evaluating every particle once.
    pub fn from_state(state: Array3<f64>, eval: &mut Evaluator<'_>) -> Result<Self> {
        let (n, d, _) = state.dim();
        let mut swarm = Swarm {
            fitness: Array1::zeros(n),
            local_best_pos: state.slice(s![.., .., POS]).to_owned(),
            local_best_fit: Array1::from_elem(n, f64::INFINITY),
            global_best_pos: Array1::zeros(d),
            global_best_fit: f64::INFINITY,
            generation: 0,
            state,
        };
        swarm.evaluate(eval)?;
        Ok(swarm)
    }

    pub fn len(&self) -> usize {
        self.state.dim().0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.state.dim().1
    }

    pub fn positions(&self) -> ArrayView2<'_, f64> {
        self.state.slice(s![.., .., POS])
    }

    pub fn velocities(&self) -> ArrayView2<'_, f64> {
        self.state.slice(s![.., .., VEL])
    }

    pub fn position(&self, i: usize) -> ArrayView1<'_, f64> {
        self.state.slice(s![i, .., POS])
    }

    pub fn mean_position(&self) -> Array1<f64> {
        self.positions()
            .mean_axis(Axis(0))
            .expect("swarm has at least one particle")
    }

    /// Evaluates current positions and updates the archives with strict improvement.
    pub fn evaluate(&mut self, eval: &mut Evaluator<'_>) -> Result<()> {
        let mut buf = vec![0.0; self.dim()];
        for i in 0..self.len() {
            for (b, v) in buf.iter_mut().zip(self.state.slice(s![i, .., POS])) {
                *b = *v;
            }
            let f = eval.eval(&buf)?;
            self.fitness[i] = f;
            if f < self.local_best_fit[i] {
                self.local_best_fit[i] = f;
                self.local_best_pos
                    .row_mut(i)
                    .assign(&self.state.slice(s![i, .., POS]));
            }
        }
        for i in 0..self.len() {
            if self.local_best_fit[i] < self.global_best_fit {
                self.global_best_fit = self.local_best_fit[i];
                self.global_best_pos.assign(&self.local_best_pos.row(i));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsPolicy {
    None,
    #[default]
    Clip,
    Reflect,
}

impl fmt::Display for BoundsPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundsPolicy::None => "none",
            BoundsPolicy::Clip => "clip",
            BoundsPolicy::Reflect => "reflect",
        })
    }
}

impl FromStr for BoundsPolicy {
    type Err = PaoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(BoundsPolicy::None),
            "clip" => Ok(BoundsPolicy::Clip),
            "reflect" => Ok(BoundsPolicy::Reflect),
            other => Err(PaoError::InvalidConfig(format!(
                "unknown bounds policy `{other}`"
            ))),
        }
    }
}

impl BoundsPolicy {
    /// Applies the policy to one coordinate, returning the new position and whether the
    /// velocity component should be negated.
    pub fn apply(self, x: f64, lo: f64, hi: f64) -> (f64, bool) {
        match self {
            BoundsPolicy::None => (x, false),
            BoundsPolicy::Clip => (x.clamp(lo, hi), false),
            BoundsPolicy::Reflect => {
                if x < lo {
                    ((2.0 * lo - x).min(hi), true)
                } else if x > hi {
                    ((2.0 * hi - x).max(lo), true)
                } else {
                    (x, false)
                }
            }
        }
    }

    /// Applies the policy to every position in a swarm state tensor.
    pub fn enforce(self, state: &mut Array3<f64>, problem: &Problem) {
        if self == BoundsPolicy::None {
            return;
        }
        for mut particle in state.outer_iter_mut() {
            for (j, mut elem) in particle.outer_iter_mut().enumerate() {
                let (x, flip) = self.apply(elem[POS], problem.lower[j], problem.upper[j]);
                elem[POS] = x;
                if flip {
                    elem[VEL] = -elem[VEL];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::make_problem;
    use ndarray::array;

    #[test]
    fn bounds_policies() {
        assert_eq!(BoundsPolicy::None.apply(7.0, -1.0, 1.0), (7.0, false));
        assert_eq!(BoundsPolicy::Clip.apply(7.0, -1.0, 1.0), (1.0, false));
        assert_eq!(BoundsPolicy::Clip.apply(-7.0, -1.0, 1.0), (-1.0, false));
        assert_eq!(BoundsPolicy::Reflect.apply(1.5, -1.0, 1.0), (0.5, true));
        assert_eq!(BoundsPolicy::Reflect.apply(-1.25, -1.0, 1.0), (-0.75, true));
        // overshoot beyond a full width lands on the far bound
        assert_eq!(BoundsPolicy::Reflect.apply(9.0, -1.0, 1.0), (-1.0, true));
        assert_eq!(BoundsPolicy::Reflect.apply(0.5, -1.0, 1.0), (0.5, false));
        assert_eq!(
            "REFLECT".parse::<BoundsPolicy>().unwrap(),
            BoundsPolicy::Reflect
        );
        assert!("wrap".parse::<BoundsPolicy>().is_err());
    }

    #[test]
    fn reflect_negates_velocity_and_clip_keeps_it() {
        let p = make_problem("powersum", 1).unwrap();
        let mut st = Array3::from_shape_vec((1, 1, 2), vec![1.5, 3.0]).unwrap();
        BoundsPolicy::Clip.enforce(&mut st, &p);
        assert_eq!(st.as_slice().unwrap(), &[1.0, 3.0]);
        let mut st = Array3::from_shape_vec((1, 1, 2), vec![1.5, 3.0]).unwrap();
        BoundsPolicy::Reflect.enforce(&mut st, &p);
        assert_eq!(st.as_slice().unwrap(), &[0.5, -3.0]);
    }

    #[test]
    fn archives_seeded_from_first_evaluation() {
        let p = make_problem("dejong", 2).unwrap();
        let mut e = Evaluator::new(&p);
        let mut st = Array3::zeros((3, 2, 2));
        st.slice_mut(s![.., .., POS])
            .assign(&array![[1.0, 1.0], [0.5, 0.0], [0.5, 0.0]]);
        let sw = Swarm::from_state(st, &mut e).unwrap();
        assert_eq!(e.count(), 3);
        assert_eq!(sw.local_best_pos, sw.positions());
        assert_eq!(sw.global_best_fit, 0.25);
        assert_eq!(sw.global_best_pos, array![0.5, 0.0]);
        assert_eq!(sw.mean_position(), array![2.0 / 3.0, 1.0 / 3.0]);
    }
}
