//! Helpers shared by unit tests across modules.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::edge_count;
use crate::instance::{PctspInstance, Tour};
use crate::lp::FractionalSolution;
use crate::rational::{rat, Rat};

/// Random feasible fractional point: a convex combination of tour incidence
/// vectors is feasible, and mixing tours that disagree on which vertices
/// they visit makes y genuinely fractional.
pub(crate) fn random_fractional_point(
    inst: &PctspInstance,
    rng: &mut ChaCha8Rng,
) -> FractionalSolution {
    let n = inst.n();
    let weights = [rat(1, 2), rat(1, 4), rat(1, 4)];
    let mut x = vec![Rat::zero(); edge_count(n)];
    let mut y = vec![Rat::zero(); n];
    for w in &weights {
        let mut order: Vec<usize> = (0..n)
            .filter(|&v| v != inst.root() && rng.gen_bool(0.7))
            .collect();
        order.shuffle(rng);
        order.insert(0, inst.root());
        let inc = FractionalSolution::tour_incidence(inst, &Tour { order }).unwrap();
        for (xe, inc_e) in x.iter_mut().zip(&inc.x) {
            *xe += w * inc_e;
        }
        for (yv, inc_v) in y.iter_mut().zip(&inc.y) {
            *yv += w * inc_v;
        }
    }
    FractionalSolution::new(inst, x, y)
}
