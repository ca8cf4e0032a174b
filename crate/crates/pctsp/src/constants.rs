//! Analysis-side functions behind the approximation guarantee: the basic
//! factor α(δ), the prune-threshold distribution, the refined threshold
//! density with its normalizer ν, the cycle-length factor g, the penalty
//! factor h with a certified grid maximization, and an exact empirical
//! check of the two expectation lemmas on concrete pipeline runs.
//!
//! Everything here is floating point with stated tolerances; only
//! `empirical_lemma_check` works in exact rationals, because it evaluates
//! finite expectations over a decomposition rather than integrals with
//! fractional-power densities.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::decompose::{DecompositionLevels, RootedTree};
use crate::error::{Error, Result};
use crate::instance::PctspInstance;
use crate::parity::{core_layers, matching_cost, min_cost_matching, odd_vertices};
use crate::rational::{rat_int, Rat};

/// Reference parameters: κ₀ and κ used for the headline guarantee.
pub const REFERENCE_KAPPA0: f64 = 0.3724;
pub const REFERENCE_KAPPA: f64 = 0.9971;
/// The guarantee gate: max{g, h} at the reference parameters must stay
/// strictly below this.
pub const GUARANTEE_TARGET: f64 = 1.599;

/// Grid step for the inner maximization in `h`.
const H_GRID_STEP: f64 = 1e-5;

/// Parameters of the randomized threshold scheme. The split threshold δ is
/// drawn from a density supported on [κ₀, κ], then the prune threshold γ
/// from a conditional distribution on [δ, κ].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuaranteeParams {
    pub delta: f64,
    pub kappa0: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Normalizer of the split-threshold density on [κ₀, κ].
    pub nu: f64,
}

impl GuaranteeParams {
    pub fn new(delta: f64, kappa0: f64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(0.0 <= kappa0 && kappa0 <= delta && delta <= gamma && gamma <= kappa && kappa <= 1.0)
        {
            return Err(Error::Domain(format!(
                "need 0 <= kappa0 <= delta <= gamma <= kappa <= 1, \
                 got kappa0={kappa0}, delta={delta}, gamma={gamma}, kappa={kappa}"
            )));
        }
        if kappa0 >= kappa {
            return Err(Error::Domain(
                "density support [kappa0, kappa] must have positive length".into(),
            ));
        }
        Ok(GuaranteeParams {
            delta,
            kappa0,
            kappa,
            gamma,
            nu: density_normalizer(kappa, kappa0)?,
        })
    }

    /// Density of the split threshold at d: ν (3 - d)(κ - d)^2.2.
    pub fn density(&self, d: f64) -> f64 {
        if d < self.kappa0 || d > self.kappa {
            0.0
        } else {
            self.nu * (3.0 - d) * (self.kappa - d).max(0.0).powf(2.2)
        }
    }
}

/// max{(5 - 2δ)/(3 - δ), (3 - δ)/(2 - δ), 1/(1 - δ)}: the guarantee of the
/// pipeline with a fixed split threshold δ and prune thresholds on [δ, 1].
pub fn alpha_of_delta(delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta {delta} outside [0, 1)")));
    }
    let a = (5.0 - 2.0 * delta) / (3.0 - delta);
    let b = (3.0 - delta) / (2.0 - delta);
    let c = 1.0 / (1.0 - delta);
    Ok(a.max(b).max(c))
}

/// P[γ ≤ t] = (3 - δ - κ)/(3 - δ - t) for t in [δ, κ]; the distribution has
/// an atom at δ and reaches 1 at t = κ.
pub fn gamma_cdf(t: f64, delta: f64, kappa: f64) -> Result<f64> {
    if !(0.0 <= delta && delta <= t && t <= kappa && kappa <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 <= delta <= t <= kappa <= 1, got t={t}, delta={delta}, kappa={kappa}"
        )));
    }
    Ok((3.0 - delta - kappa) / (3.0 - delta - t))
}

/// Exact twin of `gamma_cdf`, clamped to [0, 1] outside the support.
pub fn gamma_cdf_exact(t: &Rat, delta: &Rat, kappa: &Rat) -> Result<Rat> {
    if delta > kappa || !delta.is_positive() || kappa > &Rat::one() {
        return Err(Error::Domain(format!(
            "need 0 < delta <= kappa <= 1, got delta={delta}, kappa={kappa}"
        )));
    }
    if t < delta {
        return Ok(Rat::zero());
    }
    if t >= kappa {
        return Ok(Rat::one());
    }
    let three = rat_int(3);
    Ok((&three - delta - kappa) / (three - delta - t))
}

/// ν = ((3 - κ)(κ - κ₀)^3.2 / 3.2 + (κ - κ₀)^4.2 / 4.2)^(-1).
pub fn density_normalizer(kappa: f64, kappa0: f64) -> Result<f64> {
    check_kappa_pair(kappa, kappa0)?;
    let w = kappa - kappa0;
    Ok(1.0 / ((3.0 - kappa) * w.powf(3.2) / 3.2 + w.powf(4.2) / 4.2))
}

fn check_kappa_pair(kappa: f64, kappa0: f64) -> Result<()> {
    if !(0.0 <= kappa0 && kappa0 < kappa && kappa <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 <= kappa0 < kappa <= 1, got kappa0={kappa0}, kappa={kappa}"
        )));
    }
    Ok(())
}

/// Expected-cycle-length factor: averaging the per-threshold cycle bound
/// (7 - 2δ - 2κ)/(3 - δ) against the density gives
/// g = ν ((7 - 4κ)(κ - κ₀)^3.2 / 3.2 + 2 (κ - κ₀)^4.2 / 4.2).
pub fn g(kappa: f64, kappa0: f64) -> Result<f64> {
    let nu = density_normalizer(kappa, kappa0)?;
    let w = kappa - kappa0;
    Ok(nu * ((7.0 - 4.0 * kappa) * w.powf(3.2) / 3.2 + 2.0 * w.powf(4.2) / 4.2))
}

/// φ(d) = (3 - d - κ)(3 - d)/(3 - d - y), the integrand factor whose
/// concavity in d justifies a chord lower bound.
pub fn phi(d: f64, y: f64, kappa: f64) -> f64 {
    (3.0 - d - kappa) * (3.0 - d) / (3.0 - d - y)
}

/// Per-vertex expected-penalty factor at prize value y:
/// h_y = 1 - (y ν / W)((φ(κ₀) - φ(κ)) (W^4.2 - (κ-y)^4.2)/4.2
///                   + φ(κ) W (W^3.2 - (κ-y)^3.2)/3.2), W = κ - κ₀.
pub fn h_y(y: f64, kappa: f64, kappa0: f64) -> Result<f64> {
    check_kappa_pair(kappa, kappa0)?;
    if !(kappa0 <= y && y <= kappa) || kappa >= 1.0 {
        return Err(Error::Domain(format!(
            "need kappa0 <= y <= kappa < 1, got y={y}, kappa0={kappa0}, kappa={kappa}"
        )));
    }
    let nu = density_normalizer(kappa, kappa0)?;
    let w = kappa - kappa0;
    let r = (kappa - y).max(0.0);
    let a = (w.powf(4.2) - r.powf(4.2)) / 4.2;
    let b = (w.powf(3.2) - r.powf(3.2)) / 3.2;
    let s = (phi(kappa0, y, kappa) - phi(kappa, y, kappa)) * a + phi(kappa, y, kappa) * w * b;
    Ok(1.0 - y * nu / w * s)
}

/// Result of the certified maximization in `h`.
#[derive(Debug, Clone, Copy)]
pub struct HBound {
    /// max{1/(1-κ₀), max_y h_y/(1-y)} over the evaluation grid.
    pub value: f64,
    /// An upper bound on the true maximum, certified per grid cell by an
    /// interval bound on the derivative of y ↦ h_y/(1-y).
    pub certified_upper: f64,
    /// Grid point attaining the maximum.
    pub argmax: f64,
}

/// h = max{1/(1-κ₀), max_{y in [κ₀,κ]} h_y/(1-y)}.
///
/// The inner maximum is taken over a grid of step 1e-5. For each grid cell
/// the derivative of ψ(y) = h_y/(1-y) is evaluated in interval arithmetic;
/// with |ψ'| ≤ M on a cell of width w, the true maximum on the cell is at
/// most max(ψ at endpoints) + M w / 2. `certified_upper` is the maximum of
/// these bounds and is what guarantee gates should compare against.
pub fn h(kappa: f64, kappa0: f64) -> Result<HBound> {
    check_kappa_pair(kappa, kappa0)?;
    if kappa >= 1.0 {
        return Err(Error::Domain(format!(
            "h requires kappa < 1, got {kappa}"
        )));
    }
    let floor = 1.0 / (1.0 - kappa0);
    let psi = |y: f64| -> Result<f64> { Ok(h_y(y, kappa, kappa0)? / (1.0 - y)) };

    let mut best = floor;
    let mut argmax = kappa0;
    let mut upper = floor;
    let mut a = kappa0;
    let mut va = psi(a)?;
    while a < kappa {
        let b = (a + H_GRID_STEP).min(kappa);
        let vb = psi(b)?;
        if va > best {
            best = va;
            argmax = a;
        }
        if vb > best {
            best = vb;
            argmax = b;
        }
        let slope = psi_derivative_bound(a, b, kappa, kappa0);
        let cell_upper = va.max(vb) + slope * (b - a) / 2.0;
        if cell_upper > upper {
            upper = cell_upper;
        }
        a = b;
        va = vb;
    }
    // Tiny inflation absorbs rounding in the endpoint evaluations, which
    // are plain f64 rather than intervals.
    Ok(HBound {
        value: best,
        certified_upper: upper * (1.0 + 1e-12) + 1e-12,
        argmax,
    })
}

/// Conservative interval arithmetic: every operation widens its result by
/// a relative 1e-14 plus an absolute 1e-300, covering f64 rounding many
/// times over at the precision this module certifies (about 1e-6).
#[derive(Debug, Clone, Copy)]
struct Iv {
    lo: f64,
    hi: f64,
}

impl Iv {
    fn new(lo: f64, hi: f64) -> Iv {
        debug_assert!(lo <= hi);
        Iv { lo, hi }.widen()
    }

    fn point(v: f64) -> Iv {
        Iv::new(v, v)
    }

    fn widen(self) -> Iv {
        let pad = |v: f64| v.abs() * 1e-14 + 1e-300;
        Iv {
            lo: self.lo - pad(self.lo),
            hi: self.hi + pad(self.hi),
        }
    }

    fn add(self, o: Iv) -> Iv {
        Iv::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn sub(self, o: Iv) -> Iv {
        Iv::new(self.lo - o.hi, self.hi - o.lo)
    }

    fn mul(self, o: Iv) -> Iv {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        Iv::new(c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    fn div(self, o: Iv) -> Iv {
        assert!(o.lo > 0.0 || o.hi < 0.0, "division by interval spanning 0");
        self.mul(Iv::new(1.0 / o.hi, 1.0 / o.lo))
    }

    /// x^e for intervals with lo >= 0; monotone in x.
    fn powf_nonneg(self, e: f64) -> Iv {
        let lo = self.lo.max(0.0);
        Iv::new(lo.powf(e), self.hi.max(0.0).powf(e))
    }

    fn abs_max(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Interval bound on |ψ'| over y in [ya, yb], where ψ(y) = h_y/(1-y).
///
/// Writing φ_d(y) = C_d/(D_d - y) with C_d = (3-d-κ)(3-d), D_d = 3-d,
/// r = κ - y, A = (W^4.2 - r^4.2)/4.2, B = (W^3.2 - r^3.2)/3.2 and
/// S = (φ_κ₀ - φ_κ) A + φ_κ W B, we have h_y = 1 - (ν/W) y S and
///   ψ' = (h_y' (1-y) + h_y) / (1-y)²,  h_y' = -(ν/W)(S + y S'),
///   S' = (φ_κ₀' - φ_κ') A + (φ_κ₀ - φ_κ) A' + φ_κ' W B + φ_κ W B',
/// with φ_d' = C_d/(D_d - y)², A' = r^3.2, B' = r^2.2.
fn psi_derivative_bound(ya: f64, yb: f64, kappa: f64, kappa0: f64) -> f64 {
    let y = Iv::new(ya, yb);
    let w = Iv::point(kappa - kappa0);
    let nu = Iv::point(density_normalizer(kappa, kappa0).expect("checked by caller"));
    let one = Iv::point(1.0);

    let c0 = Iv::point((3.0 - kappa0 - kappa) * (3.0 - kappa0));
    let d0 = Iv::point(3.0 - kappa0);
    let c1 = Iv::point((3.0 - 2.0 * kappa) * (3.0 - kappa));
    let d1 = Iv::point(3.0 - kappa);

    let q0 = d0.sub(y);
    let q1 = d1.sub(y);
    let phi0 = c0.div(q0);
    let phi1 = c1.div(q1);
    let dphi0 = c0.div(q0.mul(q0));
    let dphi1 = c1.div(q1.mul(q1));

    let r = Iv::point(kappa).sub(y);
    let a = w.powf_nonneg(4.2).sub(r.powf_nonneg(4.2)).div(Iv::point(4.2));
    let b = w.powf_nonneg(3.2).sub(r.powf_nonneg(3.2)).div(Iv::point(3.2));
    let da = r.powf_nonneg(3.2);
    let db = r.powf_nonneg(2.2);

    let s = phi0.sub(phi1).mul(a).add(phi1.mul(w).mul(b));
    let ds = dphi0
        .sub(dphi1)
        .mul(a)
        .add(phi0.sub(phi1).mul(da))
        .add(dphi1.mul(w).mul(b))
        .add(phi1.mul(w).mul(db));

    let coeff = nu.div(w);
    let hy = one.sub(coeff.mul(y).mul(s));
    let dhy = Iv::point(0.0).sub(coeff.mul(s.add(y.mul(ds))));

    let om = one.sub(y);
    let psi_prime = dhy.mul(om).add(hy).div(om.mul(om));
    psi_prime.abs_max()
}

/// Summary used by the command-line gate.
#[derive(Debug, Clone, Copy)]
pub struct GuaranteeReport {
    pub kappa0: f64,
    pub kappa: f64,
    pub alpha_golden: f64,
    pub g: f64,
    pub h: HBound,
}

impl GuaranteeReport {
    pub fn max_gh(&self) -> f64 {
        self.g.max(self.h.certified_upper)
    }

    pub fn meets_target(&self) -> bool {
        self.max_gh() < GUARANTEE_TARGET
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kappa0": self.kappa0,
            "kappa": self.kappa,
            "alpha_golden": self.alpha_golden,
            "g": self.g,
            "h": self.h.value,
            "h_certified_upper": self.h.certified_upper,
            "h_argmax": self.h.argmax,
            "max_gh": self.max_gh(),
            "target": GUARANTEE_TARGET,
            "meets_target": self.meets_target(),
        })
    }
}

pub fn guarantee_report(kappa: f64, kappa0: f64) -> Result<GuaranteeReport> {
    let golden_delta = (3.0 - 5f64.sqrt()) / 2.0;
    Ok(GuaranteeReport {
        kappa0,
        kappa,
        alpha_golden: alpha_of_delta(golden_delta)?,
        g: g(kappa, kappa0)?,
        h: h(kappa, kappa0)?,
    })
}

/// Exact empirical verification of the two expectation lemmas on one
/// decomposition at a fixed rational (δ, κ).
///
/// The randomness is a tree drawn with the family weights and a prune
/// threshold γ with CDF (3-δ-κ)/(3-δ-t) on [δ, κ]. Both expectations are
/// finite sums here because the candidate cores are piecewise constant
/// in γ, so everything is computed in exact rationals.
#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub delta: Rat,
    pub kappa: Rat,
    /// E[core cost + parity-correction matching cost].
    pub expected_cost: Rat,
    /// (7 - 2δ - 2κ)/(3 - δ) times the input solution's edge cost.
    pub cost_bound: Rat,
    /// P[v in the pruned tree] per vertex, exact.
    pub inclusion: Vec<Rat>,
    /// The per-vertex lower bound: 0 below δ, y(3-δ-κ)/(3-δ-y) on [δ, κ],
    /// y above κ.
    pub inclusion_floor: Vec<Rat>,
}

impl LemmaCheck {
    pub fn cost_ok(&self) -> bool {
        self.expected_cost <= self.cost_bound
    }

    pub fn penalty_ok(&self) -> bool {
        self.inclusion
            .iter()
            .zip(&self.inclusion_floor)
            .all(|(p, f)| p >= f)
    }

    pub fn ok(&self) -> bool {
        self.cost_ok() && self.penalty_ok()
    }

    pub fn to_json(&self) -> Value {
        use crate::rational::format_rational as fr;
        json!({
            "delta": fr(&self.delta),
            "kappa": fr(&self.kappa),
            "expected_cost": fr(&self.expected_cost),
            "cost_bound": fr(&self.cost_bound),
            "cost_ok": self.cost_ok(),
            "penalty_ok": self.penalty_ok(),
            "inclusion": self.inclusion.iter().map(fr).collect::<Vec<_>>(),
            "inclusion_floor": self.inclusion_floor.iter().map(fr).collect::<Vec<_>>(),
        })
    }
}

pub fn empirical_lemma_check(
    inst: &PctspInstance,
    levels: &DecompositionLevels,
    delta: &Rat,
    kappa: &Rat,
) -> Result<LemmaCheck> {
    if !delta.is_positive() || delta > kappa || kappa > &Rat::one() {
        return Err(Error::Domain(format!(
            "need 0 < delta <= kappa <= 1, got delta={delta}, kappa={kappa}"
        )));
    }
    let level = levels.level_below(delta);
    let entry = &levels.levels[level];
    let root = inst.root();
    let y = &entry.solution.y;

    let cdf = |t: &Rat| -> Rat {
        debug_assert!(t >= delta);
        if t >= kappa {
            Rat::one()
        } else {
            let three = rat_int(3);
            (&three - delta - kappa) / (three - delta - t)
        }
    };

    let mut expected_cost = Rat::zero();
    let mut inclusion = vec![Rat::zero(); inst.n()];
    for (tree, weight) in entry.family.trees() {
        // Cost: candidate cores are constant between consecutive distinct
        // prize values, so integrate the piecewise-constant cost exactly.
        let layers = core_layers(tree, root, y)?;
        let mut core_edges: Vec<(usize, usize)> = Vec::new();
        let mut prev_upper: Option<Rat> = None;
        for (i, layer) in layers.iter().enumerate() {
            core_edges.extend(layer.edges.iter().copied());
            let upper = cdf(&layer.threshold);
            let lower = if i + 1 < layers.len() {
                cdf(&layers[i + 1].threshold)
            } else {
                Rat::zero()
            };
            // Consecutive segments must tile [0, 1].
            if let Some(p) = &prev_upper {
                debug_assert_eq!(p, &upper);
            }
            prev_upper = Some(lower.clone());
            let prob = &upper - &lower;
            if prob.is_zero() {
                continue;
            }
            let edge_total: Rat = core_edges.iter().map(|&(u, v)| inst.cost(u, v)).sum();
            let odd = odd_vertices(&core_edges);
            let pairs = min_cost_matching(inst, &odd)?;
            expected_cost += weight * prob * (edge_total + matching_cost(inst, &pairs));
        }
        debug_assert_eq!(prev_upper, Some(Rat::zero()));

        // Inclusion: v survives pruning at γ iff some vertex of its subtree
        // has prize at least γ, so P[v kept] = cdf(subtree max).
        let subtree_max = subtree_maxima(tree, root, y);
        for (&v, m) in tree.vertices().iter().zip(&subtree_max) {
            inclusion[v] += weight * cdf(m);
        }
    }

    let three = rat_int(3);
    let factor = (rat_int(7) - rat_int(2) * delta - rat_int(2) * kappa) / (&three - delta);
    let original = &levels.levels[0].solution;
    let cost_bound = factor * original.edge_cost(inst);

    let mut inclusion_floor = Vec::with_capacity(inst.n());
    for v in 0..inst.n() {
        let yv = &original.y[v];
        inclusion_floor.push(if yv < delta {
            Rat::zero()
        } else if yv <= kappa {
            yv * (&three - delta - kappa) / (&three - delta - yv)
        } else {
            yv.clone()
        });
    }

    Ok(LemmaCheck {
        delta: delta.clone(),
        kappa: kappa.clone(),
        expected_cost,
        cost_bound,
        inclusion,
        inclusion_floor,
    })
}

/// For each tree vertex (in `tree.vertices()` iteration order), the
/// maximum prize over its subtree when the tree is rooted at `root`.
fn subtree_maxima(tree: &RootedTree, root: usize, y: &[Rat]) -> Vec<Rat> {
    let verts: Vec<usize> = tree.vertices().iter().copied().collect();
    let index: std::collections::BTreeMap<usize, usize> =
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); verts.len()];
    for &(u, v) in tree.edges() {
        let (iu, iv) = (index[&u], index[&v]);
        adj[iu].push(iv);
        adj[iv].push(iu);
    }
    // BFS order from the root, then accumulate maxima bottom-up.
    let start = index[&root];
    let mut order = vec![start];
    let mut parent = vec![usize::MAX; verts.len()];
    let mut seen = vec![false; verts.len()];
    seen[start] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let mut maxima: Vec<Rat> = verts.iter().map(|&v| y[v].clone()).collect();
    for &u in order.iter().rev() {
        if parent[u] != usize::MAX && maxima[u] > maxima[parent[u]] {
            let m = maxima[u].clone();
            maxima[parent[u]] = m;
        }
    }
    maxima
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose_levels;
    use crate::instance::generate_euclidean;
    use crate::lp::solve_relaxation;
    use crate::rational::{rat, to_f64};

    const GOLDEN_DELTA: f64 = 0.3819660112501051;
    const GOLDEN_PHI: f64 = 1.618033988749895;

    #[test]
    fn alpha_at_golden_delta_balances_all_terms() {
        let d = GOLDEN_DELTA;
        for term in [
            (5.0 - 2.0 * d) / (3.0 - d),
            (3.0 - d) / (2.0 - d),
            1.0 / (1.0 - d),
        ] {
            assert!((term - GOLDEN_PHI).abs() < 1e-12, "term {term}");
        }
        assert!((alpha_of_delta(d).unwrap() - GOLDEN_PHI).abs() < 1e-12);
    }

    #[test]
    fn alpha_special_values_and_domain() {
        assert!((alpha_of_delta(0.0).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert!((alpha_of_delta(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!(alpha_of_delta(1.0).is_err());
        assert!(alpha_of_delta(-0.1).is_err());
    }

    #[test]
    fn alpha_grid_minimum_sits_at_golden_delta() {
        let mut best = (f64::INFINITY, 0.0);
        let mut d = 0.0;
        while d < 1.0 {
            let v = alpha_of_delta(d).unwrap();
            if v < best.0 {
                best = (v, d);
            }
            d += 1e-5;
        }
        assert!((best.1 - GOLDEN_DELTA).abs() < 1e-4, "argmin {}", best.1);
        assert!((best.0 - GOLDEN_PHI).abs() < 1e-6, "min {}", best.0);
    }

    #[test]
    fn cdf_examples_and_monotonicity() {
        assert!((gamma_cdf(1.0, 0.382, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let atom = gamma_cdf(0.382, 0.382, 1.0).unwrap();
        assert!((atom - 0.723613595706619).abs() < 1e-12);
        let mut prev = 0.0;
        let mut t = 0.382;
        while t <= 1.0 {
            let v = gamma_cdf(t, 0.382, 1.0).unwrap();
            assert!(v >= prev && (0.0..=1.0 + 1e-15).contains(&v));
            prev = v;
            t += 1e-3;
        }
        assert!(gamma_cdf(0.2, 0.382, 1.0).is_err());
        assert!(gamma_cdf(1.1, 0.382, 1.0).is_err());
    }

    #[test]
    fn exact_cdf_matches_float_on_rational_inputs() {
        let d = rat(382, 1000);
        let k = rat_int(1);
        for t in [rat(382, 1000), rat(1, 2), rat(9, 10), rat_int(1)] {
            let exact = to_f64(&gamma_cdf_exact(&t, &d, &k).unwrap());
            let float = gamma_cdf(to_f64(&t), 0.382, 1.0).unwrap();
            assert!((exact - float).abs() < 1e-12);
        }
        assert_eq!(
            gamma_cdf_exact(&rat(1, 10), &d, &k).unwrap(),
            Rat::zero()
        );
    }

    #[test]
    fn g_reference_value_and_limits() {
        let v = g(REFERENCE_KAPPA, REFERENCE_KAPPA0).unwrap();
        assert!(v > 1.5985 && v < 1.5990, "g = {v}");
        assert!((v - 1.5989288479159987).abs() < 1e-9);

        // As the support shrinks, g approaches the per-threshold factor at
        // delta = kappa.
        for kappa in [0.9971, 0.5, 1.0] {
            let shrunk = g(kappa, kappa - 1e-6).unwrap();
            let pointwise = (7.0 - 4.0 * kappa) / (3.0 - kappa);
            assert!((shrunk - pointwise).abs() < 1e-5, "kappa {kappa}");
        }
        assert!(g(0.5, 0.5).is_err());
        assert!(g(0.5, 0.7).is_err());
    }

    #[test]
    fn g_matches_quadrature_of_the_averaged_bound() {
        // Simpson quadrature of nu (7 - 2d - 2k)(k - d)^2.2 over [k0, k].
        let (kappa, kappa0) = (1.0, 0.0);
        let nu = density_normalizer(kappa, kappa0).unwrap();
        let f = |d: f64| (7.0 - 2.0 * d - 2.0 * kappa) * (kappa - d).max(0.0).powf(2.2) * nu;
        let n = 1 << 16;
        let step = (kappa - kappa0) / n as f64;
        let mut s = f(kappa0) + f(kappa);
        for i in 1..n {
            s += f(kappa0 + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = s * step / 3.0;
        assert!((quad - g(kappa, kappa0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn density_integrates_to_one() {
        let p = GuaranteeParams::new(0.3724, 0.3724, 0.9971, 0.9971).unwrap();
        let n = 1 << 16;
        let step = (p.kappa - p.kappa0) / n as f64;
        let mut s = p.density(p.kappa0) + p.density(p.kappa);
        for i in 1..n {
            s += p.density(p.kappa0 + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * step / 3.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn guarantee_params_validation() {
        assert!(GuaranteeParams::new(0.3, 0.2, 0.9, 0.5).is_ok());
        assert!(GuaranteeParams::new(0.1, 0.2, 0.9, 0.5).is_err());
        assert!(GuaranteeParams::new(0.3, 0.2, 0.9, 0.95).is_err());
        assert!(GuaranteeParams::new(0.5, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn phi_is_concave_in_d() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let kappa0: f64 = rng.gen_range(0.0..0.8);
            let kappa: f64 = rng.gen_range(kappa0 + 0.05..1.0);
            let y: f64 = rng.gen_range(kappa0..kappa);
            let a: f64 = rng.gen_range(kappa0..kappa);
            let b: f64 = rng.gen_range(kappa0..kappa);
            let mid = phi((a + b) / 2.0, y, kappa);
            let chord = (phi(a, y, kappa) + phi(b, y, kappa)) / 2.0;
            assert!(mid >= chord - 1e-12, "not concave at {a},{b},{y},{kappa}");
        }
    }

    #[test]
    fn h_reference_values() {
        let bound = h(REFERENCE_KAPPA, REFERENCE_KAPPA0).unwrap();
        let floor = 1.0 / (1.0 - REFERENCE_KAPPA0);
        assert!((floor - 1.5933715742511154).abs() < 1e-12);
        assert!(bound.value >= floor);
        assert!((bound.value - 1.5988521871171206).abs() < 1e-7, "{}", bound.value);
        assert!((bound.argmax - 0.42772).abs() < 1e-3, "{}", bound.argmax);
        assert!(bound.certified_upper >= bound.value);
        // The certification must be tight enough to separate from 1.599.
        assert!(bound.certified_upper < 1.599, "{}", bound.certified_upper);
    }

    #[test]
    fn reference_parameters_meet_the_guarantee_target() {
        let report = guarantee_report(REFERENCE_KAPPA, REFERENCE_KAPPA0).unwrap();
        let m = report.max_gh();
        assert!(m > 1.590 && m < 1.599, "max{{g,h}} = {m}");
        assert!(report.meets_target());
        assert!((report.alpha_golden - GOLDEN_PHI).abs() < 1e-12);
    }

    #[test]
    fn h_domain_errors() {
        assert!(h(1.0, 0.3).is_err());
        assert!(h(0.5, 0.6).is_err());
        assert!(h_y(0.1, 0.9, 0.3).is_err());
        assert!(h_y(0.95, 0.9, 0.3).is_err());
    }

    #[test]
    fn lemma_check_holds_on_lp_optima() {
        let delta = rat(191, 500);
        for (n, seed) in [(5usize, 11u64), (6, 12), (7, 13)] {
            let inst = generate_euclidean(n, seed).unwrap();
            let sol = solve_relaxation(&inst).unwrap();
            let levels = decompose_levels(&inst, &sol).unwrap();
            for kappa in [rat_int(1), rat(9971, 10000)] {
                let check = empirical_lemma_check(&inst, &levels, &delta, &kappa).unwrap();
                assert!(check.cost_ok(), "n={n} seed={seed} cost");
                assert!(check.penalty_ok(), "n={n} seed={seed} penalty");
            }
        }
    }

    #[test]
    fn lemma_check_holds_on_fractional_points() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let delta = rat(191, 500);
        let kappa = rat_int(1);
        for seed in [3u64, 8, 19] {
            let inst = generate_euclidean(6, seed).unwrap();
            let point = crate::testutil::random_fractional_point(&inst, &mut rng);
            let levels = decompose_levels(&inst, &point).unwrap();
            let check = empirical_lemma_check(&inst, &levels, &delta, &kappa).unwrap();
            assert!(check.ok(), "seed {seed}: {:?}", check.to_json());
        }
    }

    #[test]
    fn split_away_vertices_have_zero_inclusion() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let kappa = rat_int(1);
        let mut observed = 0;
        for seed in 0..12u64 {
            let inst = generate_euclidean(6, seed).unwrap();
            let point = crate::testutil::random_fractional_point(&inst, &mut rng);
            let levels = decompose_levels(&inst, &point).unwrap();
            // A threshold above the smallest fractional prize forces splits.
            let delta = rat(3, 4);
            let check = empirical_lemma_check(&inst, &levels, &delta, &kappa).unwrap();
            for v in 0..6 {
                if &levels.levels[0].solution.y[v] < &delta {
                    assert!(check.inclusion[v].is_zero(), "seed {seed} v {v}");
                    observed += 1;
                }
            }
        }
        assert!(observed >= 5, "too few split-away vertices: {observed}");
    }

    #[test]
    fn lemma_floor_reduces_to_two_cases_at_kappa_one() {
        // With kappa = 1 the third case is empty, so the floor matches the
        // basic case split everywhere.
        let delta = rat(191, 500);
        let three = rat_int(3);
        for yv in [rat(1, 5), rat(2, 5), rat(1, 2), rat_int(1)] {
            let expected = if yv < delta {
                Rat::zero()
            } else {
                &yv * (&three - &delta - rat_int(1)) / (&three - &delta - &yv)
            };
            let floor = if yv < delta {
                Rat::zero()
            } else if yv <= rat_int(1) {
                &yv * (&three - &delta - rat_int(1)) / (&three - &delta - &yv)
            } else {
                yv.clone()
            };
            assert_eq!(expected, floor);
        }
    }
}
