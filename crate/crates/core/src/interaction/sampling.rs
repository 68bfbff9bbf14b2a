//! Simulated user clicks.
//!
//! Positive clicks are sampled inside the object away from its boundary,
//! negative clicks either from the background away from the object
//! (strategy 1) or on other instances (strategy 2). Iterative correction clicks are drawn
//! from the current error and may replace an earlier click.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::correction::{exterior_distance, interior_distance, max_boundary_point};
use crate::error::{Error, Result};
use crate::geometry::{Pixel, Polarity};
use crate::guidance::{Click, ClickSet};
use crate::imaging::{check_same_dims, BinaryMask};

/// Value sets the sampler draws its parameters from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub n_pos: Vec<usize>,
    pub n_neg1: Vec<usize>,
    pub n_neg2: Vec<usize>,
    pub d_in1: Vec<f64>,
    pub d_in2: Vec<f64>,
    pub d_out1: Vec<f64>,
    pub d_out2: Vec<f64>,
    pub replace_prob: f64,
    pub n_iter: usize,
    pub rng_seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            n_pos: vec![2, 3, 4, 5],
            n_neg1: vec![5, 10],
            n_neg2: vec![3, 5],
            d_in1: vec![15.0, 20.0, 40.0],
            d_in2: vec![7.0, 10.0, 20.0],
            d_out1: vec![15.0, 40.0, 60.0],
            d_out2: vec![10.0, 15.0, 25.0],
            replace_prob: 0.3,
            n_iter: 5,
            rng_seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_pos", &self.n_pos),
            ("n_neg1", &self.n_neg1),
            ("n_neg2", &self.n_neg2),
        ];
        for (name, set) in counts {
            if set.is_empty() {
                return Err(Error::param(format!("{name} has no choices")));
            }
        }
        let dists = [
            ("d_in1", &self.d_in1),
            ("d_in2", &self.d_in2),
            ("d_out1", &self.d_out1),
            ("d_out2", &self.d_out2),
        ];
        for (name, set) in dists {
            if set.is_empty() || set.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                return Err(Error::param(format!(
                    "{name} needs positive finite choices"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.replace_prob) {
            return Err(Error::param(format!(
                "replace_prob must be in [0, 1], got {}",
                self.replace_prob
            )));
        }
        Ok(())
    }
}

fn pick<T: Copy, R: Rng + ?Sized>(rng: &mut R, choices: &[T]) -> T {
    *choices.choose(rng).expect("validated non-empty")
}

/// Greedy passes tried before the constraints are relaxed.
const SPREAD_ATTEMPTS: usize = 8;

/// Greedy random selection of up to `n` candidates at least `min_dist` apart.
fn spread<R: Rng + ?Sized>(
    mut candidates: Vec<Pixel>,
    n: usize,
    min_dist: f64,
    rng: &mut R,
) -> Vec<Pixel> {
    candidates.shuffle(rng);
    let min_sq = min_dist * min_dist;
    let mut chosen: Vec<Pixel> = Vec::with_capacity(n);
    for c in candidates {
        if chosen.len() == n {
            break;
        }
        if chosen.iter().all(|o| o.distance_sq(c) as f64 >= min_sq) {
            chosen.push(c);
        }
    }
    chosen
}

/// Positive clicks plus the distance constraints actually enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSample {
    pub clicks: Vec<Pixel>,
    /// Minimum distance to the object boundary after relaxation.
    pub d_in1: f64,
    /// Minimum pairwise distance after relaxation.
    pub d_in2: f64,
}

/// Samples positive clicks inside `gt`.
///
/// When `n_pos` clicks do not fit, both distances are halved until they do or
/// drop below one pixel. If even that yields nothing, the single pixel farthest
/// from the boundary is returned.
pub fn sample_positive_clicks<R: Rng + ?Sized>(
    gt: &BinaryMask,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<PositiveSample> {
    cfg.validate()?;
    if gt.is_empty() {
        return Err(Error::EmptyObject);
    }
    let n = pick(rng, &cfg.n_pos);
    let (mut d1, mut d2) = (pick(rng, &cfg.d_in1), pick(rng, &cfg.d_in2));
    sample_inside(gt, n, &mut d1, &mut d2, rng)
}

fn sample_inside<R: Rng + ?Sized>(
    gt: &BinaryMask,
    n: usize,
    d1: &mut f64,
    d2: &mut f64,
    rng: &mut R,
) -> Result<PositiveSample> {
    let w = gt.width();
    let interior = interior_distance(gt);
    loop {
        let candidates: Vec<Pixel> = interior
            .iter()
            .zip(gt.as_slice())
            .enumerate()
            .filter(|(_, (&d, &fg))| fg && d >= *d1)
            .map(|(i, _)| Pixel::from_index(i, w))
            .collect();
        let exhausted = *d1 < 1.0 && *d2 < 1.0;
        if !candidates.is_empty() {
            let mut clicks = Vec::new();
            for _ in 0..SPREAD_ATTEMPTS {
                let attempt = spread(candidates.clone(), n, *d2, rng);
                if attempt.len() > clicks.len() {
                    clicks = attempt;
                }
                if clicks.len() == n {
                    break;
                }
            }
            if clicks.len() == n || exhausted {
                return Ok(PositiveSample {
                    clicks,
                    d_in1: *d1,
                    d_in2: *d2,
                });
            }
        }
        if exhausted {
            return Ok(PositiveSample {
                clicks: vec![max_boundary_point(gt)?],
                d_in1: 0.0,
                d_in2: 0.0,
            });
        }
        *d1 /= 2.0;
        *d2 /= 2.0;
    }
}

/// Negative sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NegativeStrategy {
    /// Background clicks away from the object.
    Background,
    /// Clicks on each other instance.
    OtherObjects,
}

/// Negative clicks; `diagnostic` explains an empty or short result.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSample {
    pub clicks: Vec<Pixel>,
    pub diagnostic: Option<String>,
}

pub fn sample_negative_clicks<R: Rng + ?Sized>(
    gt: &BinaryMask,
    other_instances: &[BinaryMask],
    strategy: NegativeStrategy,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<NegativeSample> {
    cfg.validate()?;
    let w = gt.width();
    match strategy {
        NegativeStrategy::Background => {
            let n = pick(rng, &cfg.n_neg1);
            let d1 = pick(rng, &cfg.d_out1);
            let d2 = pick(rng, &cfg.d_out2);
            let outside = exterior_distance(gt);
            let candidates: Vec<Pixel> = outside
                .iter()
                .zip(gt.as_slice())
                .enumerate()
                .filter(|(_, (&d, &fg))| !fg && d >= d1)
                .map(|(i, _)| Pixel::from_index(i, w))
                .collect();
            if candidates.is_empty() {
                return Ok(NegativeSample {
                    clicks: Vec::new(),
                    diagnostic: Some(format!("no background pixel is {d1} px from the object")),
                });
            }
            let clicks = spread(candidates, n, d2, rng);
            let diagnostic = (clicks.len() < n)
                .then(|| format!("placed {} of {n} background clicks", clicks.len()));
            Ok(NegativeSample { clicks, diagnostic })
        }
        NegativeStrategy::OtherObjects => {
            if other_instances.is_empty() {
                return Ok(NegativeSample {
                    clicks: Vec::new(),
                    diagnostic: Some("no other instances".into()),
                });
            }
            let mut clicks = Vec::new();
            for other in other_instances {
                check_same_dims(gt.dims(), other.dims())?;
                let n = pick(rng, &cfg.n_neg2);
                let d2 = pick(rng, &cfg.d_out2);
                let candidates: Vec<Pixel> = other.minus(gt)?.foreground().collect();
                clicks.extend(spread(candidates, n, d2, rng));
            }
            let diagnostic = clicks
                .is_empty()
                .then(|| "other instances have no free pixels".into());
            Ok(NegativeSample { clicks, diagnostic })
        }
    }
}

/// Initial training-style clicks: positives plus negatives from a randomly
/// chosen strategy (strategy 2 only when other instances exist).
pub fn simulate_initial_clicks<R: Rng + ?Sized>(
    gt: &BinaryMask,
    other_instances: &[BinaryMask],
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<ClickSet> {
    let pos = sample_positive_clicks(gt, cfg, rng)?;
    let strategy = if !other_instances.is_empty() && rng.gen_bool(0.5) {
        NegativeStrategy::OtherObjects
    } else {
        NegativeStrategy::Background
    };
    let neg = sample_negative_clicks(gt, other_instances, strategy, cfg, rng)?;
    Ok(ClickSet::from_lists(&pos.clicks, &neg.clicks))
}

/// A click drawn uniformly from the misclassified pixels. `None` if there are none.
pub fn random_correction_click<R: Rng + ?Sized>(
    pred: &BinaryMask,
    gt: &BinaryMask,
    rng: &mut R,
) -> Result<Option<Click>> {
    let err = pred.xor(gt)?;
    let errors: Vec<Pixel> = err.foreground().collect();
    Ok(errors.choose(rng).map(|&p| {
        let polarity = if gt.get(p) {
            Polarity::Positive
        } else {
            Polarity::Negative
        };
        Click::new(p, polarity)
    }))
}

/// Adds `click`, or with probability `replace_prob` overwrites a random earlier
/// click of the same polarity.
pub fn add_or_replace<R: Rng + ?Sized>(
    clicks: &mut ClickSet,
    click: Click,
    replace_prob: f64,
    rng: &mut R,
) {
    let same: Vec<usize> = clicks
        .sequence()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.polarity == click.polarity)
        .map(|(i, _)| i)
        .collect();
    if !same.is_empty() && rng.gen_bool(replace_prob) {
        let i = *same.choose(rng).expect("non-empty");
        clicks.replace(i, click);
    } else {
        clicks.push(click.pixel(), click.polarity);
    }
}

/// Training-style iterative clicks: `n_iter` error-driven clicks applied on top
/// of `clicks`, each drawn against `predict(clicks)`.
pub fn simulate_iterative_clicks<R: Rng + ?Sized>(
    gt: &BinaryMask,
    clicks: &mut ClickSet,
    cfg: &SamplingConfig,
    rng: &mut R,
    mut predict: impl FnMut(&ClickSet) -> Result<BinaryMask>,
) -> Result<()> {
    cfg.validate()?;
    for _ in 0..cfg.n_iter {
        let pred = predict(clicks)?;
        let Some(click) = random_correction_click(&pred, gt, rng)? else {
            break;
        };
        add_or_replace(clicks, click, cfg.replace_prob, rng);
    }
    Ok(())
}
