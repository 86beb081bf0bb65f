//! Colored cones and fans, their stability under the Galois action, and the
//! resulting verdict for models of embeddings.
//!
//! Cone generators are functionals on the weight lattice, written by their
//! values on `weight_basis`. Fan axioms are not checked: only stability.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::automorphisms::closure_profile;
use crate::error::{Error, Result};
use crate::galois::{ElementAction, GaloisAction, OmegaAction};
use crate::lattice::primitive_on_ray;
use crate::perm::Permutation;
use crate::sphericaldata::ValidatedDatum;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColoredCone {
    #[serde(with = "crate::exact")]
    pub generators: Vec<Vec<BigRational>>,
    pub colors: BTreeSet<String>,
}

/// `a . x >= b`, or `a . x = b` for equations.
type Row = (Vec<BigRational>, BigRational);

fn substitute(rows: &mut [Row], j: usize, pivot: &Row) {
    for (a, b) in rows.iter_mut() {
        if a[j].is_zero() {
            continue;
        }
        let f = &a[j] / &pivot.0[j];
        for (k, p) in pivot.0.iter().enumerate() {
            a[k] -= &f * p;
        }
        *b -= &f * &pivot.1;
    }
}

fn normalize(row: Row) -> Row {
    let (a, b) = row;
    match a.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        Some(s) => (a.iter().map(|x| x / &s).collect(), b / s),
        None => (a, b),
    }
}

/// Exact feasibility of `{x : eqs hold, ineqs hold}` by Gaussian elimination
/// of the equations followed by Fourier-Motzkin elimination.
fn feasible(mut eqs: Vec<Row>, ineqs: Vec<Row>) -> bool {
    let mut ineqs = ineqs;
    while let Some(pivot) = eqs.pop() {
        match pivot.0.iter().position(|x| !x.is_zero()) {
            None => {
                if !pivot.1.is_zero() {
                    return false;
                }
            }
            Some(j) => {
                substitute(&mut eqs, j, &pivot);
                substitute(&mut ineqs, j, &pivot);
            }
        }
    }
    let n = ineqs.first().map_or(0, |r| r.0.len());
    let mut rows: BTreeSet<Row> = ineqs.into_iter().map(normalize).collect();
    for j in 0..n {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for r in rows {
            if r.0[j].is_positive() {
                pos.push(r);
            } else if r.0[j].is_negative() {
                neg.push(r);
            } else {
                rest.insert(r);
            }
        }
        for p in &pos {
            for q in &neg {
                let fp = BigRational::one() / &p.0[j];
                let fq = BigRational::one() / -&q.0[j];
                let a: Vec<BigRational> = p.0.iter().zip(&q.0).map(|(x, y)| x * &fp + y * &fq).collect();
                let b = &p.1 * &fp + &q.1 * &fq;
                rest.insert(normalize((a, b)));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

/// Whether `target` is a nonnegative combination of `gens`.
fn in_cone(gens: &[Vec<BigRational>], target: &[BigRational]) -> bool {
    let m = gens.len();
    let eqs = (0..target.len())
        .map(|i| (gens.iter().map(|g| g[i].clone()).collect(), target[i].clone()))
        .collect();
    let ineqs = (0..m)
        .map(|k| ((0..m).map(|l| if l == k { BigRational::one() } else { BigRational::zero() }).collect(), BigRational::zero()))
        .collect();
    feasible(eqs, ineqs)
}

/// Whether a nonzero nonnegative combination of `gens` vanishes.
fn contains_line(gens: &[Vec<BigRational>]) -> bool {
    let m = gens.len();
    if m == 0 {
        return false;
    }
    let d = gens[0].len();
    let mut eqs: Vec<Row> = (0..d)
        .map(|i| (gens.iter().map(|g| g[i].clone()).collect(), BigRational::zero()))
        .collect();
    eqs.push((vec![BigRational::one(); m], BigRational::one()));
    let ineqs = (0..m)
        .map(|k| ((0..m).map(|l| if l == k { BigRational::one() } else { BigRational::zero() }).collect(), BigRational::zero()))
        .collect();
    feasible(eqs, ineqs)
}

fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().cloned().map(BigRational::from_integer).collect()
}

/// Primitive extreme rays of the cone, sorted. Colors are kept.
pub fn canonicalize_cone(c: &ColoredCone) -> Result<ColoredCone> {
    if let Some(w) = c.generators.windows(2).find(|w| w[0].len() != w[1].len()) {
        return Err(Error::DimensionMismatch {
            expected: w[0].len(),
            found: w[1].len(),
        });
    }
    let mut rays = BTreeSet::new();
    for g in &c.generators {
        let p = primitive_on_ray(g).map_err(|_| Error::ZeroGenerator)?;
        rays.insert(to_rational(&p));
    }
    let rays: Vec<Vec<BigRational>> = rays.into_iter().collect();
    if contains_line(&rays) {
        return Err(Error::NotPointed);
    }
    let extreme = (0..rays.len())
        .filter(|&j| {
            let others: Vec<Vec<BigRational>> =
                rays.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, r)| r.clone()).collect();
            !in_cone(&others, &rays[j])
        })
        .map(|j| rays[j].clone())
        .collect();
    Ok(ColoredCone {
        generators: extreme,
        colors: c.colors.clone(),
    })
}

/// A list of colored cones, each stored canonically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ColoredFan {
    pub cones: Vec<ColoredCone>,
}

impl ColoredFan {
    pub fn new(cones: Vec<ColoredCone>) -> Result<Self> {
        let cones: Vec<ColoredCone> = cones.iter().map(canonicalize_cone).collect::<Result<_>>()?;
        let distinct: BTreeSet<&ColoredCone> = cones.iter().collect();
        if distinct.len() != cones.len() {
            return Err(Error::DuplicateCone);
        }
        Ok(Self { cones })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cones: Vec<ColoredCone> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(cones)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("fan serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Offense {
    pub cone: usize,
    pub element: usize,
    pub rays_moved: bool,
    pub colors_moved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub offenses: Vec<Offense>,
    pub fan_axioms: &'static str,
}

/// Image of a set of colors under `g`: the explicit permutation when one is
/// supplied, the identity when `eps_g` is trivial, and otherwise the map
/// forced by `zeta`, which is ambiguous on half of a two-color fiber.
fn color_image(
    d: &ValidatedDatum,
    oa: &OmegaAction,
    explicit: Option<&Permutation>,
    trivial: bool,
    g: usize,
    colors: &BTreeSet<String>,
) -> Result<BTreeSet<String>> {
    let datum = d.datum();
    let names = datum.color_names();
    if let Some(p) = explicit {
        return colors
            .iter()
            .map(|c| {
                let i = datum.color_index(c).ok_or_else(|| Error::UnknownColor(c.clone()))?;
                Ok(names[p.apply(i)].clone())
            })
            .collect();
    }
    if trivial {
        if let Some(c) = colors.iter().find(|c| datum.color_index(c).is_none()) {
            return Err(Error::UnknownColor(c.clone()));
        }
        return Ok(colors.clone());
    }
    let omega = d.omega_decomposition();
    let mut out = BTreeSet::new();
    for c in colors {
        let p = omega.zeta.get(c).ok_or_else(|| Error::UnknownColor(c.clone()))?;
        let fiber = &omega.fibers[p];
        if fiber.len() == 2 && !fiber.iter().all(|x| colors.contains(x)) {
            return Err(Error::AmbiguousColorAction { element: g });
        }
        let i = oa.points.iter().position(|q| q == p).expect("point of Omega");
        let image = &oa.points[oa.s[g].apply(i)];
        out.extend(omega.fibers[image].iter().cloned());
    }
    Ok(out)
}

/// Stability of every cone under every listed element.
pub fn is_gamma_stable_on(f: &ColoredFan, d: &ValidatedDatum, a: &GaloisAction, elements: &[usize]) -> Result<StabilityReport> {
    let oa = OmegaAction::compute(d, a)?;
    let perms = a.color_permutations(d.datum())?;
    let r = d.weight_rank();
    let mut offenses = Vec::new();
    for &g in elements {
        let ea = ElementAction::new(d.datum(), a, g)?;
        let trivial = ea.matrix.is_identity();
        for (k, cone) in f.cones.iter().enumerate() {
            if let Some(v) = cone.generators.iter().find(|v| v.len() != r) {
                return Err(Error::DimensionMismatch { expected: r, found: v.len() });
            }
            let moved: Vec<Vec<BigRational>> = cone
                .generators
                .iter()
                .map(|v| ea.on_functional(v).expect("weight lattice is stable"))
                .collect();
            let image = canonicalize_cone(&ColoredCone {
                generators: moved,
                colors: BTreeSet::new(),
            })?;
            let colors = color_image(d, &oa, perms.as_ref().map(|p| &p[g]), trivial, g, &cone.colors)?;
            let rays_moved = image.generators != cone.generators;
            let colors_moved = colors != cone.colors;
            if rays_moved || colors_moved {
                offenses.push(Offense {
                    cone: k,
                    element: g,
                    rays_moved,
                    colors_moved,
                });
            }
        }
    }
    Ok(StabilityReport {
        stable: offenses.is_empty(),
        offenses,
        fan_axioms: "unchecked",
    })
}

/// `gamma(C) = C` and `gamma(F) = F` for every cone and every element.
pub fn is_gamma_stable(f: &ColoredFan, d: &ValidatedDatum, a: &GaloisAction) -> Result<StabilityReport> {
    is_gamma_stable_on(f, d, a, &a.group().elements().collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EmbeddingOutcome {
    ExistsUnique,
    HypothesesNotMet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingVerdict {
    pub verdict: EmbeddingOutcome,
    /// Failed hypotheses, empty when a unique model exists.
    pub reasons: Vec<String>,
    pub stability: Option<StabilityReport>,
}

/// A unique model of the embedding exists when the form is inner, `H` is
/// self-normalizing and the fan is stable. Otherwise nothing is claimed.
pub fn embedding_verdict(f: &ColoredFan, d: &ValidatedDatum, a: &GaloisAction) -> Result<EmbeddingVerdict> {
    let mut reasons = Vec::new();
    if !a.is_trivial() {
        reasons.push("inner_form".to_string());
    }
    if !closure_profile(d)?.self_normalizing {
        reasons.push("self_normalizing".to_string());
    }
    let stability = match is_gamma_stable(f, d, a) {
        Ok(report) => {
            if !report.stable {
                reasons.push("gamma_stable".to_string());
            }
            Some(report)
        }
        Err(Error::InvariantsNotPreserved { .. }) => {
            reasons.push("invariants_not_preserved".to_string());
            None
        }
        Err(Error::AmbiguousColorAction { .. }) => {
            reasons.push("gamma_stable_undetermined".to_string());
            None
        }
        Err(e) => return Err(e),
    };
    Ok(EmbeddingVerdict {
        verdict: if reasons.is_empty() {
            EmbeddingOutcome::ExistsUnique
        } else {
            EmbeddingOutcome::HypothesesNotMet
        },
        reasons,
        stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::galois::FiniteGroup;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    fn cone(gens: &[&[i64]]) -> ColoredCone {
        ColoredCone {
            generators: gens.iter().map(|g| q(g)).collect(),
            colors: BTreeSet::new(),
        }
    }

    #[test]
    fn interior_generator_is_dropped() {
        let c = canonicalize_cone(&cone(&[&[2, 0], &[1, 1], &[0, 2]])).unwrap();
        assert_eq!(c.generators, vec![q(&[0, 1]), q(&[1, 0])]);
    }

    #[test]
    fn single_generator_is_primitivized() {
        let c = canonicalize_cone(&cone(&[&[4, 6]])).unwrap();
        assert_eq!(c.generators, vec![q(&[2, 3])]);
        let half = ColoredCone {
            generators: vec![vec![BigRational::new(1.into(), 2.into()), BigRational::new(3.into(), 4.into())]],
            colors: BTreeSet::new(),
        };
        assert_eq!(canonicalize_cone(&half).unwrap().generators, vec![q(&[2, 3])]);
    }

    #[test]
    fn lines_and_zero_are_rejected() {
        assert_eq!(canonicalize_cone(&cone(&[&[1, 0], &[-1, 0]])).unwrap_err(), Error::NotPointed);
        assert_eq!(
            canonicalize_cone(&cone(&[&[1, 0], &[-1, 1], &[0, -1]])).unwrap_err(),
            Error::NotPointed
        );
        assert_eq!(canonicalize_cone(&cone(&[&[0, 0]])).unwrap_err(), Error::ZeroGenerator);
    }

    #[test]
    fn three_dimensional_cone() {
        // square pyramid over (+-1, +-1, 1) plus its apex direction (0,0,1)
        let c = canonicalize_cone(&cone(&[&[1, 1, 1], &[1, -1, 1], &[-1, 1, 1], &[-1, -1, 1], &[0, 0, 1], &[1, 0, 1]])).unwrap();
        assert_eq!(c.generators.len(), 4);
    }

    #[test]
    fn fixture_fans_are_stable_where_expected() {
        let d = fixtures::datum("weil-restriction-so3").unwrap().validated().unwrap();
        let swap = GaloisAction::from_json(fixtures::GAMMA2_SWAP).unwrap();
        let sym = ColoredFan::from_json(fixtures::PRODUCT_SYMMETRIC_FAN).unwrap();
        assert!(is_gamma_stable(&sym, &d, &swap).unwrap().stable);
        let asym = ColoredFan::from_json(fixtures::PRODUCT_ASYMMETRIC_FAN).unwrap();
        let r = is_gamma_stable(&asym, &d, &swap).unwrap();
        assert!(!r.stable);
        assert!(r.offenses.iter().all(|o| o.element == 1));
        let trivial = GaloisAction::trivial(FiniteGroup::cyclic(2));
        assert!(is_gamma_stable(&asym, &d, &trivial).unwrap().stable);
    }

    #[test]
    fn half_fiber_without_permutation_is_ambiguous() {
        let d = fixtures::datum("weil-restriction-so3").unwrap().validated().unwrap();
        let src = r#"{"order":2,"cayley":[[0,1],[1,0]],"eps":{"1":[[0,1],[1,0]]}}"#;
        let a = GaloisAction::from_json(src).unwrap();
        let sym = ColoredFan::from_json(fixtures::PRODUCT_SYMMETRIC_FAN).unwrap();
        assert_eq!(
            is_gamma_stable(&sym, &d, &a).unwrap_err(),
            Error::AmbiguousColorAction { element: 1 }
        );
    }

    #[test]
    fn embedding_verdicts() {
        let sn = fixtures::datum("self-normalizing-demo").unwrap().validated().unwrap();
        let fan = ColoredFan::from_json(fixtures::SELF_NORMALIZING_FAN).unwrap();
        let trivial = GaloisAction::trivial(FiniteGroup::cyclic(2));
        let v = embedding_verdict(&fan, &sn, &trivial).unwrap();
        assert_eq!(v.verdict, EmbeddingOutcome::ExistsUnique);

        let pgl2 = fixtures::datum("pgl2-torus").unwrap().validated().unwrap();
        let v = embedding_verdict(&ColoredFan::new(vec![]).unwrap(), &pgl2, &trivial).unwrap();
        assert_eq!(v.reasons, ["self_normalizing"]);

        let weil = fixtures::datum("weil-restriction-so3").unwrap().validated().unwrap();
        let swap = GaloisAction::from_json(fixtures::GAMMA2_SWAP).unwrap();
        let sym = ColoredFan::from_json(fixtures::PRODUCT_SYMMETRIC_FAN).unwrap();
        let v = embedding_verdict(&sym, &weil, &swap).unwrap();
        assert_eq!(v.reasons, ["inner_form", "self_normalizing"]);
    }

    #[test]
    fn duplicate_cones_are_rejected() {
        let src = r#"[{"generators":[[1,0]],"colors":[]},{"generators":[[2,0]],"colors":[]}]"#;
        assert_eq!(ColoredFan::from_json(src).unwrap_err(), Error::DuplicateCone);
    }
}
