//! Homogeneous spherical data: the weight lattice, simple roots and coroots,
//! spherical roots and colors, together with the invariants derived from
//! them (the map `zeta = rho x varsigma` and its image, the valuation cone,
//! and the set of simple roots carrying a color pair with equal `rho`).
//!
//! Coordinates: simple roots and coroots live in the ambient character
//! lattice `Z^ambient_rank`. Spherical roots are written in coordinates of
//! `weight_basis`, and each `rho` is given by its values on `weight_basis`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{is_primitive, rank_of, solve_integral, IntegerMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleRoot {
    pub label: String,
    #[serde(with = "crate::exact")]
    pub vector: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Color {
    pub name: String,
    #[serde(with = "crate::exact")]
    pub rho: Vec<BigRational>,
    pub moved_by: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousSphericalDatum {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub ambient_rank: usize,
    #[serde(with = "crate::exact")]
    pub weight_basis: Vec<Vec<BigInt>>,
    pub simple_roots: Vec<SimpleRoot>,
    #[serde(with = "crate::exact")]
    pub simple_coroots: Vec<Vec<BigInt>>,
    #[serde(with = "crate::exact")]
    pub spherical_roots: Vec<Vec<BigInt>>,
    pub colors: Vec<Color>,
    #[serde(
        rename = "sigma_N_override",
        default,
        with = "crate::exact",
        skip_serializing_if = "Option::is_none"
    )]
    pub sigma_n_override: Option<Vec<Vec<BigRational>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomTag {
    Structure,
    WeightBasisIndependent,
    CartanMatrix,
    ColorNames,
    MovedByNonempty,
    /// At most two colors are moved by a simple root.
    PairBound,
    /// Exactly two colors are moved by `alpha` iff `alpha` is a spherical root.
    PairIffSphericalSimpleRoot,
    /// `rho(D+) + rho(D-)` is the coroot restricted to the weight lattice.
    RhoSum,
    /// `<rho(D), beta> = 1` for spherical simple roots moving a paired color.
    RhoOnSphericalRoot,
    /// A pair with equal `rho` is moved by its root only.
    PairMovedBy,
    SigmaPrimitive,
    SigmaIndependent,
}

impl AxiomTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxiomTag::Structure => "structure",
            AxiomTag::WeightBasisIndependent => "weight-basis-independent",
            AxiomTag::CartanMatrix => "cartan-matrix",
            AxiomTag::ColorNames => "color-names",
            AxiomTag::MovedByNonempty => "moved-by-nonempty",
            AxiomTag::PairBound => "pair-bound",
            AxiomTag::PairIffSphericalSimpleRoot => "pair-iff-spherical-simple-root",
            AxiomTag::RhoSum => "rho-sum",
            AxiomTag::RhoOnSphericalRoot => "rho-on-spherical-root",
            AxiomTag::PairMovedBy => "pair-moved-by",
            AxiomTag::SigmaPrimitive => "sigma-primitive",
            AxiomTag::SigmaIndependent => "sigma-independent",
        }
    }
}

impl fmt::Display for AxiomTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: AxiomTag,
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.axiom, self.subject, self.detail)
    }
}

/// Label attached to every report: only the color/root axioms listed in
/// `docs/formats.md` are checked, not the complete axiom system.
pub const CHECK_SET: &str = "partial (color and spherical-root axioms only)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub check_set: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, tag: AxiomTag) -> bool {
        self.violations.iter().any(|v| v.axiom == tag)
    }
}

/// A point of `V x P(S)`: a functional on the weight lattice and a set of
/// simple-root labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OmegaPoint {
    #[serde(serialize_with = "crate::exact::serialize")]
    pub rho_value: Vec<BigRational>,
    pub moved_by: BTreeSet<String>,
}

impl fmt::Display for OmegaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rho: Vec<String> = self.rho_value.iter().map(crate::exact::format_rational).collect();
        let roots: Vec<&str> = self.moved_by.iter().map(String::as_str).collect();
        write!(f, "(({}), {{{}}})", rho.join(", "), roots.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaDecomposition {
    pub zeta: BTreeMap<String, OmegaPoint>,
    pub omega1: BTreeSet<OmegaPoint>,
    pub omega2: BTreeSet<OmegaPoint>,
    /// Preimages of each point, color names sorted.
    pub fibers: BTreeMap<OmegaPoint, Vec<String>>,
}

impl OmegaDecomposition {
    /// Groups colors by `zeta`. Works on any structurally sound datum; a fiber
    /// with three or more colors is an axiom violation.
    pub fn compute(d: &HomogeneousSphericalDatum) -> Result<Self> {
        let mut zeta = BTreeMap::new();
        let mut fibers: BTreeMap<OmegaPoint, Vec<String>> = BTreeMap::new();
        for c in &d.colors {
            let p = OmegaPoint {
                rho_value: c.rho.clone(),
                moved_by: c.moved_by.clone(),
            };
            fibers.entry(p.clone()).or_default().push(c.name.clone());
            zeta.insert(c.name.clone(), p);
        }
        let mut omega1 = BTreeSet::new();
        let mut omega2 = BTreeSet::new();
        for (p, names) in fibers.iter_mut() {
            names.sort();
            match names.len() {
                1 => {
                    omega1.insert(p.clone());
                }
                2 => {
                    omega2.insert(p.clone());
                }
                n => {
                    return Err(Error::AxiomViolation(format!(
                        "fiber of zeta over {p} has {n} colors"
                    )))
                }
            }
        }
        Ok(Self {
            zeta,
            omega1,
            omega2,
            fibers,
        })
    }

    pub fn omega_len(&self) -> usize {
        self.fibers.len()
    }
}

/// A simple root with two colors sharing the same `rho`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedRoot {
    pub label: String,
    pub root_index: usize,
    /// The root in weight-lattice coordinates.
    pub in_weights: Vec<BigInt>,
    pub plus: String,
    pub minus: String,
    pub omega: OmegaPoint,
}

/// Defining normals of the valuation cone `{v : <v, gamma> <= 0 for gamma in Sigma}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationCone {
    pub normals: Vec<Vec<BigInt>>,
}

impl ValuationCone {
    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.normals.iter().all(|g| pairing(v, g) <= BigRational::zero())
    }
}

/// `<v, x>` for a rational functional and an integer vector.
pub fn pairing(v: &[BigRational], x: &[BigInt]) -> BigRational {
    v.iter()
        .zip(x)
        .map(|(a, b)| a * BigRational::from_integer(b.clone()))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).fold(BigInt::zero(), |acc, t| acc + t)
}

fn show(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn show_q(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(crate::exact::format_rational).collect();
    format!("({})", parts.join(", "))
}

impl HomogeneousSphericalDatum {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("datum serializes")
    }

    pub fn weight_rank(&self) -> usize {
        self.weight_basis.len()
    }

    pub fn root_index(&self, label: &str) -> Option<usize> {
        self.simple_roots.iter().position(|r| r.label == label)
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c.name == name)
    }

    pub fn color_names(&self) -> Vec<String> {
        self.colors.iter().map(|c| c.name.clone()).collect()
    }

    /// Weight basis as the columns of an `ambient_rank x weight_rank` matrix.
    pub fn weight_matrix(&self) -> IntegerMatrix {
        IntegerMatrix::from_columns(self.ambient_rank, &self.weight_basis).expect("weight basis shape")
    }

    /// Coordinates of an ambient character in the weight basis, if it lies in
    /// the weight lattice.
    pub fn to_weight_coords(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_integral(&self.weight_matrix(), v)
    }

    /// `alpha_i^vee` restricted to the weight lattice, as values on the basis.
    pub fn coroot_on_weights(&self, i: usize) -> Vec<BigInt> {
        self.weight_basis
            .iter()
            .map(|w| dot(&self.simple_coroots[i], w))
            .collect()
    }

    /// Colors moved by the simple root with this label, sorted by name.
    pub fn colors_moved_by(&self, label: &str) -> Vec<&Color> {
        let mut out: Vec<&Color> = self.colors.iter().filter(|c| c.moved_by.contains(label)).collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    /// Index into `spherical_roots` of the root equal to simple root `i`, if any.
    pub fn spherical_index_of_simple(&self, i: usize) -> Option<usize> {
        let coords = self.to_weight_coords(&self.simple_roots[i].vector)?;
        self.spherical_roots.iter().position(|g| *g == coords)
    }

    fn structure_violations(&self) -> Vec<Violation> {
        let n = self.ambient_rank;
        let r = self.weight_rank();
        let mut out = Vec::new();
        let mut bad = |subject: String, detail: String| {
            out.push(Violation {
                axiom: AxiomTag::Structure,
                subject,
                detail,
            })
        };
        for (k, w) in self.weight_basis.iter().enumerate() {
            if w.len() != n {
                bad(format!("weight_basis[{k}]"), format!("length {} != ambient rank {n}", w.len()));
            }
        }
        let mut labels = BTreeSet::new();
        for root in &self.simple_roots {
            if root.vector.len() != n {
                bad(
                    format!("simple root {}", root.label),
                    format!("length {} != ambient rank {n}", root.vector.len()),
                );
            }
            if !labels.insert(root.label.as_str()) {
                bad(format!("simple root {}", root.label), "duplicate label".into());
            }
        }
        if self.simple_coroots.len() != self.simple_roots.len() {
            bad(
                "simple_coroots".into(),
                format!(
                    "{} coroots for {} simple roots",
                    self.simple_coroots.len(),
                    self.simple_roots.len()
                ),
            );
        }
        for (k, c) in self.simple_coroots.iter().enumerate() {
            if c.len() != n {
                bad(format!("simple_coroots[{k}]"), format!("length {} != ambient rank {n}", c.len()));
            }
        }
        for (k, g) in self.spherical_roots.iter().enumerate() {
            if g.len() != r {
                bad(format!("spherical_roots[{k}]"), format!("length {} != weight rank {r}", g.len()));
            }
        }
        for c in &self.colors {
            if c.rho.len() != r {
                bad(format!("color {}", c.name), format!("rho has length {} != weight rank {r}", c.rho.len()));
            }
            for l in &c.moved_by {
                if !labels.contains(l.as_str()) {
                    bad(format!("color {}", c.name), format!("moved by unknown simple root {l}"));
                }
            }
        }
        if let Some(over) = &self.sigma_n_override {
            for (k, g) in over.iter().enumerate() {
                if g.len() != r {
                    bad(format!("sigma_N_override[{k}]"), format!("length {} != weight rank {r}", g.len()));
                }
            }
        }
        out
    }

    /// Checks the datum. Structural problems are reported first; if any are
    /// found, the axiom checks are skipped.
    pub fn validate(&self) -> ValidationReport {
        let structural = self.structure_violations();
        let mut violations: BTreeSet<Violation> = structural.into_iter().collect();
        if violations.is_empty() {
            violations.extend(self.axiom_violations());
        }
        ValidationReport {
            check_set: CHECK_SET.to_string(),
            violations: violations.into_iter().collect(),
        }
    }

    fn axiom_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |axiom, subject: String, detail: String| out.push(Violation { axiom, subject, detail });
        let r = self.weight_rank();

        if rank_of(&self.weight_basis, self.ambient_rank) != r {
            push(AxiomTag::WeightBasisIndependent, "weight_basis".into(), "vectors are linearly dependent".into());
        }

        let s = self.simple_roots.len();
        for i in 0..s {
            for j in 0..s {
                let a_ij = dot(&self.simple_coroots[i], &self.simple_roots[j].vector);
                let a_ji = dot(&self.simple_coroots[j], &self.simple_roots[i].vector);
                let (li, lj) = (&self.simple_roots[i].label, &self.simple_roots[j].label);
                if i == j && a_ij != BigInt::from(2) {
                    push(AxiomTag::CartanMatrix, format!("<{li}, {li}^vee>"), format!("= {a_ij}, expected 2"));
                }
                if i != j && a_ij > BigInt::zero() {
                    push(AxiomTag::CartanMatrix, format!("<{lj}, {li}^vee>"), format!("= {a_ij} > 0"));
                }
                if i != j && a_ij.is_zero() != a_ji.is_zero() {
                    push(
                        AxiomTag::CartanMatrix,
                        format!("<{lj}, {li}^vee>"),
                        format!("= {a_ij} but <{li}, {lj}^vee> = {a_ji}"),
                    );
                }
            }
        }

        let mut names = BTreeSet::new();
        for c in &self.colors {
            if !names.insert(c.name.as_str()) {
                push(AxiomTag::ColorNames, format!("color {}", c.name), "duplicate name".into());
            }
            if c.moved_by.is_empty() {
                push(AxiomTag::MovedByNonempty, format!("color {}", c.name), "moved by no simple root".into());
            }
        }

        for g in &self.spherical_roots {
            if !is_primitive(g) {
                push(AxiomTag::SigmaPrimitive, format!("spherical root {}", show(g)), "not primitive in the weight lattice".into());
            }
        }
        if rank_of(&self.spherical_roots, r) != self.spherical_roots.len() {
            push(AxiomTag::SigmaIndependent, "spherical_roots".into(), "linearly dependent".into());
        }

        for (i, root) in self.simple_roots.iter().enumerate() {
            let label = &root.label;
            let moved = self.colors_moved_by(label);
            let spherical = self.spherical_index_of_simple(i).is_some();
            if moved.len() > 2 {
                push(
                    AxiomTag::PairBound,
                    format!("simple root {label}"),
                    format!("moves {} colors", moved.len()),
                );
            }
            if (moved.len() == 2) != spherical {
                let detail = if spherical {
                    format!("is a spherical root but moves {} color(s)", moved.len())
                } else {
                    "moves two colors but is not a spherical root".to_string()
                };
                push(AxiomTag::PairIffSphericalSimpleRoot, format!("simple root {label}"), detail);
            }
            if moved.len() != 2 {
                continue;
            }
            let (plus, minus) = (moved[0], moved[1]);
            let coroot = self.coroot_on_weights(i);
            let sum: Vec<BigRational> = plus.rho.iter().zip(&minus.rho).map(|(a, b)| a + b).collect();
            let expected: Vec<BigRational> = coroot.iter().cloned().map(BigRational::from_integer).collect();
            if sum != expected {
                push(
                    AxiomTag::RhoSum,
                    format!("simple root {label}"),
                    format!(
                        "rho({}) + rho({}) = {} but the coroot restricts to {}",
                        plus.name,
                        minus.name,
                        show_q(&sum),
                        show(&coroot)
                    ),
                );
            }
            for color in [plus, minus] {
                for beta in &color.moved_by {
                    let Some(bi) = self.root_index(beta) else { continue };
                    let Some(si) = self.spherical_index_of_simple(bi) else { continue };
                    let value = pairing(&color.rho, &self.spherical_roots[si]);
                    if !value.is_one() {
                        push(
                            AxiomTag::RhoOnSphericalRoot,
                            format!("color {}", color.name),
                            format!("<rho, {beta}> = {}, expected 1", crate::exact::format_rational(&value)),
                        );
                    }
                }
            }
            if plus.rho == minus.rho {
                let only: BTreeSet<String> = [label.clone()].into();
                for color in [plus, minus] {
                    if color.moved_by != only {
                        push(
                            AxiomTag::PairMovedBy,
                            format!("color {}", color.name),
                            format!("pair over {label} has equal rho but is moved by more than {label}"),
                        );
                    }
                }
            }
        }
        out
    }

    /// Validates and precomputes the derived invariants.
    pub fn validated(self) -> Result<ValidatedDatum> {
        ValidatedDatum::new(self)
    }
}

/// A datum that passed [`HomogeneousSphericalDatum::validate`], with its
/// derived invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedDatum {
    datum: HomogeneousSphericalDatum,
    omega: OmegaDecomposition,
    paired: Vec<PairedRoot>,
}

impl ValidatedDatum {
    pub fn new(datum: HomogeneousSphericalDatum) -> Result<Self> {
        let report = datum.validate();
        if let Some(first) = report.violations.first() {
            return Err(Error::InvalidDatum {
                count: report.violations.len(),
                first: first.to_string(),
            });
        }
        let omega = OmegaDecomposition::compute(&datum)?;
        let mut paired = Vec::new();
        for (i, root) in datum.simple_roots.iter().enumerate() {
            let moved = datum.colors_moved_by(&root.label);
            if moved.len() == 2 && moved[0].rho == moved[1].rho {
                let in_weights = datum
                    .to_weight_coords(&root.vector)
                    .expect("validated: paired simple roots lie in the weight lattice");
                paired.push(PairedRoot {
                    label: root.label.clone(),
                    root_index: i,
                    in_weights,
                    plus: moved[0].name.clone(),
                    minus: moved[1].name.clone(),
                    omega: omega.zeta[&moved[0].name].clone(),
                });
            }
        }
        Ok(Self { datum, omega, paired })
    }

    pub fn datum(&self) -> &HomogeneousSphericalDatum {
        &self.datum
    }

    pub fn into_inner(self) -> HomogeneousSphericalDatum {
        self.datum
    }

    pub fn weight_rank(&self) -> usize {
        self.datum.weight_rank()
    }

    pub fn omega_decomposition(&self) -> &OmegaDecomposition {
        &self.omega
    }

    pub fn valuation_cone(&self) -> ValuationCone {
        ValuationCone {
            normals: self.datum.spherical_roots.clone(),
        }
    }

    /// Simple roots with a color pair of equal `rho`, with the bijection to
    /// the two-color points of `Omega`.
    pub fn set_a(&self) -> &[PairedRoot] {
        &self.paired
    }

    pub fn paired_root(&self, label: &str) -> Option<&PairedRoot> {
        self.paired.iter().find(|p| p.label == label)
    }

    /// The two-color fiber containing this color, if any.
    pub fn partner(&self, color: &str) -> Option<&str> {
        let p = self.omega.zeta.get(color)?;
        let fiber = &self.omega.fibers[p];
        (fiber.len() == 2).then(|| if fiber[0] == color { fiber[1].as_str() } else { fiber[0].as_str() })
    }
}
