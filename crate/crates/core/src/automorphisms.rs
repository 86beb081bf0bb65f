//! The equivariant automorphism group of a spherical homogeneous space,
//! seen through its character group.
//!
//! `Aut^G(Y)` is identified with the characters of the weight lattice that
//! vanish on the doubled spherical roots `Sigma^N`; its character group is
//! the quotient of the weight lattice by `Lambda = <Sigma^N>`. Finite-order
//! characters are handled as maps into `Q/Z`, so a value of `1/2`
//! stands for the scalar `-1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{quotient_invariants, snf, AbelianInvariants, IntegerMatrix, Sublattice};
use crate::perm::Permutation;
use crate::sphericaldata::ValidatedDatum;

/// Fractional part in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// A homomorphism from the weight lattice to `Q/Z`, given by its values on
/// the weight basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionCharacter {
    values: Vec<BigRational>,
}

impl TorsionCharacter {
    pub fn new(values: Vec<BigRational>) -> Self {
        Self {
            values: values.iter().map(frac).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        Self {
            values: vec![BigRational::zero(); rank],
        }
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Value on a vector in weight coordinates, in `[0, 1)`.
    pub fn eval(&self, x: &[BigInt]) -> BigRational {
        let total = self
            .values
            .iter()
            .zip(x)
            .map(|(a, b)| a * BigRational::from_integer(b.clone()))
            .fold(BigRational::zero(), |acc, t| acc + t);
        frac(&total)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    /// Order in `Hom(X, Q/Z)`: the lcm of the denominators.
    pub fn order(&self) -> BigInt {
        self.values.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureProfile {
    pub self_normalizing: bool,
    pub spherically_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutProfile {
    pub sigma_n: Vec<Vec<BigInt>>,
    pub lambda: Sublattice,
    /// `Lambda` together with the paired simple roots.
    pub lambda_bar: Sublattice,
    pub character_group: AbelianInvariants,
    pub closure: ClosureProfile,
    /// False when the datum is self-normalizing yet has a two-color fiber,
    /// which cannot happen for data coming from an actual subgroup.
    pub consistent: bool,
}

/// Multiplier `c_gamma` for each spherical root: 2 for roots that are paired
/// simple roots, 1 otherwise.
pub fn doubling_coefficients(d: &ValidatedDatum) -> Vec<u32> {
    d.datum()
        .spherical_roots
        .iter()
        .map(|g| {
            if d.set_a().iter().any(|p| &p.in_weights == g) {
                2
            } else {
                1
            }
        })
        .collect()
}

/// `Sigma^N` in weight coordinates. An override on the datum is returned
/// as given.
pub fn sigma_n(d: &ValidatedDatum) -> Result<Vec<Vec<BigInt>>> {
    if let Some(over) = &d.datum().sigma_n_override {
        return over
            .iter()
            .map(|v| {
                v.iter()
                    .map(|q| {
                        if q.is_integer() {
                            Ok(q.to_integer())
                        } else {
                            let shown: Vec<String> = v.iter().map(crate::exact::format_rational).collect();
                            Err(Error::NotInWeightLattice(format!("({})", shown.join(", "))))
                        }
                    })
                    .collect()
            })
            .collect();
    }
    Ok(d.datum()
        .spherical_roots
        .iter()
        .zip(doubling_coefficients(d))
        .map(|(g, c)| g.iter().map(|x| x * BigInt::from(c)).collect())
        .collect())
}

pub fn lambda(d: &ValidatedDatum) -> Result<Sublattice> {
    Sublattice::new(d.weight_rank(), &sigma_n(d)?)
}

/// Invariants of `X / Lambda`: torsion is the component group data, the
/// free rank is the dimension of the torus part.
pub fn aut_group(d: &ValidatedDatum) -> Result<AbelianInvariants> {
    quotient_invariants(d.weight_rank(), &lambda(d)?)
}

fn lambda_bar(d: &ValidatedDatum, lambda: &Sublattice) -> Result<Sublattice> {
    let paired: Vec<Vec<BigInt>> = d.set_a().iter().map(|p| p.in_weights.clone()).collect();
    lambda.join(&Sublattice::new(d.weight_rank(), &paired)?)
}

/// Self-normalizing iff `Lambda` is the whole weight lattice. Spherically
/// closed iff `Lambda` plus the paired roots is: the automorphisms acting
/// trivially on colors are the characters vanishing on `Sigma^N` and on
/// every paired root, which follows from the swap rule in [`color_action`].
pub fn closure_profile(d: &ValidatedDatum) -> Result<ClosureProfile> {
    Ok(aut_profile(d)?.closure)
}

pub fn aut_profile(d: &ValidatedDatum) -> Result<AutProfile> {
    let sigma_n = sigma_n(d)?;
    let lambda = Sublattice::new(d.weight_rank(), &sigma_n)?;
    let lambda_bar = lambda_bar(d, &lambda)?;
    let character_group = quotient_invariants(d.weight_rank(), &lambda)?;
    let self_normalizing = lambda.is_full();
    let closure = ClosureProfile {
        self_normalizing,
        spherically_closed: lambda_bar.is_full(),
    };
    Ok(AutProfile {
        consistent: !self_normalizing || d.omega_decomposition().omega2.is_empty(),
        sigma_n,
        lambda,
        lambda_bar,
        character_group,
        closure,
    })
}

/// Permutation of the colors (in datum order) induced by the automorphism
/// with character `psi`. The pair over a paired root `alpha` is swapped iff
/// `psi(alpha) = 1/2`; all other colors are fixed.
pub fn color_action(d: &ValidatedDatum, psi: &TorsionCharacter) -> Result<Permutation> {
    if psi.values().len() != d.weight_rank() {
        return Err(Error::DimensionMismatch {
            expected: d.weight_rank(),
            found: psi.values().len(),
        });
    }
    if sigma_n(d)?.iter().any(|s| !psi.eval(s).is_zero()) {
        return Err(Error::NotAnAutomorphismCharacter);
    }
    let datum = d.datum();
    let mut perm = Permutation::identity(datum.colors.len());
    for p in d.set_a() {
        let value = psi.eval(&p.in_weights);
        if value == half() {
            let i = datum.color_index(&p.plus).expect("paired color");
            let j = datum.color_index(&p.minus).expect("paired color");
            perm = Permutation::transposition(datum.colors.len(), i, j).compose(&perm);
        } else if !value.is_zero() {
            return Err(Error::OddValueOnA {
                root: p.label.clone(),
                value: crate::exact::format_rational(&value),
            });
        }
    }
    Ok(perm)
}

/// A character of the weight lattice with prescribed values on the spherical
/// roots (in datum order). Solved in the coordinates adapted to the Smith
/// form of the spherical-root matrix; the free part is set to zero.
pub fn extend_from_sigma(d: &ValidatedDatum, targets: &[BigRational]) -> Result<TorsionCharacter> {
    let sigma = &d.datum().spherical_roots;
    if targets.len() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            found: targets.len(),
        });
    }
    let r = d.weight_rank();
    if sigma.is_empty() {
        return Ok(TorsionCharacter::zero(r));
    }
    // rows of `m` are the spherical roots, so m * psi = targets
    let m = IntegerMatrix::from_rows(sigma)?;
    let form = snf(&m);
    let factors = form.factors();
    let ut: Vec<BigRational> = (0..m.rows())
        .map(|i| {
            (0..m.rows())
                .map(|j| BigRational::from_integer(form.u[(i, j)].clone()) * &targets[j])
                .fold(BigRational::zero(), |acc, t| acc + t)
        })
        .collect();
    let y: Vec<BigRational> = (0..r)
        .map(|i| match factors.get(i) {
            Some(di) => &ut[i] / BigRational::from_integer(di.clone()),
            None => BigRational::zero(),
        })
        .collect();
    let psi: Vec<BigRational> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| BigRational::from_integer(form.v[(i, j)].clone()) * &y[j])
                .fold(BigRational::zero(), |acc, t| acc + t)
        })
        .collect();
    Ok(TorsionCharacter::new(psi))
}

/// The character `psi_alpha`: value 1/2 on the paired root `alpha` and 0 on
/// every other spherical root.
pub fn swap_witness(d: &ValidatedDatum, label: &str) -> Result<TorsionCharacter> {
    let pair = d
        .paired_root(label)
        .ok_or_else(|| Error::UnknownRoot(label.to_string()))?;
    let targets: Vec<BigRational> = d
        .datum()
        .spherical_roots
        .iter()
        .map(|g| if *g == pair.in_weights { half() } else { BigRational::zero() })
        .collect();
    extend_from_sigma(d, &targets)
}

/// Checks that `psi` is a character of finite order with the expected values
/// on the spherical roots.
pub fn agrees_on_sigma(d: &ValidatedDatum, psi: &TorsionCharacter, targets: &[BigRational]) -> bool {
    d.datum()
        .spherical_roots
        .iter()
        .zip(targets)
        .all(|(g, t)| psi.eval(g) == frac(t))
        && psi.values().iter().all(|v| !v.is_negative())
}
