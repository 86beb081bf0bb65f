mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use common::{permutation_action, product_datum, random_action, small_groups};
use spherical_descent::automorphisms::{color_action, TorsionCharacter};
use spherical_descent::cohomology::hom_to_2;
use spherical_descent::error::Error;
use spherical_descent::fans::{canonicalize_cone, embedding_verdict, is_gamma_stable, is_gamma_stable_on, ColoredCone, ColoredFan, EmbeddingOutcome};
use spherical_descent::fixtures;
use spherical_descent::galois::{existence_verdict, preserves_invariants, preserves_invariants_on, FiniteGroup, GaloisAction, Verdict};
use spherical_descent::lattice::{quotient_invariants, snf, IntegerMatrix, Sublattice};
use spherical_descent::perm::Permutation;
use spherical_descent::sphericaldata::{HomogeneousSphericalDatum, ValidatedDatum};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn bi(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn q(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> IntegerMatrix {
    IntegerMatrix::new(rows, cols, bi(entries)).unwrap()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// gcd of all k x k minors.
fn determinantal_divisor(a: &IntegerMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rs in combinations(a.rows(), k) {
        for cs in combinations(a.cols(), k) {
            let entries = rs.iter().flat_map(|&i| cs.iter().map(move |&j| (i, j))).map(|ij| a[ij].clone()).collect();
            let minor = IntegerMatrix::new(k, k, entries).unwrap().determinant().unwrap();
            g = g.gcd(&minor);
        }
    }
    g
}

fn small_matrix() -> impl Strategy<Value = IntegerMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => -9i64..=9], r * c).prop_map(move |e| matrix(r, c, &e))
    })
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn smith_form_matches_determinantal_divisors(a in small_matrix()) {
        let s = snf(&a);
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        let factors = s.factors();
        for w in factors.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        prop_assert!(factors.iter().all(|f| f.is_positive()));
        let mut prefix = BigInt::one();
        for k in 1..=a.rows().min(a.cols()) {
            let dk = determinantal_divisor(&a, k);
            if k <= factors.len() {
                prefix *= &factors[k - 1];
                prop_assert_eq!(&dk, &prefix);
            } else {
                prop_assert!(dk.is_zero());
            }
        }
    }

    #[test]
    fn quotient_is_basis_independent(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let count = rng.random_range(1..=n + 1);
        let mut gens: Vec<Vec<BigInt>> =
            (0..count).map(|_| (0..n).map(|_| BigInt::from(rng.random_range(-6i64..=6))).collect()).collect();
        let before = Sublattice::new(n, &gens).unwrap();
        for _ in 0..8 {
            let i = rng.random_range(0..gens.len());
            let j = rng.random_range(0..gens.len());
            match rng.random_range(0..3) {
                0 if i != j => {
                    let c = BigInt::from(rng.random_range(-3i64..=3));
                    let add: Vec<BigInt> = gens[j].iter().map(|x| x * &c).collect();
                    for (x, y) in gens[i].iter_mut().zip(add) {
                        *x += y;
                    }
                }
                1 => gens.swap(i, j),
                _ => gens[i].iter_mut().for_each(|x| *x = -&*x),
            }
        }
        let redundant: Vec<BigInt> = (0..n).map(|k| &gens[0][k] - &gens[gens.len() - 1][k] * 2).collect();
        gens.push(redundant);
        gens.shuffle(&mut rng);
        let after = Sublattice::new(n, &gens).unwrap();
        prop_assert_eq!(&before, &after);
        prop_assert_eq!(quotient_invariants(n, &before).unwrap(), quotient_invariants(n, &after).unwrap());
    }

    #[test]
    fn quotient_order_is_the_determinant(a in (1usize..=4).prop_flat_map(|n| prop::collection::vec(-7i64..=7, n * n).prop_map(move |e| matrix(n, n, &e)))) {
        let n = a.rows();
        let det = a.determinant().unwrap();
        let inv = quotient_invariants(n, &Sublattice::new(n, &a.to_rows()).unwrap()).unwrap();
        if det.is_zero() {
            prop_assert!(inv.free_rank > 0);
        } else {
            prop_assert_eq!(inv.order(), Some(det.abs()));
        }
    }

    #[test]
    fn membership_is_closed_under_integer_combinations(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let gens: Vec<Vec<BigInt>> =
            (0..rng.random_range(1..=n)).map(|_| (0..n).map(|_| BigInt::from(rng.random_range(-5i64..=5))).collect()).collect();
        let l = Sublattice::new(n, &gens).unwrap();
        for g in &gens {
            prop_assert!(l.contains(g));
        }
        for _ in 0..5 {
            let mut v = vec![BigInt::zero(); n];
            for g in &gens {
                let c = BigInt::from(rng.random_range(-4i64..=4));
                for (x, y) in v.iter_mut().zip(g) {
                    *x += &c * y;
                }
            }
            prop_assert!(l.contains(&v));
            // v + e_k is a member iff e_k is
            let k = rng.random_range(0..n);
            let mut e = vec![BigInt::zero(); n];
            e[k] = BigInt::one();
            let mut w = v.clone();
            w[k] += 1;
            prop_assert_eq!(l.contains(&w), l.contains(&e));
        }
    }
}

fn half_or_zero(bits: &[bool]) -> TorsionCharacter {
    TorsionCharacter::new(bits.iter().map(|&b| BigRational::new(i64::from(b).into(), 2.into())).collect())
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn characters_are_additive(values in prop::collection::vec((-7i64..=7, 1i64..=6), 1..=4), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let psi = TorsionCharacter::new(values.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect());
        let n = values.len();
        let x: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.random_range(-20i64..=20))).collect();
        let y: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.random_range(-20i64..=20))).collect();
        let sum: Vec<BigInt> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = psi.eval(&sum);
        let rhs = psi.eval(&x) + psi.eval(&y);
        let rhs = &rhs - rhs.floor();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(psi.eval(&x) >= BigRational::zero() && psi.eval(&x) < BigRational::one());
    }

    #[test]
    fn color_action_is_a_homomorphism_of_order_two(a in prop::collection::vec(any::<bool>(), 1..=5), b_seed in any::<u64>()) {
        let k = a.len();
        let mut rng = StdRng::seed_from_u64(b_seed);
        let b: Vec<bool> = (0..k).map(|_| rng.random_bool(0.5)).collect();
        let d = product_datum(k).validated().unwrap();
        let (pa, pb) = (color_action(&d, &half_or_zero(&a)).unwrap(), color_action(&d, &half_or_zero(&b)).unwrap());
        let pab = color_action(&d, &half_or_zero(&a).add(&half_or_zero(&b))).unwrap();
        prop_assert_eq!(&pab, &pa.compose(&pb));
        prop_assert!(pa.order() <= 2);
        // the pair over root i is swapped exactly when a_i is set
        for (i, &set) in a.iter().enumerate() {
            prop_assert_eq!(pa.apply(2 * i) == 2 * i + 1, set);
        }
        let mut quarter = vec![BigRational::zero(); k];
        quarter[rng.random_range(0..k)] = BigRational::new(1.into(), 4.into());
        prop_assert!(matches!(color_action(&d, &TorsionCharacter::new(quarter)), Err(Error::NotAnAutomorphismCharacter)));
    }
}

/// Cross product sign of two plane vectors.
fn cross(a: &[BigInt], b: &[BigInt]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn primitive(v: &[i64]) -> Vec<BigInt> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    bi(&v.iter().map(|x| x / g).collect::<Vec<_>>())
}

fn upper_half_plane() -> impl Strategy<Value = Vec<i64>> {
    prop_oneof![
        (-6i64..=6, 1i64..=6).prop_map(|(x, y)| vec![x, y]),
        (1i64..=6).prop_map(|x| vec![x, 0]),
    ]
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn planar_cones_keep_their_angular_extremes(gens in prop::collection::vec(upper_half_plane(), 1..=6)) {
        let cone = ColoredCone { generators: gens.iter().map(|g| q(g)).collect(), colors: BTreeSet::new() };
        let canon = canonicalize_cone(&cone).unwrap();
        let rays: Vec<Vec<BigInt>> = gens.iter().map(|g| primitive(g)).collect();
        // angles lie in [0, pi), so the cross product orders them
        let first = rays.iter().find(|r| rays.iter().all(|o| !cross(r, o).is_negative())).unwrap();
        let last = rays.iter().find(|r| rays.iter().all(|o| !cross(o, r).is_negative())).unwrap();
        let expected: BTreeSet<Vec<BigRational>> = [first, last]
            .into_iter()
            .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
            .collect();
        prop_assert_eq!(canon.generators.iter().cloned().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn canonical_cones_ignore_presentation(seed in any::<u64>(), n in 1usize..=4, count in 1usize..=6) {
        let mut rng = StdRng::seed_from_u64(seed);
        // a positive first coordinate keeps the cone pointed
        let gens: Vec<Vec<i64>> = (0..count)
            .map(|_| (0..n).map(|k| if k == 0 { rng.random_range(1..=4) } else { rng.random_range(-4..=4) }).collect())
            .collect();
        let cone = ColoredCone { generators: gens.iter().map(|g| q(g)).collect(), colors: BTreeSet::from(["D".to_string()]) };
        let canon = canonicalize_cone(&cone).unwrap();
        prop_assert_eq!(&canonicalize_cone(&canon).unwrap(), &canon);
        let mut other: Vec<Vec<BigRational>> = gens
            .iter()
            .map(|g| {
                let s = BigRational::new(rng.random_range(1i64..=5).into(), rng.random_range(1i64..=5).into());
                q(g).into_iter().map(|x| x * &s).collect()
            })
            .collect();
        let i = rng.random_range(0..count);
        let j = rng.random_range(0..count);
        let inner: Vec<BigRational> = other[i].iter().zip(&other[j]).map(|(a, b)| a + b).collect();
        other.push(inner);
        other.shuffle(&mut rng);
        let again = canonicalize_cone(&ColoredCone { generators: other, colors: cone.colors.clone() }).unwrap();
        prop_assert_eq!(again, canon);
    }
}

/// Brute force over all maps `G -> Z/2`.
fn hom_to_2_oracle(g: &FiniteGroup) -> u64 {
    let n = g.order();
    (0u32..1 << n)
        .filter(|bits| g.elements().all(|a| g.elements().all(|b| (bits >> g.mul(a, b) & 1) == (bits >> a & 1) ^ (bits >> b & 1))))
        .count() as u64
}

#[test]
fn hom_to_2_counts_sign_characters() {
    let mut rng = StdRng::seed_from_u64(12);
    for (name, g) in small_groups() {
        let count = hom_to_2(&g);
        assert!(count.is_power_of_two(), "{name}");
        assert_eq!(count, hom_to_2_oracle(&g), "{name}");
        for _ in 0..5 {
            let mut images: Vec<usize> = g.elements().collect();
            images.shuffle(&mut rng);
            assert_eq!(hom_to_2(&g.relabel(&Permutation::from_images(images).unwrap())), count, "{name}");
        }
    }
}

/// Factors of two kinds: `PGL2 / T` (two colors, weights `Z alpha`) and
/// `PGL2 / N(T)` (one color, weights `Z 2 alpha`).
fn mixed_datum(kinds: &[bool]) -> ValidatedDatum {
    let k = kinds.len();
    let unit = |i: usize, scale: i64| -> Vec<i64> { (0..k).map(|j| if i == j { scale } else { 0 }).collect() };
    let mut colors = Vec::new();
    for (i, &normalizer) in kinds.iter().enumerate() {
        let root = [format!("a{}", i + 1)];
        if normalizer {
            colors.push(serde_json::json!({"name": format!("D{}", i + 1), "rho": unit(i, 2), "moved_by": root}));
        } else {
            for sign in ["+", "-"] {
                colors.push(serde_json::json!({"name": format!("D{}{sign}", i + 1), "rho": unit(i, 1), "moved_by": root}));
            }
        }
    }
    let json = serde_json::json!({
        "ambient_rank": k,
        "weight_basis": (0..k).map(|i| unit(i, if kinds[i] { 2 } else { 1 })).collect::<Vec<_>>(),
        "simple_roots": (0..k).map(|i| serde_json::json!({"label": format!("a{}", i + 1), "vector": unit(i, 1)})).collect::<Vec<_>>(),
        "simple_coroots": (0..k).map(|i| unit(i, 2)).collect::<Vec<_>>(),
        "spherical_roots": (0..k).map(|i| unit(i, 1)).collect::<Vec<_>>(),
        "colors": colors,
    });
    HomogeneousSphericalDatum::from_json(&json.to_string()).unwrap().validated().unwrap()
}

/// Signed coordinate rays and colored factors of a cone.
type ConeKey = (BTreeSet<(usize, bool)>, BTreeSet<usize>);

/// A group from the catalog acting on a random number of factors.
fn random_permutation_setup(rng: &mut StdRng) -> (FiniteGroup, Vec<Permutation>) {
    let groups = small_groups();
    let (_, g) = groups[rng.random_range(0..groups.len())].clone();
    let sigma = random_action(rng, &g, 5);
    (g, sigma)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn preservation_agrees_for_inverses_and_generators(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (g, sigma) = random_permutation_setup(&mut rng);
        let kinds: Vec<bool> = (0..sigma[0].len()).map(|_| rng.random_bool(0.3)).collect();
        let d = mixed_datum(&kinds);
        let a = permutation_action(&g, &sigma);
        let report = preserves_invariants(&d, &a).unwrap();
        for f in &report.elements {
            let inv = &report.elements[g.inverse(f.element)];
            prop_assert_eq!((f.weight_lattice, f.spherical_roots, f.omega1, f.omega2), (inv.weight_lattice, inv.spherical_roots, inv.omega1, inv.omega2));
            // oracle: the weight lattice is stable iff kinds are constant on orbits
            let oracle = (0..kinds.len()).all(|i| kinds[sigma[f.element].apply(i)] == kinds[i]);
            prop_assert_eq!(f.all(), oracle);
        }
        let on_gens = preserves_invariants_on(&d, &a, g.generators()).unwrap();
        prop_assert_eq!(on_gens.all_preserved(), report.all_preserved());
    }

    #[test]
    fn verdicts_are_monotone_in_subgroups(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (g, sigma) = random_permutation_setup(&mut rng);
        let kinds: Vec<bool> = (0..sigma[0].len()).map(|_| rng.random_bool(0.3)).collect();
        let d = mixed_datum(&kinds);
        let a = permutation_action(&g, &sigma);
        let whole = existence_verdict(&d, &a).unwrap();
        for h in g.subgroups() {
            let part = existence_verdict(&d, &a.restrict(&h).unwrap()).unwrap();
            prop_assert_eq!(part.quotient_order, h.len());
            if whole.verdict.has_model() {
                prop_assert_eq!(part.verdict, whole.verdict);
            }
            if part.verdict == Verdict::NoEquivariantModel {
                prop_assert_eq!(whole.verdict, Verdict::NoEquivariantModel);
            }
        }
    }

    #[test]
    fn fan_stability_matches_a_combinatorial_oracle(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (g, sigma) = random_permutation_setup(&mut rng);
        let k = sigma[0].len();
        let d = product_datum(k).validated().unwrap();
        let a = permutation_action(&g, &sigma);
        // a cone is a set of signed coordinate rays plus a set of colored factors
        let mut keys: BTreeSet<ConeKey> = BTreeSet::new();
        for _ in 0..rng.random_range(1..=4) {
            let mut rays: BTreeMap<usize, bool> = BTreeMap::new();
            for i in 0..k {
                if rng.random_bool(0.5) {
                    rays.insert(i, rng.random_bool(0.7));
                }
            }
            if rays.is_empty() {
                continue;
            }
            let colored = rays.iter().filter(|&(_, &pos)| pos && rng.random_bool(0.5)).map(|(&i, _)| i).collect();
            keys.insert((rays.into_iter().collect(), colored));
        }
        prop_assume!(!keys.is_empty());
        let cones = keys
            .iter()
            .map(|(rays, colored)| ColoredCone {
                generators: rays
                    .iter()
                    .map(|&(i, pos)| (0..k).map(|j| BigRational::from_integer(if i != j { 0 } else if pos { 1 } else { -1 }.into())).collect())
                    .collect(),
                colors: colored.iter().flat_map(|i| [format!("D{}+", i + 1), format!("D{}-", i + 1)]).collect(),
            })
            .collect();
        let fan = ColoredFan::new(cones).unwrap();
        let full = is_gamma_stable(&fan, &d, &a).unwrap();
        let gens = is_gamma_stable_on(&fan, &d, &a, g.generators()).unwrap();
        let oracle = g.elements().all(|x| {
            keys.iter().all(|(rays, colored)| {
                let r: BTreeSet<(usize, bool)> = rays.iter().map(|&(i, pos)| (sigma[x].apply(i), pos)).collect();
                let c: BTreeSet<usize> = colored.iter().map(|&i| sigma[x].apply(i)).collect();
                &r == rays && &c == colored
            })
        });
        prop_assert_eq!(full.stable, oracle);
        prop_assert_eq!(gens.stable, oracle);
    }
}


#[test]
fn data_survive_a_json_round_trip() {
    let mut data: Vec<HomogeneousSphericalDatum> = fixtures::NAMES.iter().map(|n| fixtures::datum(n).unwrap()).collect();
    data.extend((1..=4).map(product_datum));
    data.push(mixed_datum(&[true, false, true]).into_inner());
    for d in data {
        let back = HomogeneousSphericalDatum::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), d.to_json());
    }
}

#[test]
fn self_normalizing_product_with_a_swap_is_not_inner() {
    let d = mixed_datum(&[true, true]);
    let swap = FiniteGroup::cyclic(2);
    let sigma = vec![Permutation::identity(2), Permutation::transposition(2, 0, 1)];
    let a = permutation_action(&swap, &sigma);
    let symmetric = ColoredFan::new(vec![
        ColoredCone { generators: vec![q(&[1, 0]), q(&[0, 1])], colors: BTreeSet::from(["D1".into(), "D2".into()]) },
        ColoredCone { generators: vec![q(&[-1, -1])], colors: BTreeSet::new() },
    ])
    .unwrap();
    let v = embedding_verdict(&symmetric, &d, &a).unwrap();
    assert_eq!(v.verdict, EmbeddingOutcome::HypothesesNotMet);
    assert_eq!(v.reasons, ["inner_form"]);
    assert!(v.stability.unwrap().stable);
    let inner = embedding_verdict(&symmetric, &d, &GaloisAction::trivial(swap)).unwrap();
    assert_eq!(inner.verdict, EmbeddingOutcome::ExistsUnique);
    assert!(inner.reasons.is_empty());
}
