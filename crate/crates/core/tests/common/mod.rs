#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use spherical_descent::cohomology::CoverProblem;
use spherical_descent::galois::{FiniteGroup, GaloisAction};
use spherical_descent::lattice::IntegerMatrix;
use spherical_descent::perm::Permutation;
use spherical_descent::sphericaldata::HomogeneousSphericalDatum;

fn perm(images: &[usize]) -> Permutation {
    Permutation::from_images(images.to_vec()).unwrap()
}

pub fn q8() -> FiniteGroup {
    // units 1, i, j, k; element id = 2 * unit + sign
    let unit: [[(usize, usize); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    let table = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (w, s) = unit[a / 2][b / 2];
                    2 * w + (s + a % 2 + b % 2) % 2
                })
                .collect()
        })
        .collect();
    FiniteGroup::new(table, None).unwrap()
}

/// Groups of order at most 8.
pub fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
    let c = FiniteGroup::cyclic;
    let s3 = FiniteGroup::from_permutations(3, &[perm(&[1, 0, 2]), perm(&[1, 2, 0])]).unwrap().0;
    let d4 = FiniteGroup::from_permutations(4, &[perm(&[1, 2, 3, 0]), perm(&[0, 3, 2, 1])]).unwrap().0;
    vec![
        ("C1", c(1)),
        ("C2", c(2)),
        ("C3", c(3)),
        ("C4", c(4)),
        ("C2xC2", c(2).direct_product(&c(2))),
        ("C5", c(5)),
        ("C6", c(6)),
        ("S3", s3),
        ("C7", c(7)),
        ("C8", c(8)),
        ("C2xC4", c(2).direct_product(&c(4))),
        ("C2xC2xC2", c(2).direct_product(&c(2)).direct_product(&c(2))),
        ("D4", d4),
        ("Q8", q8()),
    ]
}

/// Left multiplication on the cosets `xH`.
pub fn coset_action(g: &FiniteGroup, h: &[usize]) -> Vec<Permutation> {
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for x in g.elements() {
        let mut c: Vec<usize> = h.iter().map(|&y| g.mul(x, y)).collect();
        c.sort_unstable();
        if !cosets.contains(&c) {
            cosets.push(c);
        }
    }
    g.elements()
        .map(|x| {
            let images = cosets
                .iter()
                .map(|c| {
                    let y = g.mul(x, c[0]);
                    cosets.iter().position(|d| d.contains(&y)).unwrap()
                })
                .collect();
            Permutation::from_images(images).unwrap()
        })
        .collect()
}

/// A random action on between 1 and `max_points` points, as a disjoint
/// union of coset actions with shuffled point labels.
pub fn random_action(rng: &mut StdRng, g: &FiniteGroup, max_points: usize) -> Vec<Permutation> {
    let subgroups = g.subgroups();
    let mut blocks: Vec<Vec<Permutation>> = Vec::new();
    let mut size = 0;
    loop {
        let room = max_points - size;
        let fits: Vec<&Vec<usize>> = subgroups.iter().filter(|h| g.order() / h.len() <= room).collect();
        if fits.is_empty() || (size > 0 && rng.random_bool(0.35)) {
            break;
        }
        let h = fits[rng.random_range(0..fits.len())];
        let block = coset_action(g, h);
        size += block[0].len();
        blocks.push(block);
    }
    let mut relabel: Vec<usize> = (0..size).collect();
    relabel.shuffle(rng);
    let relabel = Permutation::from_images(relabel).unwrap();
    g.elements()
        .map(|x| {
            let mut images = Vec::with_capacity(size);
            let mut offset = 0;
            for b in &blocks {
                images.extend(b[x].images().iter().map(|&i| i + offset));
                offset += b[x].len();
            }
            relabel
                .compose(&Permutation::from_images(images).unwrap())
                .compose(&relabel.inverse())
        })
        .collect()
}

/// `k` copies of `PGL_2 / T`: every simple root is a spherical root with a
/// color pair of equal `rho`.
pub fn product_datum(k: usize) -> HomogeneousSphericalDatum {
    let unit = |i: usize, scale: i64| -> Vec<i64> { (0..k).map(|j| if i == j { scale } else { 0 }).collect() };
    let mut colors = Vec::new();
    for i in 0..k {
        for sign in ["+", "-"] {
            colors.push(serde_json::json!({
                "name": format!("D{}{sign}", i + 1),
                "rho": unit(i, 1),
                "moved_by": [format!("a{}", i + 1)],
            }));
        }
    }
    let json = serde_json::json!({
        "ambient_rank": k,
        "weight_basis": (0..k).map(|i| unit(i, 1)).collect::<Vec<_>>(),
        "simple_roots": (0..k).map(|i| serde_json::json!({"label": format!("a{}", i + 1), "vector": unit(i, 1)})).collect::<Vec<_>>(),
        "simple_coroots": (0..k).map(|i| unit(i, 2)).collect::<Vec<_>>(),
        "spherical_roots": (0..k).map(|i| unit(i, 1)).collect::<Vec<_>>(),
        "colors": colors,
    });
    HomogeneousSphericalDatum::from_json(&json.to_string()).unwrap()
}

/// `eps_g` is the permutation matrix sending `e_i` to `e_{sigma_g(i)}`.
pub fn permutation_action(g: &FiniteGroup, sigma: &[Permutation]) -> GaloisAction {
    let k = sigma[0].len();
    let eps: BTreeMap<usize, IntegerMatrix> = g
        .elements()
        .map(|x| {
            let mut m = IntegerMatrix::zeros(k, k);
            for i in 0..k {
                m[(sigma[x].apply(i), i)] = 1.into();
            }
            (x, m)
        })
        .collect();
    GaloisAction::new(g.clone(), eps, BTreeMap::new()).unwrap()
}

pub struct RandomCover {
    pub problem: CoverProblem,
    pub sizes_differ_on_orbit: bool,
}

/// A random cover problem. With probability about one half the fiber
/// sizes are constant on orbits and every generator gets a random cover;
/// otherwise sizes are arbitrary and covers are supplied only when they
/// exist.
pub fn random_cover_problem(rng: &mut StdRng, g: &FiniteGroup, max_colors: usize) -> RandomCover {
    let s = random_action(rng, g, 6);
    let n = s[0].len();
    let mut sizes = vec![0usize; n];
    if rng.random_bool(0.5) {
        for size in sizes.iter_mut() {
            *size = rng.random_range(1..=3);
        }
    } else {
        let mut seen = vec![false; n];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let size = rng.random_range(1..=3);
            for x in g.elements() {
                let j = s[x].apply(i);
                seen[j] = true;
                sizes[j] = size;
            }
        }
    }
    while sizes.iter().sum::<usize>() > max_colors {
        let i = sizes.iter().position(|&z| z > 1).unwrap();
        sizes[i] -= 1;
    }
    let sizes_differ_on_orbit = g
        .elements()
        .any(|x| (0..n).any(|i| sizes[s[x].apply(i)] != sizes[i]));
    let mut colors = Vec::new();
    let mut zeta = Vec::new();
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (w, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            fibers[w].push(colors.len());
            colors.push(format!("c{:02}", colors.len()));
            zeta.push(w);
        }
    }
    let mut covers = BTreeMap::new();
    if !sizes_differ_on_orbit {
        for &h in g.generators() {
            let mut images = vec![0; colors.len()];
            for w in 0..n {
                let mut target = fibers[s[h].apply(w)].clone();
                target.shuffle(rng);
                for (k, &c) in fibers[w].iter().enumerate() {
                    images[c] = target[k];
                }
            }
            covers.insert(h, Permutation::from_images(images).unwrap());
        }
    }
    let omega = (0..n).map(|w| format!("w{w}")).collect();
    let given = g.elements().map(|x| (x, s[x].clone())).collect();
    let problem = CoverProblem::new(colors, omega, zeta, g.clone(), given, covers).unwrap();
    RandomCover {
        problem,
        sizes_differ_on_orbit,
    }
}
