//! Counting equivariant models through `H^1(Gamma, Aut_Omega(D))`, a
//! brute-force cocycle count to check it against, and lifting an action on
//! `Omega` to an action on the colors.
//!
//! `Aut_Omega(D)` is `prod S_2` over the two-color points; as a Galois module
//! it is `Map(Omega^(2), Z/2)` with the group permuting coordinates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{existence_verdict, orbits_of, FiniteGroup, GaloisAction, OmegaAction};
use crate::perm::Permutation;
use crate::sphericaldata::{OmegaPoint, ValidatedDatum};

/// `Map(I, Z/2)` for a finite index set `I` permuted by a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedTwoModule {
    size: usize,
    action: Vec<Permutation>,
}

impl InducedTwoModule {
    /// `action[g]` is the permutation of `0..size` by element `g`.
    pub fn new(group: &FiniteGroup, size: usize, action: Vec<Permutation>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                found: action.len(),
            });
        }
        if let Some(p) = action.iter().find(|p| p.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: p.len(),
            });
        }
        if let Err((a, b)) = group.check_homomorphism(&action, |x, y| x.compose(y)) {
            return Err(Error::NotHomomorphism(format!("index action fails at {a} * {b}")));
        }
        Ok(Self { size, action })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn action(&self) -> &[Permutation] {
        &self.action
    }

    /// `g . m` for `m` a bitmask: coordinate `i` moves to `g(i)`.
    pub fn act(&self, g: usize, m: u32) -> u32 {
        (0..self.size)
            .filter(|&i| m >> i & 1 == 1)
            .fold(0, |acc, i| acc | 1 << self.action[g].apply(i))
    }
}

/// `|Hom(G, Z/2)|`, by trying every assignment of signs to the generators.
pub fn hom_to_2(g: &FiniteGroup) -> u64 {
    let gens = g.generators();
    let mut count = 0;
    for bits in 0u64..1 << gens.len() {
        let value = |x: usize| {
            let k = gens.iter().position(|&h| h == x).expect("generator");
            (bits >> k & 1) as u8
        };
        let f = g.extend_from_generators(0u8, value, |a, b| a ^ b);
        if gens.iter().enumerate().all(|(k, &h)| f[h] == (bits >> k & 1) as u8)
            && g.check_homomorphism(&f, |a, b| a ^ b).is_ok()
        {
            count += 1;
        }
    }
    count
}

pub const MAX_ORACLE_GROUP: usize = 12;
pub const MAX_ORACLE_MODULE: usize = 6;

/// `|Z^1| / |B^1|` by enumeration. A cocycle is fixed by its values on the
/// generators, so candidates are generator assignments extended by the
/// cocycle rule and then checked on the whole table.
pub fn h1_bruteforce(m: &InducedTwoModule, g: &FiniteGroup) -> Result<u64> {
    if g.order() > MAX_ORACLE_GROUP || m.size() > MAX_ORACLE_MODULE {
        return Err(Error::TooLarge(format!(
            "group of order {} on {} coordinates (limits {MAX_ORACLE_GROUP} and {MAX_ORACLE_MODULE})",
            g.order(),
            m.size()
        )));
    }
    let gens = g.generators();
    let module = 1u64 << m.size();
    let candidates = module
        .checked_pow(gens.len() as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::TooLarge(format!("{} generators on {} coordinates", gens.len(), m.size())))?;
    let mut cocycles: u64 = 0;
    for code in 0..candidates {
        let on_gen = |x: usize| {
            let k = gens.iter().position(|&h| h == x).expect("generator") as u32;
            ((code / module.pow(k)) % module) as u32
        };
        // z(h x) = z(h) + h . z(x)
        let mut z = vec![None; g.order()];
        z[g.identity()] = Some(0u32);
        let mut changed = true;
        while changed {
            changed = false;
            for x in g.elements() {
                let Some(zx) = z[x] else { continue };
                for &h in gens {
                    let y = g.mul(h, x);
                    if z[y].is_none() {
                        z[y] = Some(on_gen(h) ^ m.act(h, zx));
                        changed = true;
                    }
                }
            }
        }
        let z: Vec<u32> = z.into_iter().map(|v| v.expect("generated")).collect();
        let is_cocycle = gens.iter().all(|&h| z[h] == on_gen(h))
            && g.elements().all(|a| g.elements().all(|b| z[g.mul(a, b)] == z[a] ^ m.act(a, z[b])));
        if is_cocycle {
            cocycles += 1;
        }
    }
    let coboundaries: BTreeSet<Vec<u32>> = (0..1u32 << m.size())
        .map(|x| g.elements().map(|a| x ^ m.act(a, x)).collect())
        .collect();
    Ok(cocycles / coboundaries.len() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitFactor {
    pub base: OmegaPoint,
    pub orbit_size: usize,
    pub stabilizer: Vec<usize>,
    /// `|Hom(Gamma_i, Z/2)|`.
    pub factor: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub count: u64,
    pub factors: Vec<OrbitFactor>,
    pub note: String,
}

/// `(orbit, stabilizer, |Hom(stabilizer, Z/2)|)`.
pub type OrbitCount = (Vec<usize>, Vec<usize>, u64);

/// `prod |Hom(Gamma_i, Z/2)|` over orbits of a group acting on `0..size`,
/// with the factor of each orbit.
pub fn count_from_action(group: &FiniteGroup, s: &[Permutation], size: usize) -> Result<(u64, Vec<OrbitCount>)> {
    InducedTwoModule::new(group, size, s.to_vec())?;
    let mut total: u64 = 1;
    let mut out = Vec::new();
    for (orbit, stabilizer) in orbits_of(group, s, size) {
        let (sub, _) = group.subgroup(&stabilizer)?;
        let factor = hom_to_2(&sub);
        total = total
            .checked_mul(factor)
            .ok_or_else(|| Error::TooLarge("model count exceeds 64 bits".into()))?;
        out.push((orbit, stabilizer, factor));
    }
    Ok((total, out))
}

/// Number of equivariant models up to isomorphism, relative to the finite
/// quotient carried by `a`. Only defined when a model is known to exist.
pub fn count_models(d: &ValidatedDatum, a: &GaloisAction) -> Result<CountReport> {
    let verdict = existence_verdict(d, a)?.verdict;
    if !verdict.has_model() {
        return Err(Error::CountUndefined(verdict.to_string()));
    }
    let (points, s) = OmegaAction::compute(d, a)?.on_omega2(d);
    let (count, orbits) = count_from_action(a.group(), &s, points.len())?;
    let factors = orbits
        .into_iter()
        .map(|(orbit, stabilizer, factor)| OrbitFactor {
            base: points[orbit[0]].clone(),
            orbit_size: orbit.len(),
            stabilizer,
            factor,
        })
        .collect();
    Ok(CountReport {
        count,
        factors,
        note: format!(
            "classes form a principal homogeneous space under prod Hom(Gamma_i, Z/2); \
             count taken for the finite Galois quotient of order {}",
            a.group().order()
        ),
    })
}

/// A permutation problem over a map `zeta: D -> Omega`: an action `s` on
/// `Omega` and permutations of `D` covering it for (at least) the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverProblem {
    pub colors: Vec<String>,
    pub omega: Vec<String>,
    /// `zeta[c]` is the index in `omega` of color `c`.
    pub zeta: Vec<usize>,
    pub group: FiniteGroup,
    /// `s[g]` on `omega`, for every element.
    pub s: Vec<Permutation>,
    pub covers: BTreeMap<usize, Permutation>,
}

#[derive(Serialize, Deserialize)]
struct CoverWire {
    colors: Vec<String>,
    zeta: BTreeMap<String, String>,
    order: usize,
    cayley: Vec<Vec<usize>>,
    #[serde(default)]
    generators: Option<Vec<usize>>,
    #[serde(default)]
    s: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    covers: BTreeMap<String, BTreeMap<String, String>>,
}

fn parse_element(group: &FiniteGroup, key: &str) -> Result<usize> {
    let x: usize = key
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("element id {key:?} is not a number")))?;
    if x >= group.order() {
        return Err(Error::InvalidGroup(format!("element id {x} is out of range")));
    }
    Ok(x)
}

fn named_permutation(
    names: &[String],
    map: &BTreeMap<String, String>,
    unknown: impl Fn(&str) -> Error,
    not_bijective: impl FnOnce() -> Error,
) -> Result<Permutation> {
    let index = |n: &str| names.iter().position(|x| x == n).ok_or_else(|| unknown(n));
    let mut images: Vec<usize> = (0..names.len()).collect();
    for (from, to) in map {
        images[index(from)?] = index(to)?;
    }
    Permutation::from_images(images).ok_or_else(not_bijective)
}

impl CoverProblem {
    /// `s` may be given on all elements or only on generators; it is
    /// extended multiplicatively and checked to be a homomorphism.
    pub fn new(
        colors: Vec<String>,
        omega: Vec<String>,
        zeta: Vec<usize>,
        group: FiniteGroup,
        s_given: BTreeMap<usize, Permutation>,
        covers: BTreeMap<usize, Permutation>,
    ) -> Result<Self> {
        if zeta.len() != colors.len() {
            return Err(Error::DimensionMismatch {
                expected: colors.len(),
                found: zeta.len(),
            });
        }
        let n = omega.len();
        if let Some(p) = s_given.values().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if let Some(p) = covers.values().find(|p| p.len() != colors.len()) {
            return Err(Error::DimensionMismatch {
                expected: colors.len(),
                found: p.len(),
            });
        }
        let s = group.extend_from_generators(
            Permutation::identity(n),
            |g| s_given.get(&g).cloned().unwrap_or_else(|| Permutation::identity(n)),
            |a, b| a.compose(b),
        );
        for (&g, p) in &s_given {
            if &s[g] != p {
                return Err(Error::NotHomomorphism(format!(
                    "s given for element {g} is not the product of the generator images"
                )));
            }
        }
        if let Err((a, b)) = group.check_homomorphism(&s, |x, y| x.compose(y)) {
            return Err(Error::NotHomomorphism(format!("s fails at {a} * {b}")));
        }
        Ok(Self {
            colors,
            omega,
            zeta,
            group,
            s,
            covers,
        })
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let wire: CoverWire = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        if wire.cayley.len() != wire.order {
            return Err(Error::InvalidGroup(format!(
                "order is {} but the table has {} rows",
                wire.order,
                wire.cayley.len()
            )));
        }
        let group = FiniteGroup::new(wire.cayley, wire.generators)?;
        let omega: Vec<String> = wire.zeta.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut zeta = Vec::with_capacity(wire.colors.len());
        for c in &wire.colors {
            let w = wire.zeta.get(c).ok_or_else(|| Error::UnknownColor(c.clone()))?;
            zeta.push(omega.iter().position(|x| x == w).expect("collected"));
        }
        if let Some(c) = wire.zeta.keys().find(|c| !wire.colors.contains(c)) {
            return Err(Error::UnknownColor(c.clone()));
        }
        let mut s = BTreeMap::new();
        for (k, map) in &wire.s {
            let g = parse_element(&group, k)?;
            let p = named_permutation(
                &omega,
                map,
                |n| Error::Parse(format!("unknown point {n:?} of Omega")),
                || Error::NotHomomorphism(format!("s for element {g} is not a bijection")),
            )?;
            s.insert(g, p);
        }
        let mut covers = BTreeMap::new();
        for (k, map) in &wire.covers {
            let g = parse_element(&group, k)?;
            let p = named_permutation(
                &wire.colors,
                map,
                |n| Error::UnknownColor(n.to_string()),
                || Error::InconsistentCover {
                    element: g,
                    reason: "not a bijection".into(),
                },
            )?;
            covers.insert(g, p);
        }
        Self::new(wire.colors, omega, zeta, group, s, covers)
    }

    /// The problem attached to a datum and an action preserving its
    /// invariants. `covers` are color permutations by element.
    pub fn from_datum(d: &ValidatedDatum, a: &GaloisAction, covers: BTreeMap<usize, Permutation>) -> Result<Self> {
        let oa = OmegaAction::compute(d, a)?;
        let datum = d.datum();
        let omega_names: Vec<String> = oa.points.iter().map(ToString::to_string).collect();
        let zeta = datum
            .colors
            .iter()
            .map(|c| {
                let p = &d.omega_decomposition().zeta[&c.name];
                oa.points.iter().position(|q| q == p).expect("zeta lands in Omega")
            })
            .collect();
        let given = a.group().elements().map(|g| (g, oa.s[g].clone())).collect();
        Self::new(datum.color_names(), omega_names, zeta, a.group().clone(), given, covers)
    }

    /// Colors of each fiber, sorted by name.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.omega.len()];
        for (c, &w) in self.zeta.iter().enumerate() {
            out[w].push(c);
        }
        for f in &mut out {
            f.sort_by(|&a, &b| self.colors[a].cmp(&self.colors[b]));
        }
        out
    }

    /// The permutation of colors sending the `i`-th color of each fiber to
    /// the `i`-th color of its image fiber under `s[g]`.
    pub fn matching(&self, g: usize) -> Result<Permutation> {
        let fibers = self.fibers();
        let mut images = vec![0; self.colors.len()];
        for (w, fiber) in fibers.iter().enumerate() {
            let target = &fibers[self.s[g].apply(w)];
            if target.len() != fiber.len() {
                return Err(self.mismatch(w, self.s[g].apply(w), &fibers));
            }
            for (i, &c) in fiber.iter().enumerate() {
                images[c] = target[i];
            }
        }
        Ok(Permutation::from_images(images).expect("fibers partition the colors"))
    }

    fn mismatch(&self, a: usize, b: usize, fibers: &[Vec<usize>]) -> Error {
        Error::FiberMismatch {
            a: self.omega[a].clone(),
            size_a: fibers[a].len(),
            b: self.omega[b].clone(),
            size_b: fibers[b].len(),
        }
    }

    /// Whether `zeta o m = s_g o zeta`.
    pub fn covers_s(&self, g: usize, m: &Permutation) -> bool {
        (0..self.colors.len()).all(|c| self.zeta[m.apply(c)] == self.s[g].apply(self.zeta[c]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftResult {
    /// `m'_gamma` for every element.
    pub m_prime: Vec<Permutation>,
    /// `a_gamma = m'_gamma o m_gamma^{-1}` for every supplied cover.
    pub corrections: BTreeMap<usize, Permutation>,
}

impl LiftResult {
    pub fn to_json_value(&self, p: &CoverProblem) -> serde_json::Value {
        let show = |q: &Permutation| q.display_with(&p.colors);
        serde_json::json!({
            "m_prime": self.m_prime.iter().enumerate().map(|(g, q)| (g.to_string(), show(q))).collect::<BTreeMap<_, _>>(),
            "corrections": self.corrections.iter().map(|(g, q)| (g.to_string(), show(q))).collect::<BTreeMap<_, _>>(),
        })
    }
}

/// A homomorphism `m'` into the color permutations covering `s`, trivial
/// on `ker s`, built from name-ordered labelings of the fibers.
pub fn lift_cover(p: &CoverProblem) -> Result<LiftResult> {
    let fibers = p.fibers();
    for (orbit, _) in orbits_of(&p.group, &p.s, p.omega.len()) {
        let base = orbit[0];
        if let Some(&w) = orbit.iter().find(|&&w| fibers[w].len() != fibers[base].len()) {
            return Err(p.mismatch(base, w, &fibers));
        }
    }
    if let Some(&g) = p.group.generators().iter().find(|g| !p.covers.contains_key(g)) {
        return Err(Error::MissingCover { generator: g });
    }
    for (&g, m) in &p.covers {
        if !p.covers_s(g, m) {
            return Err(Error::InconsistentCover {
                element: g,
                reason: "zeta o m differs from s o zeta".into(),
            });
        }
    }
    let m_prime: Vec<Permutation> = p.group.elements().map(|g| p.matching(g)).collect::<Result<_>>()?;
    let corrections = p
        .covers
        .iter()
        .map(|(&g, m)| (g, m_prime[g].compose(&m.inverse())))
        .collect();
    Ok(LiftResult { m_prime, corrections })
}
