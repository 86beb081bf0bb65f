//! The `*`-action of a finite Galois quotient on the based root datum, its
//! effect on the combinatorial invariants of a datum, and the resulting
//! existence verdict for equivariant models.
//!
//! Results are relative to the finite quotient supplied by the user; the
//! action is assumed to be given in diagram-normalized form.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::automorphisms::closure_profile;
use crate::error::{Error, Result};
use crate::lattice::{IntegerMatrix, Sublattice};
use crate::perm::Permutation;
use crate::sphericaldata::{HomogeneousSphericalDatum, OmegaPoint, ValidatedDatum};

/// A finite group given by its Cayley table on `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Checks the group axioms. Without explicit generators, a small
    /// generating set is chosen greedily.
    pub fn new(table: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has length {}, expected {n}", row.len())));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidGroup(format!("entry {x} in row {i} is out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for (a, row) in table.iter().enumerate() {
            let inv = (0..n)
                .find(|&b| row[b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        let mut g = Self {
            table,
            identity,
            inverses,
            generators: Vec::new(),
        };
        g.generators = match generators {
            Some(gens) => {
                if let Some(&x) = gens.iter().find(|&&x| x >= n) {
                    return Err(Error::InvalidGroup(format!("generator {x} is out of range")));
                }
                if g.closure(&gens).len() != n {
                    return Err(Error::InvalidGroup("generators do not generate the group".into()));
                }
                gens
            }
            None => g.greedy_generators(),
        };
        Ok(g)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let gens = if n > 1 { Some(vec![1]) } else { Some(vec![]) };
        Self::new(table, gens).expect("cyclic table")
    }

    /// The permutation group generated by `gens`, all of the same degree.
    /// Element 0 is the identity; generator `i` gets the id it is first
    /// reached at.
    pub fn from_permutations(degree: usize, gens: &[Permutation]) -> Result<(Self, Vec<Permutation>)> {
        if let Some(p) = gens.iter().find(|p| p.len() != degree) {
            return Err(Error::DimensionMismatch {
                expected: degree,
                found: p.len(),
            });
        }
        let mut elems = vec![Permutation::identity(degree)];
        let mut index: BTreeMap<Permutation, usize> = BTreeMap::from([(elems[0].clone(), 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let x = g.compose(&elems[i]);
                if !index.contains_key(&x) {
                    index.insert(x.clone(), elems.len());
                    elems.push(x);
                }
            }
            i += 1;
        }
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&a.compose(b)]).collect())
            .collect();
        let gen_ids = gens.iter().map(|g| index[g]).collect();
        Ok((Self::new(table, Some(gen_ids))?, elems))
    }

    pub fn direct_product(&self, other: &Self) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let mut gens: Vec<usize> = self.generators.iter().map(|&g| g * m + other.identity).collect();
        gens.extend(other.generators.iter().map(|&h| self.identity * m + h));
        Self::new(table, Some(gens)).expect("product of groups")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(g, x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        self.elements().filter(|&x| seen[x]).collect()
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut covered = self.closure(&gens);
        // prefer elements of large order
        let mut candidates: Vec<usize> = self.elements().collect();
        candidates.sort_by_key(|&x| (std::cmp::Reverse(self.element_order(x)), x));
        for x in candidates {
            if covered.binary_search(&x).is_err() {
                gens.push(x);
                covered = self.closure(&gens);
            }
        }
        gens
    }

    /// For each element, a word `(generator, rest)` with
    /// `element = generator * rest`, found breadth-first from the identity.
    fn spanning_tree(&self) -> Vec<Option<(usize, usize)>> {
        let mut parent = vec![None; self.order()];
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in &self.generators {
                let y = self.mul(g, x);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((g, x));
                    queue.push_back(y);
                }
            }
        }
        parent
    }

    /// Elements in breadth-first order from the identity.
    fn bfs_order(&self) -> Vec<usize> {
        let tree = self.spanning_tree();
        let mut order = vec![self.identity];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for y in self.elements() {
                if matches!(tree[y], Some((_, p)) if p == x) {
                    order.push(y);
                }
            }
            i += 1;
        }
        order
    }

    /// Extends values on the generators to every element multiplicatively,
    /// `f(g * x) = mul(f(g), f(x))`. Consistency is not checked.
    pub fn extend_from_generators<T: Clone>(
        &self,
        identity: T,
        on_generator: impl Fn(usize) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> Vec<T> {
        let tree = self.spanning_tree();
        let mut out: Vec<Option<T>> = vec![None; self.order()];
        out[self.identity] = Some(identity);
        for x in self.bfs_order().into_iter().skip(1) {
            let (g, rest) = tree[x].expect("generated");
            let value = mul(&on_generator(g), out[rest].as_ref().expect("parent first"));
            out[x] = Some(value);
        }
        out.into_iter().map(|v| v.expect("every element reached")).collect()
    }

    /// The subgroup on the given elements, renumbered in increasing order.
    /// Returns the group and the map from new ids to old ids.
    pub fn subgroup(&self, elements: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut elems: Vec<usize> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let pos: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut table = Vec::with_capacity(elems.len());
        for &a in &elems {
            let mut row = Vec::with_capacity(elems.len());
            for &b in &elems {
                let c = self.mul(a, b);
                row.push(
                    *pos.get(&c)
                        .ok_or_else(|| Error::InvalidGroup(format!("subset not closed: {a} * {b} = {c}")))?,
                );
            }
            table.push(row);
        }
        Ok((Self::new(table, None)?, elems))
    }

    /// Every subgroup, as sorted element lists.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::from([vec![self.identity]]);
        let mut frontier: Vec<Vec<usize>> = vec![vec![self.identity]];
        while let Some(h) = frontier.pop() {
            for x in self.elements() {
                if h.binary_search(&x).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(x);
                let k = self.closure(&gens);
                if found.insert(k.clone()) {
                    frontier.push(k);
                }
            }
        }
        found.into_iter().collect()
    }

    /// The same group with element `x` renamed `p(x)`.
    pub fn relabel(&self, p: &Permutation) -> Self {
        let n = self.order();
        let inv = p.inverse();
        let table = (0..n)
            .map(|a| (0..n).map(|b| p.apply(self.mul(inv.apply(a), inv.apply(b)))).collect())
            .collect();
        let gens = self.generators.iter().map(|&g| p.apply(g)).collect();
        Self::new(table, Some(gens)).expect("relabeled group")
    }

    /// Checks `f(a b) = f(a) f(b)` on the whole table.
    pub fn check_homomorphism<T: PartialEq>(
        &self,
        values: &[T],
        mul: impl Fn(&T, &T) -> T,
    ) -> std::result::Result<(), (usize, usize)> {
        for a in self.elements() {
            for b in self.elements() {
                if values[self.mul(a, b)] != mul(&values[a], &values[b]) {
                    return Err((a, b));
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GroupWire {
    order: usize,
    cayley: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    identity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<usize>>,
}

impl GroupWire {
    fn build(self) -> Result<FiniteGroup> {
        if self.cayley.len() != self.order {
            return Err(Error::InvalidGroup(format!(
                "order is {} but the table has {} rows",
                self.order,
                self.cayley.len()
            )));
        }
        let g = FiniteGroup::new(self.cayley, self.generators)?;
        if let Some(e) = self.identity {
            if e != g.identity() {
                return Err(Error::InvalidGroup(format!(
                    "declared identity {e} but the table's identity is {}",
                    g.identity()
                )));
            }
        }
        Ok(g)
    }

    fn of(g: &FiniteGroup) -> Self {
        Self {
            order: g.order(),
            cayley: g.table.clone(),
            identity: Some(g.identity),
            generators: Some(g.generators.clone()),
        }
    }
}

impl FiniteGroup {
    pub fn from_json(s: &str) -> Result<Self> {
        let wire: GroupWire = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        wire.build()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GroupWire::of(self)).expect("group serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ActionWire {
    #[serde(flatten)]
    group: GroupWire,
    #[serde(default, with = "crate::exact", skip_serializing_if = "Option::is_none")]
    eps: Option<BTreeMap<String, Vec<Vec<BigInt>>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    color_perms: BTreeMap<String, BTreeMap<String, String>>,
}

/// `epsilon: Gamma -> GL(X*(T))`, plus optional explicit color
/// permutations for elements that swap two-color fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisAction {
    group: FiniteGroup,
    /// `None` is the trivial action in any rank.
    eps: Option<Vec<IntegerMatrix>>,
    color_perms: BTreeMap<usize, BTreeMap<String, String>>,
}

fn element_key(group: &FiniteGroup, key: &str) -> Result<usize> {
    let x: usize = key
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("element id {key:?} is not a number")))?;
    if x >= group.order() {
        return Err(Error::InvalidGroup(format!("element id {x} is out of range")));
    }
    Ok(x)
}

impl GaloisAction {
    pub fn trivial(group: FiniteGroup) -> Self {
        Self {
            group,
            eps: None,
            color_perms: BTreeMap::new(),
        }
    }

    /// `eps` may list every element or only the generators; missing
    /// elements are filled in multiplicatively and the result is checked
    /// against the whole table.
    pub fn new(
        group: FiniteGroup,
        eps: BTreeMap<usize, IntegerMatrix>,
        color_perms: BTreeMap<usize, BTreeMap<String, String>>,
    ) -> Result<Self> {
        if let Some(&x) = eps.keys().chain(color_perms.keys()).find(|&&x| x >= group.order()) {
            return Err(Error::InvalidGroup(format!("element id {x} is out of range")));
        }
        let eps = if eps.is_empty() {
            None
        } else {
            let n = eps.values().next().expect("nonempty").rows();
            for (&g, m) in &eps {
                if m.rows() != n || m.cols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: if m.rows() != n { m.rows() } else { m.cols() },
                    });
                }
                if !m.is_unimodular() {
                    return Err(Error::NotLatticeAutomorphism { element: g });
                }
            }
            if let Some(m) = eps.get(&group.identity()) {
                if !m.is_identity() {
                    return Err(Error::NotHomomorphism("the identity element acts nontrivially".into()));
                }
            }
            let full = group.extend_from_generators(
                IntegerMatrix::identity(n),
                |g| eps.get(&g).cloned().unwrap_or_else(|| IntegerMatrix::identity(n)),
                |a, b| a * b,
            );
            for (&g, m) in &eps {
                if &full[g] != m {
                    return Err(Error::NotHomomorphism(format!(
                        "matrix given for element {g} is not the product of the generator matrices"
                    )));
                }
            }
            if let Err((a, b)) = group.check_homomorphism(&full, |x, y| x * y) {
                return Err(Error::NotHomomorphism(format!("eps({a} * {b}) != eps({a}) eps({b})")));
            }
            Some(full)
        };
        Ok(Self {
            group,
            eps,
            color_perms,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: ActionWire = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let group = wire.group.build()?;
        let mut eps = BTreeMap::new();
        for (k, rows) in wire.eps.unwrap_or_default() {
            let m = IntegerMatrix::from_rows(&rows)?;
            eps.insert(element_key(&group, &k)?, m);
        }
        let mut perms = BTreeMap::new();
        for (k, v) in wire.color_perms {
            perms.insert(element_key(&group, &k)?, v);
        }
        Self::new(group, eps, perms)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let wire = ActionWire {
            group: GroupWire::of(&self.group),
            eps: self.eps.as_ref().map(|ms| {
                ms.iter()
                    .enumerate()
                    .map(|(g, m)| (g.to_string(), m.to_rows()))
                    .collect()
            }),
            color_perms: self
                .color_perms
                .iter()
                .map(|(g, p)| (g.to_string(), p.clone()))
                .collect(),
        };
        serde_json::to_value(wire).expect("action serializes")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Rank of the eps matrices, if any are given.
    pub fn rank(&self) -> Option<usize> {
        self.eps.as_ref().map(|ms| ms[0].rows())
    }

    pub fn eps(&self, g: usize, rank: usize) -> IntegerMatrix {
        match &self.eps {
            Some(ms) => ms[g].clone(),
            None => IntegerMatrix::identity(rank),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.eps.as_ref().is_none_or(|ms| ms.iter().all(IntegerMatrix::is_identity))
    }

    pub fn has_color_perms(&self) -> bool {
        !self.color_perms.is_empty()
    }

    /// Explicit color permutations resolved against the datum's colors, for
    /// every element. `None` when no permutation was supplied. Generators
    /// without an entry act trivially on colors.
    pub fn color_permutations(&self, d: &HomogeneousSphericalDatum) -> Result<Option<Vec<Permutation>>> {
        if self.color_perms.is_empty() {
            return Ok(None);
        }
        let n = d.colors.len();
        let mut given = BTreeMap::new();
        for (&g, map) in &self.color_perms {
            let mut images: Vec<usize> = (0..n).collect();
            for (from, to) in map {
                let i = d.color_index(from).ok_or_else(|| Error::UnknownColor(from.clone()))?;
                let j = d.color_index(to).ok_or_else(|| Error::UnknownColor(to.clone()))?;
                images[i] = j;
            }
            let p = Permutation::from_images(images).ok_or_else(|| Error::InconsistentCover {
                element: g,
                reason: "color map is not a bijection".into(),
            })?;
            given.insert(g, p);
        }
        let full = self.group.extend_from_generators(
            Permutation::identity(n),
            |g| given.get(&g).cloned().unwrap_or_else(|| Permutation::identity(n)),
            |a, b| a.compose(b),
        );
        for (&g, p) in &given {
            if &full[g] != p {
                return Err(Error::NotHomomorphism(format!(
                    "color permutation given for element {g} is not the product of the generator permutations"
                )));
            }
        }
        if let Err((a, b)) = self.group.check_homomorphism(&full, |x, y| x.compose(y)) {
            return Err(Error::NotHomomorphism(format!("color permutations fail at {a} * {b}")));
        }
        Ok(Some(full))
    }

    /// The action restricted to a subgroup (given by element ids of this
    /// group), renumbered as in [`FiniteGroup::subgroup`].
    pub fn restrict(&self, elements: &[usize]) -> Result<Self> {
        let (sub, old) = self.group.subgroup(elements)?;
        let eps = match &self.eps {
            Some(ms) => old.iter().enumerate().map(|(i, &g)| (i, ms[g].clone())).collect(),
            None => BTreeMap::new(),
        };
        let perms = old
            .iter()
            .enumerate()
            .filter_map(|(i, g)| self.color_perms.get(g).map(|p| (i, p.clone())))
            .collect();
        Self::new(sub, eps, perms)
    }
}

/// How a single element acts on the datum's lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementAction {
    pub element: usize,
    pub matrix: IntegerMatrix,
    /// Induced permutation of the simple roots (by index).
    pub root_perm: Permutation,
    /// Matrix `E` with `eps (W c) = W (E c)` in weight coordinates, when the
    /// weight lattice is stable; and its inverse.
    pub on_weights: Option<(IntegerMatrix, IntegerMatrix)>,
}

impl ElementAction {
    pub fn new(d: &HomogeneousSphericalDatum, a: &GaloisAction, g: usize) -> Result<Self> {
        if let Some(r) = a.rank() {
            if r != d.ambient_rank {
                return Err(Error::DimensionMismatch {
                    expected: d.ambient_rank,
                    found: r,
                });
            }
        }
        let m = a.eps(g, d.ambient_rank);
        let mut images = Vec::with_capacity(d.simple_roots.len());
        for root in &d.simple_roots {
            let image = m.mul_vec(&root.vector)?;
            let j = d
                .simple_roots
                .iter()
                .position(|r| r.vector == image)
                .ok_or_else(|| Error::NotDiagramAction {
                    element: g,
                    reason: format!("simple root {} is sent outside the set of simple roots", root.label),
                })?;
            images.push(j);
        }
        let root_perm = Permutation::from_images(images).ok_or_else(|| Error::NotDiagramAction {
            element: g,
            reason: "two simple roots have the same image".into(),
        })?;
        for (i, coroot) in d.simple_coroots.iter().enumerate() {
            let j = root_perm.apply(i);
            if m.vec_mul(&d.simple_coroots[j])? != *coroot {
                return Err(Error::NotDiagramAction {
                    element: g,
                    reason: format!(
                        "coroot of {} is not carried to the coroot of {}",
                        d.simple_roots[i].label, d.simple_roots[j].label
                    ),
                });
            }
        }
        let on_weights = weight_action(d, &m)?;
        Ok(Self {
            element: g,
            matrix: m,
            root_perm,
            on_weights,
        })
    }

    /// `eps` on a weight (in weight coordinates).
    pub fn on_weight(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let (e, _) = self.on_weights.as_ref()?;
        e.mul_vec(x).ok()
    }

    /// Contragredient action `v -> v o eps^{-1}` on functionals (values on
    /// the weight basis).
    pub fn on_functional(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let (_, inv) = self.on_weights.as_ref()?;
        let r = inv.rows();
        Some(
            (0..r)
                .map(|j| {
                    (0..r)
                        .map(|k| &v[k] * BigRational::from_integer(inv[(k, j)].clone()))
                        .fold(BigRational::zero(), |acc, t| acc + t)
                })
                .collect(),
        )
    }

    pub fn on_labels(&self, d: &HomogeneousSphericalDatum, labels: &BTreeSet<String>) -> BTreeSet<String> {
        labels
            .iter()
            .map(|l| {
                let i = d.root_index(l).expect("labels name simple roots");
                d.simple_roots[self.root_perm.apply(i)].label.clone()
            })
            .collect()
    }

    pub fn on_point(&self, d: &HomogeneousSphericalDatum, p: &OmegaPoint) -> Option<OmegaPoint> {
        Some(OmegaPoint {
            rho_value: self.on_functional(&p.rho_value)?,
            moved_by: self.on_labels(d, &p.moved_by),
        })
    }
}

fn weight_action(d: &HomogeneousSphericalDatum, m: &IntegerMatrix) -> Result<Option<(IntegerMatrix, IntegerMatrix)>> {
    let images: Vec<Vec<BigInt>> = d
        .weight_basis
        .iter()
        .map(|w| m.mul_vec(w))
        .collect::<Result<_>>()?;
    if Sublattice::new(d.ambient_rank, &images)? != Sublattice::new(d.ambient_rank, &d.weight_basis)? {
        return Ok(None);
    }
    let columns: Vec<Vec<BigInt>> = images
        .iter()
        .map(|x| d.to_weight_coords(x).expect("image lies in the weight lattice"))
        .collect();
    let e = IntegerMatrix::from_columns(d.weight_rank(), &columns)?;
    let inv = e.unimodular_inverse().expect("basis change between equal lattices");
    Ok(Some((e, inv)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementFlags {
    pub element: usize,
    pub weight_lattice: bool,
    pub spherical_roots: bool,
    pub omega1: bool,
    pub omega2: bool,
}

impl ElementFlags {
    pub fn all(&self) -> bool {
        self.weight_lattice && self.spherical_roots && self.omega1 && self.omega2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub elements: Vec<ElementFlags>,
}

impl PreservationReport {
    pub fn all_preserved(&self) -> bool {
        self.elements.iter().all(ElementFlags::all)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.elements.iter().find(|f| !f.all()).map(|f| f.element)
    }
}

fn flags(d: &ValidatedDatum, ea: &ElementAction) -> ElementFlags {
    let datum = d.datum();
    let omega = d.omega_decomposition();
    let Some(_) = ea.on_weights else {
        return ElementFlags {
            element: ea.element,
            weight_lattice: false,
            spherical_roots: false,
            omega1: false,
            omega2: false,
        };
    };
    let sigma: BTreeSet<&Vec<BigInt>> = datum.spherical_roots.iter().collect();
    let moved: Option<BTreeSet<Vec<BigInt>>> = datum.spherical_roots.iter().map(|g| ea.on_weight(g)).collect();
    let spherical_roots = moved.is_some_and(|m| m.iter().collect::<BTreeSet<_>>() == sigma);
    let image = |set: &BTreeSet<OmegaPoint>| -> Option<BTreeSet<OmegaPoint>> {
        set.iter().map(|p| ea.on_point(datum, p)).collect()
    };
    ElementFlags {
        element: ea.element,
        weight_lattice: true,
        spherical_roots,
        omega1: image(&omega.omega1).as_ref() == Some(&omega.omega1),
        omega2: image(&omega.omega2).as_ref() == Some(&omega.omega2),
    }
}

/// Flags for every element of the group.
pub fn preserves_invariants(d: &ValidatedDatum, a: &GaloisAction) -> Result<PreservationReport> {
    preserves_invariants_on(d, a, &a.group().elements().collect::<Vec<_>>())
}

/// Flags for the listed elements only.
pub fn preserves_invariants_on(d: &ValidatedDatum, a: &GaloisAction, elements: &[usize]) -> Result<PreservationReport> {
    let mut out = Vec::with_capacity(elements.len());
    for &g in elements {
        let ea = ElementAction::new(d.datum(), a, g)?;
        out.push(flags(d, &ea));
    }
    Ok(PreservationReport { elements: out })
}

/// The action `s` of the group on `Omega`, once invariants are preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaAction {
    /// All points of `Omega`, sorted.
    pub points: Vec<OmegaPoint>,
    /// `s_gamma` on `points`, one per group element.
    pub s: Vec<Permutation>,
}

impl OmegaAction {
    pub fn compute(d: &ValidatedDatum, a: &GaloisAction) -> Result<Self> {
        let report = preserves_invariants(d, a)?;
        if let Some(g) = report.first_failure() {
            return Err(Error::InvariantsNotPreserved { element: g });
        }
        let datum = d.datum();
        let points: Vec<OmegaPoint> = d.omega_decomposition().fibers.keys().cloned().collect();
        let index: BTreeMap<&OmegaPoint, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut s = Vec::with_capacity(a.group().order());
        for g in a.group().elements() {
            let ea = ElementAction::new(datum, a, g)?;
            let images: Vec<usize> = points
                .iter()
                .map(|p| {
                    let q = ea.on_point(datum, p).expect("weight lattice is stable");
                    index.get(&q).copied().ok_or(Error::InvariantsNotPreserved { element: g })
                })
                .collect::<Result<_>>()?;
            s.push(Permutation::from_images(images).ok_or(Error::InvariantsNotPreserved { element: g })?);
        }
        Ok(Self { points, s })
    }

    /// Restriction to the two-color points.
    pub fn on_omega2(&self, d: &ValidatedDatum) -> (Vec<OmegaPoint>, Vec<Permutation>) {
        let omega2 = &d.omega_decomposition().omega2;
        let keep: Vec<usize> = (0..self.points.len()).filter(|&i| omega2.contains(&self.points[i])).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let pts = keep.iter().map(|&i| self.points[i].clone()).collect();
        let perms = self
            .s
            .iter()
            .map(|p| Permutation::from_images(keep.iter().map(|&i| pos[&p.apply(i)]).collect()).expect("omega2 is stable"))
            .collect();
        (pts, perms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaOrbit {
    pub points: Vec<OmegaPoint>,
    /// The least point of the orbit.
    pub base: OmegaPoint,
    /// Element ids fixing `base`.
    pub stabilizer: Vec<usize>,
}

/// Orbits on an abstract set permuted by a group, base points being the
/// least index of each orbit.
pub fn orbits_of(group: &FiniteGroup, s: &[Permutation], size: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut seen = vec![false; size];
    let mut out = Vec::new();
    for base in 0..size {
        if seen[base] {
            continue;
        }
        let mut orbit: Vec<usize> = group.elements().map(|g| s[g].apply(base)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &x in &orbit {
            seen[x] = true;
        }
        let stabilizer = group.elements().filter(|&g| s[g].apply(base) == base).collect();
        out.push((orbit, stabilizer));
    }
    out
}

/// Orbits of the group on `Omega^(2)` with the stabilizer of each base point.
pub fn s_action_orbits(d: &ValidatedDatum, a: &GaloisAction) -> Result<Vec<OmegaOrbit>> {
    let (points, s) = OmegaAction::compute(d, a)?.on_omega2(d);
    Ok(orbits_of(a.group(), &s, points.len())
        .into_iter()
        .map(|(orbit, stabilizer)| OmegaOrbit {
            base: points[orbit[0]].clone(),
            points: orbit.iter().map(|&i| points[i].clone()).collect(),
            stabilizer,
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NoEquivariantModel,
    ExistsUnique,
    Exists,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::NoEquivariantModel => "NoEquivariantModel",
            Verdict::ExistsUnique => "ExistsUnique",
            Verdict::Exists => "Exists",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn has_model(&self) -> bool {
        matches!(self, Verdict::Exists | Verdict::ExistsUnique)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const REASON_NOT_PRESERVED: &str =
    "necessary condition fails: some eps_gamma does not preserve the weight lattice, the spherical roots, Omega(1) and Omega(2)";
pub const REASON_SELF_NORMALIZING: &str =
    "invariants preserved and H self-normalizing: a model exists and is unique up to unique isomorphism";
pub const REASON_SPHERICALLY_CLOSED: &str = "invariants preserved and H spherically closed: a model exists";
pub const REASON_INCONCLUSIVE: &str =
    "invariants preserved but H not spherically closed: the criterion does not decide existence";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExistenceVerdict {
    pub verdict: Verdict,
    pub reason: String,
    /// Order of the finite Galois quotient the verdict refers to.
    pub quotient_order: usize,
}

/// Errors only when the action itself is malformed for this datum.
pub fn existence_verdict(d: &ValidatedDatum, a: &GaloisAction) -> Result<ExistenceVerdict> {
    let report = preserves_invariants(d, a)?;
    let closure = closure_profile(d)?;
    let (verdict, reason) = if !report.all_preserved() {
        (Verdict::NoEquivariantModel, REASON_NOT_PRESERVED)
    } else if closure.self_normalizing {
        (Verdict::ExistsUnique, REASON_SELF_NORMALIZING)
    } else if closure.spherically_closed {
        (Verdict::Exists, REASON_SPHERICALLY_CLOSED)
    } else {
        (Verdict::Inconclusive, REASON_INCONCLUSIVE)
    };
    Ok(ExistenceVerdict {
        verdict,
        reason: reason.into(),
        quotient_order: a.group().order(),
    })
}
