//! Finite groupoids stored extensionally.
//!
//! A groupoid is a set of objects together with invertible morphisms
//! `α: x → y` and a partial composition `β∘α`, defined exactly when the
//! target of `α` is the source of `β`. Composition is kept as an explicit
//! table so every axiom can be checked exhaustively by [`FiniteGroupoid::verify_axioms`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MorphismId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for MorphismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A morphism `id: source → target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub id: MorphismId,
    pub source: ObjectId,
    pub target: ObjectId,
}

/// Outcome of composing two morphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    Morphism(MorphismId),
    /// The pair is not composable (`t(α) ≠ s(β)`).
    NotComposable,
}

impl Composition {
    pub fn morphism(self) -> Option<MorphismId> {
        match self {
            Composition::Morphism(m) => Some(m),
            Composition::NotComposable => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupoidDoc", into = "GroupoidDoc")]
pub struct FiniteGroupoid {
    object_count: usize,
    morphisms: Vec<Morphism>,
    /// `(β, α) ↦ β∘α`.
    composition: BTreeMap<(MorphismId, MorphismId), MorphismId>,
    units: Vec<MorphismId>,
    inverses: Vec<MorphismId>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from raw tables.
    ///
    /// Only index ranges are validated here. Axioms are not: a table that
    /// violates them is still accepted so that [`Self::verify_axioms`] can
    /// report the violation.
    pub fn from_tables<I>(
        object_count: usize,
        endpoints: &[(ObjectId, ObjectId)],
        composition: I,
        units: Vec<MorphismId>,
        inverses: Vec<MorphismId>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = ((MorphismId, MorphismId), MorphismId)>,
    {
        if object_count == 0 {
            return Err(Error::EmptyGroupoid);
        }
        let count = endpoints.len();
        let morphisms = endpoints
            .iter()
            .enumerate()
            .map(|(i, &(source, target))| {
                check_object(source, object_count)?;
                check_object(target, object_count)?;
                Ok(Morphism {
                    id: MorphismId(i),
                    source,
                    target,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = BTreeMap::new();
        for ((b, a), c) in composition {
            for m in [a, b, c] {
                check_morphism(m, count)?;
            }
            if table.insert((b, a), c).is_some() {
                return Err(Error::InvalidInput(format!(
                    "composition of {b} after {a} listed twice"
                )));
            }
        }
        if units.len() != object_count {
            return Err(Error::InvalidInput(format!(
                "expected {object_count} unit morphisms, got {}",
                units.len()
            )));
        }
        if inverses.len() != count {
            return Err(Error::InvalidInput(format!(
                "expected {count} inverses, got {}",
                inverses.len()
            )));
        }
        for &m in units.iter().chain(&inverses) {
            check_morphism(m, count)?;
        }
        Ok(Self {
            object_count,
            morphisms,
            composition: table,
            units,
            inverses,
        })
    }

    pub fn object_count(&self) -> usize {
        self.object_count
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.object_count).map(ObjectId)
    }

    pub fn morphism(&self, id: MorphismId) -> Result<Morphism> {
        self.morphisms
            .get(id.0)
            .copied()
            .ok_or(Error::InvalidMorphism {
                index: id.0,
                count: self.morphisms.len(),
            })
    }

    pub fn source(&self, id: MorphismId) -> ObjectId {
        self.morphisms[id.0].source
    }

    pub fn target(&self, id: MorphismId) -> ObjectId {
        self.morphisms[id.0].target
    }

    /// The unit morphism `1ₓ`.
    pub fn unit(&self, x: ObjectId) -> Result<MorphismId> {
        check_object(x, self.object_count)?;
        Ok(self.units[x.0])
    }

    pub fn units(&self) -> &[MorphismId] {
        &self.units
    }

    pub fn inverse(&self, id: MorphismId) -> Result<MorphismId> {
        check_morphism(id, self.morphisms.len())?;
        Ok(self.inverses[id.0])
    }

    pub fn is_unit(&self, id: MorphismId) -> bool {
        let m = self.morphisms[id.0];
        m.source == m.target && self.units[m.source.0] == id
    }

    /// Raw table lookup for `β∘α`, without checking endpoints.
    pub fn lookup(&self, beta: MorphismId, alpha: MorphismId) -> Option<MorphismId> {
        self.composition.get(&(beta, alpha)).copied()
    }

    pub fn composition_entries(
        &self,
    ) -> impl Iterator<Item = ((MorphismId, MorphismId), MorphismId)> + '_ {
        self.composition.iter().map(|(&k, &v)| (k, v))
    }

    /// `β∘α`, or [`Composition::NotComposable`] when `t(α) ≠ s(β)`.
    pub fn compose(&self, beta: MorphismId, alpha: MorphismId) -> Result<Composition> {
        let b = self.morphism(beta)?;
        let a = self.morphism(alpha)?;
        if a.target != b.source {
            return Ok(Composition::NotComposable);
        }
        Ok(self
            .lookup(beta, alpha)
            .map_or(Composition::NotComposable, Composition::Morphism))
    }

    /// `G₊(x)`: all morphisms with source `x`.
    pub fn outgoing(&self, x: ObjectId) -> Vec<MorphismId> {
        self.morphisms
            .iter()
            .filter(|m| m.source == x)
            .map(|m| m.id)
            .collect()
    }

    /// `G(y, x)`: all morphisms `x → y`.
    pub fn hom(&self, target: ObjectId, source: ObjectId) -> Vec<MorphismId> {
        self.morphisms
            .iter()
            .filter(|m| m.source == source && m.target == target)
            .map(|m| m.id)
            .collect()
    }

    /// Checks every groupoid axiom exhaustively.
    pub fn verify_axioms(&self) -> AxiomReport {
        let mut report = AxiomReport::default();
        let by_source: Vec<Vec<MorphismId>> = self.objects().map(|x| self.outgoing(x)).collect();

        // composition defined exactly on composable pairs, with the right endpoints
        let mut domain = AxiomCheck::new(Axiom::CompositionDomain);
        for a in &self.morphisms {
            for b in &self.morphisms {
                let composable = a.target == b.source;
                domain.checked += 1;
                match (composable, self.lookup(b.id, a.id)) {
                    (true, Some(c)) => {
                        let c = self.morphisms[c.0];
                        if c.source != a.source || c.target != b.target {
                            domain.fail(vec![b.id.0, a.id.0]);
                        }
                    }
                    (false, None) => {}
                    _ => domain.fail(vec![b.id.0, a.id.0]),
                }
            }
        }
        report.checks.push(domain);

        let mut assoc = AxiomCheck::new(Axiom::Associativity);
        for a in &self.morphisms {
            for &b in &by_source[a.target.0] {
                for &c in &by_source[self.target(b).0] {
                    assoc.checked += 1;
                    let left = self.lookup(b, a.id).and_then(|ba| self.lookup(c, ba));
                    let right = self.lookup(c, b).and_then(|cb| self.lookup(cb, a.id));
                    if left.is_none() || left != right {
                        assoc.fail(vec![c.0, b.0, a.id.0]);
                    }
                }
            }
        }
        report.checks.push(assoc);

        let mut unit_ends = AxiomCheck::new(Axiom::UnitEndpoints);
        for x in self.objects() {
            unit_ends.checked += 1;
            let u = self.morphisms[self.units[x.0].0];
            if u.source != x || u.target != x {
                unit_ends.fail(vec![x.0]);
            }
        }
        report.checks.push(unit_ends);

        let mut unit_laws = AxiomCheck::new(Axiom::UnitLaws);
        for a in &self.morphisms {
            unit_laws.checked += 1;
            let left = self.lookup(self.units[a.target.0], a.id);
            let right = self.lookup(a.id, self.units[a.source.0]);
            if left != Some(a.id) || right != Some(a.id) {
                unit_laws.fail(vec![a.id.0]);
            }
        }
        report.checks.push(unit_laws);

        let mut inverse_laws = AxiomCheck::new(Axiom::InverseLaws);
        for a in &self.morphisms {
            inverse_laws.checked += 1;
            let inv = self.inverses[a.id.0];
            let left = self.lookup(inv, a.id);
            let right = self.lookup(a.id, inv);
            if left != Some(self.units[a.source.0]) || right != Some(self.units[a.target.0]) {
                inverse_laws.fail(vec![a.id.0]);
            }
        }
        report.checks.push(inverse_laws);

        report
    }

    /// Orbits of the groupoid, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<ObjectId>> {
        let mut parent: Vec<usize> = (0..self.object_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.morphisms {
            let a = find(&mut parent, m.source.0);
            let b = find(&mut parent, m.target.0);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<ObjectId>> = BTreeMap::new();
        for x in 0..self.object_count {
            let root = find(&mut parent, x);
            groups.entry(root).or_default().push(ObjectId(x));
        }
        groups.into_values().collect()
    }

    /// The isotropy group `Gₓ = {α : s(α) = t(α) = x}`.
    pub fn isotropy_group(&self, x: ObjectId) -> Result<Vec<Morphism>> {
        check_object(x, self.object_count)?;
        Ok(self
            .morphisms
            .iter()
            .filter(|m| m.source == x && m.target == x)
            .copied()
            .collect())
    }

    /// Coproduct: objects and morphisms of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &FiniteGroupoid) -> FiniteGroupoid {
        let dx = self.object_count;
        let dm = self.morphisms.len();
        let shift_m = |m: MorphismId| MorphismId(m.0 + dm);
        let mut morphisms = self.morphisms.clone();
        morphisms.extend(other.morphisms.iter().map(|m| Morphism {
            id: shift_m(m.id),
            source: ObjectId(m.source.0 + dx),
            target: ObjectId(m.target.0 + dx),
        }));
        let mut composition = self.composition.clone();
        composition.extend(
            other
                .composition
                .iter()
                .map(|(&(b, a), &c)| ((shift_m(b), shift_m(a)), shift_m(c))),
        );
        let mut units = self.units.clone();
        units.extend(other.units.iter().map(|&u| shift_m(u)));
        let mut inverses = self.inverses.clone();
        inverses.extend(other.inverses.iter().map(|&i| shift_m(i)));
        FiniteGroupoid {
            object_count: dx + other.object_count,
            morphisms,
            composition,
            units,
            inverses,
        }
    }

    /// Restriction to each orbit, in orbit order.
    pub fn connected_components(&self) -> Vec<FiniteGroupoid> {
        self.component_embeddings()
            .into_iter()
            .map(|c| c.groupoid)
            .collect()
    }

    /// Like [`Self::connected_components`], keeping the embedding of each
    /// component into `self`.
    pub fn component_embeddings(&self) -> Vec<Component> {
        self.orbits()
            .into_iter()
            .map(|orbit| self.restrict(orbit))
            .collect()
    }

    fn restrict(&self, objects: Vec<ObjectId>) -> Component {
        let local_object: BTreeMap<ObjectId, ObjectId> = objects
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, ObjectId(i)))
            .collect();
        let morphisms: Vec<MorphismId> = self
            .morphisms
            .iter()
            .filter(|m| local_object.contains_key(&m.source))
            .map(|m| m.id)
            .collect();
        let local_morphism: BTreeMap<MorphismId, MorphismId> = morphisms
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, MorphismId(i)))
            .collect();
        let endpoints: Vec<_> = morphisms
            .iter()
            .map(|&m| {
                let m = self.morphisms[m.0];
                (local_object[&m.source], local_object[&m.target])
            })
            .collect();
        let composition: Vec<_> = self
            .composition
            .iter()
            .filter_map(|(&(b, a), &c)| {
                Some((
                    (*local_morphism.get(&b)?, *local_morphism.get(&a)?),
                    *local_morphism.get(&c)?,
                ))
            })
            .collect();
        let unit_ids = objects
            .iter()
            .map(|x| local_morphism[&self.units[x.0]])
            .collect();
        let inverse_ids = morphisms
            .iter()
            .map(|m| local_morphism[&self.inverses[m.0]])
            .collect();
        let groupoid = FiniteGroupoid::from_tables(
            objects.len(),
            &endpoints,
            composition,
            unit_ids,
            inverse_ids,
        )
        .expect("restriction of a well-formed table is well-formed");
        Component {
            groupoid,
            objects,
            morphisms,
        }
    }

    /// Renames objects by `object_map[old] = new` (a permutation).
    pub fn relabel_objects(&self, object_map: &[ObjectId]) -> Result<FiniteGroupoid> {
        let distinct: BTreeSet<_> = object_map.iter().collect();
        if object_map.len() != self.object_count
            || distinct.len() != self.object_count
            || object_map.iter().any(|x| x.0 >= self.object_count)
        {
            return Err(Error::InvalidInput(
                "object map is not a permutation".into(),
            ));
        }
        let mut units = vec![MorphismId(0); self.object_count];
        for (old, &u) in self.units.iter().enumerate() {
            units[object_map[old].0] = u;
        }
        Ok(FiniteGroupoid {
            object_count: self.object_count,
            morphisms: self
                .morphisms
                .iter()
                .map(|m| Morphism {
                    id: m.id,
                    source: object_map[m.source.0],
                    target: object_map[m.target.0],
                })
                .collect(),
            composition: self.composition.clone(),
            units,
            inverses: self.inverses.clone(),
        })
    }

    /// Renumbers morphisms in `(source, target, id)` order.
    ///
    /// Two groupoids that agree up to a morphism relabeling which preserves
    /// the relative order of parallel morphisms have equal canonical forms.
    pub fn canonical_form(&self) -> FiniteGroupoid {
        let mut order: Vec<&Morphism> = self.morphisms.iter().collect();
        order.sort_by_key(|m| (m.source, m.target, m.id));
        let mut new_id = vec![MorphismId(0); self.morphisms.len()];
        for (i, m) in order.iter().enumerate() {
            new_id[m.id.0] = MorphismId(i);
        }
        let morphisms = order
            .iter()
            .enumerate()
            .map(|(i, m)| Morphism {
                id: MorphismId(i),
                source: m.source,
                target: m.target,
            })
            .collect();
        let mut inverses = vec![MorphismId(0); self.morphisms.len()];
        for (old, &inv) in self.inverses.iter().enumerate() {
            inverses[new_id[old].0] = new_id[inv.0];
        }
        FiniteGroupoid {
            object_count: self.object_count,
            morphisms,
            composition: self
                .composition
                .iter()
                .map(|(&(b, a), &c)| ((new_id[b.0], new_id[a.0]), new_id[c.0]))
                .collect(),
            units: self.units.iter().map(|u| new_id[u.0]).collect(),
            inverses,
        }
    }

    /// Overwrites one composition entry. Intended for building counterexamples.
    pub fn with_composition_entry(
        mut self,
        beta: MorphismId,
        alpha: MorphismId,
        result: MorphismId,
    ) -> Result<Self> {
        for m in [beta, alpha, result] {
            check_morphism(m, self.morphisms.len())?;
        }
        self.composition.insert((beta, alpha), result);
        Ok(self)
    }
}

/// A connected component together with its embedding into the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub groupoid: FiniteGroupoid,
    /// `objects[local] = parent object`.
    pub objects: Vec<ObjectId>,
    /// `morphisms[local] = parent morphism`.
    pub morphisms: Vec<MorphismId>,
}

/// True when `a` and `b` agree after mapping each to canonical form.
///
/// `object_map` sends objects of `a` to objects of `b`.
pub fn isomorphic_via(a: &FiniteGroupoid, b: &FiniteGroupoid, object_map: &[ObjectId]) -> bool {
    if a.object_count != b.object_count || a.morphisms.len() != b.morphisms.len() {
        return false;
    }
    match a.relabel_objects(object_map) {
        Ok(relabeled) => relabeled.canonical_form() == b.canonical_form(),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    CompositionDomain,
    Associativity,
    UnitEndpoints,
    UnitLaws,
    InverseLaws,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// Morphism ids (or an object id for unit endpoints) of the first failure.
    pub counterexample: Option<Vec<usize>>,
}

impl AxiomCheck {
    fn new(axiom: Axiom) -> Self {
        Self {
            axiom,
            passed: true,
            checked: 0,
            failures: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, witness: Vec<usize>) {
        self.passed = false;
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(witness);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn counterexample_count(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }
}

/// Id of the pair `(target, source)` in [`pair_groupoid`]`(n)`.
pub fn pair_morphism(n: usize, target: usize, source: usize) -> MorphismId {
    MorphismId(target * n + source)
}

/// The groupoid of pairs on `n` objects: `(j, k): k → j` with
/// `(n, m)∘(m, k) = (n, k)`.
pub fn pair_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::EmptyGroupoid);
    }
    let endpoints: Vec<_> = (0..n)
        .flat_map(|j| (0..n).map(move |k| (ObjectId(k), ObjectId(j))))
        .collect();
    let composition = (0..n).flat_map(|a| {
        (0..n).flat_map(move |b| {
            (0..n).map(move |c| {
                (
                    (pair_morphism(n, a, b), pair_morphism(n, b, c)),
                    pair_morphism(n, a, c),
                )
            })
        })
    });
    let units = (0..n).map(|k| pair_morphism(n, k, k)).collect();
    let inverses = (0..n)
        .flat_map(|j| (0..n).map(move |k| pair_morphism(n, k, j)))
        .collect();
    FiniteGroupoid::from_tables(n, &endpoints, composition, units, inverses)
}

/// `n` objects and only their unit morphisms.
pub fn units_only(n: usize) -> Result<FiniteGroupoid> {
    let endpoints: Vec<_> = (0..n).map(|x| (ObjectId(x), ObjectId(x))).collect();
    let composition = (0..n).map(|x| ((MorphismId(x), MorphismId(x)), MorphismId(x)));
    let ids: Vec<_> = (0..n).map(MorphismId).collect();
    FiniteGroupoid::from_tables(n, &endpoints, composition, ids.clone(), ids)
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    /// `table[g * order + h] = g h`
    table: Vec<usize>,
}

impl FiniteGroup {
    /// Element 0 must be the identity.
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order || table.iter().any(|&g| g >= order) {
            return Err(Error::InvalidInput("malformed group table".into()));
        }
        Ok(Self { order, table })
    }

    pub fn cyclic(order: usize) -> Result<Self> {
        let table = (0..order)
            .flat_map(|g| (0..order).map(move |h| (g + h) % order))
            .collect();
        Self::from_table(order, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..self.order)
            .find(|&h| self.mul(g, h) == 0)
            .expect("group table has inverses")
    }
}

/// Action groupoid of `group` acting on `points` points by `act(g, x)`.
///
/// Morphism `(g, x): x → g·x` has id `g * points + x`.
pub fn action_groupoid<F>(group: &FiniteGroup, points: usize, act: F) -> Result<FiniteGroupoid>
where
    F: Fn(usize, usize) -> usize,
{
    if points == 0 {
        return Err(Error::EmptyGroupoid);
    }
    let order = group.order();
    let id = |g: usize, x: usize| MorphismId(g * points + x);
    let mut endpoints = Vec::with_capacity(order * points);
    for g in 0..order {
        for x in 0..points {
            let y = act(g, x);
            if y >= points {
                return Err(Error::InvalidObject {
                    index: y,
                    count: points,
                });
            }
            endpoints.push((ObjectId(x), ObjectId(y)));
        }
    }
    let mut composition = Vec::new();
    for g in 0..order {
        for x in 0..points {
            let gx = act(g, x);
            for h in 0..order {
                composition.push(((id(h, gx), id(g, x)), id(group.mul(h, g), x)));
            }
        }
    }
    let units = (0..points).map(|x| id(0, x)).collect();
    let inverses = (0..order)
        .flat_map(|g| (0..points).map(move |x| (g, x)))
        .map(|(g, x)| id(group.inverse(g), act(g, x)))
        .collect();
    FiniteGroupoid::from_tables(points, &endpoints, composition, units, inverses)
}

fn check_object(x: ObjectId, count: usize) -> Result<()> {
    if x.0 < count {
        Ok(())
    } else {
        Err(Error::InvalidObject { index: x.0, count })
    }
}

fn check_morphism(m: MorphismId, count: usize) -> Result<()> {
    if m.0 < count {
        Ok(())
    } else {
        Err(Error::InvalidMorphism { index: m.0, count })
    }
}

/// JSON layout: `{"objects", "morphisms": [[id, s, t]], "compose": [[b, a, c]], "units", "inverses"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupoidDoc {
    objects: usize,
    morphisms: Vec<[usize; 3]>,
    compose: Vec<[usize; 3]>,
    units: Vec<usize>,
    inverses: Vec<usize>,
}

impl From<FiniteGroupoid> for GroupoidDoc {
    fn from(g: FiniteGroupoid) -> Self {
        GroupoidDoc {
            objects: g.object_count,
            morphisms: g
                .morphisms
                .iter()
                .map(|m| [m.id.0, m.source.0, m.target.0])
                .collect(),
            compose: g
                .composition
                .iter()
                .map(|(&(b, a), &c)| [b.0, a.0, c.0])
                .collect(),
            units: g.units.iter().map(|u| u.0).collect(),
            inverses: g.inverses.iter().map(|i| i.0).collect(),
        }
    }
}

impl TryFrom<GroupoidDoc> for FiniteGroupoid {
    type Error = Error;

    fn try_from(doc: GroupoidDoc) -> Result<Self> {
        let mut endpoints = vec![None; doc.morphisms.len()];
        for &[id, s, t] in &doc.morphisms {
            let slot = endpoints.get_mut(id).ok_or(Error::InvalidMorphism {
                index: id,
                count: doc.morphisms.len(),
            })?;
            if slot.replace((ObjectId(s), ObjectId(t))).is_some() {
                return Err(Error::Format(format!("morphism id {id} listed twice")));
            }
        }
        let endpoints: Vec<_> = endpoints.into_iter().map(Option::unwrap).collect();
        FiniteGroupoid::from_tables(
            doc.objects,
            &endpoints,
            doc.compose
                .iter()
                .map(|&[b, a, c]| ((MorphismId(b), MorphismId(a)), MorphismId(c))),
            doc.units.into_iter().map(MorphismId).collect(),
            doc.inverses.into_iter().map(MorphismId).collect(),
        )
    }
}
