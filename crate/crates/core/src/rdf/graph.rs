use std::collections::BTreeSet;

use indexmap::IndexSet;

use super::term::{Iri, Term, Triple};

type TermId = u32;

/// A set of triples over interned terms.
///
/// Two orderings are kept: subject-predicate-object for per-node lookups and
/// predicate-object-subject for per-predicate scans and class membership.
/// Term ids depend on insertion order, so equality compares resolved triples.
#[derive(Clone, Default)]
pub struct Graph {
    terms: IndexSet<Term>,
    spo: BTreeSet<[TermId; 3]>,
    pos: BTreeSet<[TermId; 3]>,
}

/// A borrowed view of one triple stored in a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleRef<'a> {
    pub subject: &'a Iri,
    pub predicate: &'a Iri,
    pub object: &'a Term,
}

impl TripleRef<'_> {
    pub fn to_owned(self) -> Triple {
        Triple {
            subject: self.subject.clone(),
            predicate: self.predicate.clone(),
            object: self.object.clone(),
        }
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn intern(&mut self, term: Term) -> TermId {
        let (id, _) = self.terms.insert_full(term);
        TermId::try_from(id).expect("more than u32::MAX distinct terms")
    }

    fn id_of(&self, term: &Term) -> Option<TermId> {
        self.terms.get_index_of(term).map(|i| i as TermId)
    }

    fn id_of_iri(&self, iri: &Iri) -> Option<TermId> {
        self.id_of(&Term::Iri(iri.clone()))
    }

    fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    fn iri(&self, id: TermId) -> &Iri {
        self.term(id).as_iri().expect("subject/predicate ids always name IRIs")
    }

    fn resolve(&self, [s, p, o]: [TermId; 3]) -> TripleRef<'_> {
        TripleRef {
            subject: self.iri(s),
            predicate: self.iri(p),
            object: self.term(o),
        }
    }

    /// Returns true if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let s = self.intern(Term::Iri(triple.subject));
        let p = self.intern(Term::Iri(triple.predicate));
        let o = self.intern(triple.object);
        if self.spo.insert([s, p, o]) {
            self.pos.insert([p, o, s]);
            true
        } else {
            false
        }
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) {
        for t in triples {
            self.insert(t);
        }
    }

    /// Set union. Node deduplication falls out of set semantics.
    pub fn merge(&mut self, other: &Graph) {
        for t in other.iter() {
            self.insert(t.to_owned());
        }
    }

    /// Returns true if the triple was present. The interned terms are kept.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        let Some(key) = self.key_of(triple) else {
            return false;
        };
        if self.spo.remove(&key) {
            let [s, p, o] = key;
            self.pos.remove(&[p, o, s]);
            true
        } else {
            false
        }
    }

    fn key_of(&self, triple: &Triple) -> Option<[TermId; 3]> {
        Some([
            self.id_of_iri(&triple.subject)?,
            self.id_of_iri(&triple.predicate)?,
            self.id_of(&triple.object)?,
        ])
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.key_of(triple).is_some_and(|k| self.spo.contains(&k))
    }

    pub fn iter(&self) -> impl Iterator<Item = TripleRef<'_>> + '_ {
        self.spo.iter().map(|k| self.resolve(*k))
    }

    pub fn triples_with_subject<'a>(
        &'a self,
        subject: &Iri,
    ) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        let range = self
            .id_of_iri(subject)
            .map(|s| self.spo.range([s, 0, 0]..=[s, TermId::MAX, TermId::MAX]));
        range.into_iter().flatten().map(|k| self.resolve(*k))
    }

    pub fn triples_with_predicate<'a>(
        &'a self,
        predicate: &Iri,
    ) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        let range = self
            .id_of_iri(predicate)
            .map(|p| self.pos.range([p, 0, 0]..=[p, TermId::MAX, TermId::MAX]));
        range
            .into_iter()
            .flatten()
            .map(|&[p, o, s]| self.resolve([s, p, o]))
    }

    pub fn objects<'a>(
        &'a self,
        subject: &Iri,
        predicate: &Iri,
    ) -> impl Iterator<Item = &'a Term> + 'a {
        let range = self
            .id_of_iri(subject)
            .zip(self.id_of_iri(predicate))
            .map(|(s, p)| self.spo.range([s, p, 0]..=[s, p, TermId::MAX]));
        range.into_iter().flatten().map(|&[_, _, o]| self.term(o))
    }

    /// Subjects `s` with `(s, predicate, object)` in the graph.
    pub fn subjects<'a>(
        &'a self,
        predicate: &Iri,
        object: &Term,
    ) -> impl Iterator<Item = &'a Iri> + 'a {
        let range = self
            .id_of_iri(predicate)
            .zip(self.id_of(object))
            .map(|(p, o)| self.pos.range([p, o, 0]..=[p, o, TermId::MAX]));
        range.into_iter().flatten().map(|&[_, _, s]| self.iri(s))
    }

    /// Distinct subject IRIs in ascending internal order.
    pub fn subject_nodes(&self) -> impl Iterator<Item = &Iri> + '_ {
        let mut last = None;
        self.spo.iter().filter_map(move |&[s, _, _]| {
            if last == Some(s) {
                None
            } else {
                last = Some(s);
                Some(self.iri(s))
            }
        })
    }

    pub fn has_type(&self, node: &Iri, rdf_type: &Iri, class: &Iri) -> bool {
        self.contains(&Triple::new(node, rdf_type, class))
    }

    /// Interned terms sorted by a caller-supplied key, returned as a rank table
    /// indexed by term id. Used by the canonical serializer.
    pub(crate) fn term_ranks<K: Ord>(&self, key: impl Fn(&Term) -> K) -> Vec<u32> {
        let mut order: Vec<TermId> = (0..self.terms.len() as TermId).collect();
        let keys: Vec<K> = self.terms.iter().map(key).collect();
        order.sort_by(|a, b| keys[*a as usize].cmp(&keys[*b as usize]));
        let mut rank = vec![0; order.len()];
        for (r, id) in order.into_iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        rank
    }

    /// Triples sorted by the given per-term rank, subject then predicate then object.
    pub(crate) fn iter_ranked<'a>(
        &'a self,
        rank: &[u32],
    ) -> impl Iterator<Item = TripleRef<'a>> + 'a {
        let mut keys: Vec<[TermId; 3]> = self.spo.iter().copied().collect();
        keys.sort_unstable_by_key(|[s, p, o]| {
            (rank[*s as usize], rank[*p as usize], rank[*o as usize])
        });
        keys.into_iter().map(|k| self.resolve(k))
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains(&t.to_owned()))
    }
}

impl Eq for Graph {}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        Graph::extend(self, iter)
    }
}
