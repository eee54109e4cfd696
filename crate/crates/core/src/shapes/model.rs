use std::collections::HashSet;
use std::fmt;

use crate::rdf::{Datatype, Iri};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("min_count {min} exceeds max_count {max} on <{path}>")]
    MinAboveMax { path: Iri, min: usize, max: usize },
    #[error("exclusive group needs at least two paths")]
    GroupTooSmall,
    #[error("exclusive group min_total {min} exceeds max_total {max}")]
    GroupMinAboveMax { min: usize, max: usize },
    #[error("path <{path}> constrained twice in shape <{class}>")]
    DuplicatePath { class: Iri, path: Iri },
    #[error("more than one shape targets <{0}>")]
    DuplicateTarget(Iri),
}

/// What every object of a constrained path must be. Datatype and class are
/// alternatives, never both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectConstraint {
    Datatype(Datatype),
    Class(Iri),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyConstraint {
    pub path: Iri,
    pub min_count: usize,
    pub max_count: Option<usize>,
    pub object: Option<ObjectConstraint>,
}

impl PropertyConstraint {
    pub fn new(path: Iri, min_count: usize, max_count: Option<usize>) -> Result<Self, ShapeError> {
        if let Some(max) = max_count {
            if min_count > max {
                return Err(ShapeError::MinAboveMax {
                    path,
                    min: min_count,
                    max,
                });
            }
        }
        Ok(PropertyConstraint {
            path,
            min_count,
            max_count,
            object: None,
        })
    }

    pub fn datatype(mut self, dt: Datatype) -> Self {
        self.object = Some(ObjectConstraint::Datatype(dt));
        self
    }

    pub fn class(mut self, class: Iri) -> Self {
        self.object = Some(ObjectConstraint::Class(class));
        self
    }
}

/// Bounds on the total number of values across a set of paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusiveGroup {
    pub paths: Vec<Iri>,
    pub min_total: usize,
    pub max_total: usize,
}

impl ExclusiveGroup {
    pub fn new(paths: Vec<Iri>, min_total: usize, max_total: usize) -> Result<Self, ShapeError> {
        if paths.len() < 2 {
            return Err(ShapeError::GroupTooSmall);
        }
        if min_total > max_total {
            return Err(ShapeError::GroupMinAboveMax {
                min: min_total,
                max: max_total,
            });
        }
        Ok(ExclusiveGroup {
            paths,
            min_total,
            max_total,
        })
    }

    pub fn exactly(paths: Vec<Iri>, n: usize) -> Result<Self, ShapeError> {
        Self::new(paths, n, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeShape {
    pub target_class: Iri,
    pub constraints: Vec<PropertyConstraint>,
    pub exclusive_groups: Vec<ExclusiveGroup>,
}

impl NodeShape {
    pub fn new(
        target_class: Iri,
        constraints: Vec<PropertyConstraint>,
        exclusive_groups: Vec<ExclusiveGroup>,
    ) -> Result<Self, ShapeError> {
        let mut seen = HashSet::new();
        for c in &constraints {
            if !seen.insert(&c.path) {
                return Err(ShapeError::DuplicatePath {
                    class: target_class,
                    path: c.path.clone(),
                });
            }
        }
        Ok(NodeShape {
            target_class,
            constraints,
            exclusive_groups,
        })
    }
}

/// A set of node shapes plus suite-level split-membership rules.
///
/// A split-membership rule on predicate `p` allows each node at most one
/// `p` object per split table, where the table is the object IRI up to its
/// last `/` or `#`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeSuite {
    pub shapes: Vec<NodeShape>,
    pub split_membership: Vec<Iri>,
}

impl ShapeSuite {
    pub fn new(shapes: Vec<NodeShape>, split_membership: Vec<Iri>) -> Result<Self, ShapeError> {
        let mut seen = HashSet::new();
        for s in &shapes {
            if !seen.insert(&s.target_class) {
                return Err(ShapeError::DuplicateTarget(s.target_class.clone()));
            }
        }
        Ok(ShapeSuite {
            shapes,
            split_membership,
        })
    }

    pub fn shape_for(&self, class: &Iri) -> Option<&NodeShape> {
        self.shapes.iter().find(|s| &s.target_class == class)
    }

    pub fn shape_for_mut(&mut self, class: &Iri) -> Option<&mut NodeShape> {
        self.shapes.iter_mut().find(|s| &s.target_class == class)
    }
}

/// The six kinds of check the validator performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    MinCount,
    MaxCount,
    Datatype,
    Class,
    ExclusiveGroup,
    SplitMembership,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::MinCount => "minCount",
            ConstraintKind::MaxCount => "maxCount",
            ConstraintKind::Datatype => "datatype",
            ConstraintKind::Class => "class",
            ConstraintKind::ExclusiveGroup => "exclusive-group",
            ConstraintKind::SplitMembership => "split-membership",
        })
    }
}
