use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Vertex family: apexes `X` and the four base rays `A`..`D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    X,
    A,
    B,
    C,
    D,
}

impl Family {
    pub const BASE: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

    /// Base family for index 0..4 (A, B, C, D).
    pub fn base(j: usize) -> Family {
        Family::BASE[j % 4]
    }

    /// Index 0..4 for base families, `None` for `X`.
    pub fn base_index(self) -> Option<usize> {
        match self {
            Family::X => None,
            Family::A => Some(0),
            Family::B => Some(1),
            Family::C => Some(2),
            Family::D => Some(3),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Family::X => 'X',
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Family> {
        match c {
            'X' => Some(Family::X),
            'A' => Some(Family::A),
            'B' => Some(Family::B),
            'C' => Some(Family::C),
            'D' => Some(Family::D),
            _ => None,
        }
    }
}

/// Vertex name such as `X0` or `B3`. Ordered by level, then family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexLabel {
    pub family: Family,
    pub level: u32,
}

impl VertexLabel {
    pub const fn new(family: Family, level: u32) -> Self {
        VertexLabel { family, level }
    }

    pub const fn x(level: u32) -> Self {
        VertexLabel::new(Family::X, level)
    }

    pub fn base(j: usize, level: u32) -> Self {
        VertexLabel::new(Family::base(j), level)
    }

    pub fn is_apex(&self) -> bool {
        self.family == Family::X
    }
}

impl Ord for VertexLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level, self.family).cmp(&(other.level, other.family))
    }
}

impl PartialOrd for VertexLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid vertex label {0:?}")]
pub struct LabelParseError(pub String);

impl FromStr for VertexLabel {
    type Err = LabelParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let family = chars.next().and_then(Family::from_letter).ok_or_else(|| LabelParseError(s.to_string()))?;
        let rest = chars.as_str();
        if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
            return Err(LabelParseError(s.to_string()));
        }
        let level = rest.parse().map_err(|_| LabelParseError(s.to_string()))?;
        Ok(VertexLabel { family, level })
    }
}

impl Serialize for VertexLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for VertexLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One of the 12 edges of an octahedron in its own local naming: apex 0,
/// apex 1 and base vertices 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OctaEdge {
    /// Apex `apex` (0 or 1) to base vertex `base`.
    Lateral { apex: usize, base: usize },
    /// Base vertex `index` to base vertex `index + 1`.
    Base { index: usize },
}

impl OctaEdge {
    pub fn all() -> [OctaEdge; 12] {
        let mut out = [OctaEdge::Base { index: 0 }; 12];
        let mut k = 0;
        for apex in 0..2 {
            for base in 0..4 {
                out[k] = OctaEdge::Lateral { apex, base };
                k += 1;
            }
        }
        for index in 0..4 {
            out[k] = OctaEdge::Base { index };
            k += 1;
        }
        out
    }
}

/// The six vertex labels of one octahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OctaLabels {
    pub apex: [VertexLabel; 2],
    pub base: [VertexLabel; 4],
}

impl OctaLabels {
    /// `X_level`, `X_{level+1}` and `A_level`..`D_level`.
    pub fn at_level(level: u32) -> Self {
        OctaLabels {
            apex: [VertexLabel::x(level), VertexLabel::x(level + 1)],
            base: [0, 1, 2, 3].map(|j| VertexLabel::base(j, level)),
        }
    }

    /// Labels in point order: apex 0, apex 1, base 0..4.
    pub fn ordered(&self) -> [VertexLabel; 6] {
        [self.apex[0], self.apex[1], self.base[0], self.base[1], self.base[2], self.base[3]]
    }

    pub fn endpoints(&self, e: OctaEdge) -> (VertexLabel, VertexLabel) {
        match e {
            OctaEdge::Lateral { apex, base } => (self.apex[apex], self.base[base]),
            OctaEdge::Base { index } => (self.base[index], self.base[(index + 1) % 4]),
        }
    }
}

impl Default for OctaLabels {
    fn default() -> Self {
        OctaLabels::at_level(0)
    }
}
