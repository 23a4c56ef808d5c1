use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Bricard octahedron classification by the cap at `X0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubType {
    #[serde(rename = "I-OEE")]
    IOee,
    #[serde(rename = "II-AEE")]
    IiAee,
    #[serde(rename = "II-OEE")]
    IiOee,
    #[serde(rename = "III-OAE")]
    IiiOae,
    #[serde(rename = "III-OAS")]
    IiiOas,
}

impl SubType {
    pub const ALL: [SubType; 5] = [SubType::IOee, SubType::IiAee, SubType::IiOee, SubType::IiiOae, SubType::IiiOas];

    pub fn as_str(self) -> &'static str {
        match self {
            SubType::IOee => "I-OEE",
            SubType::IiAee => "II-AEE",
            SubType::IiOee => "II-OEE",
            SubType::IiiOae => "III-OAE",
            SubType::IiiOas => "III-OAS",
        }
    }

    pub fn is_type_three(self) -> bool {
        matches!(self, SubType::IiiOae | SubType::IiiOas)
    }
}

impl fmt::Display for SubType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown sub-type {0:?}")]
pub struct SubTypeParseError(pub String);

impl FromStr for SubType {
    type Err = SubTypeParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| SubTypeParseError(s.to_string()))
    }
}

/// Face-angle condition at a 4-valent vertex: opposite angles equal (OAE)
/// or supplementary (OAS).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexType {
    Oae,
    Oas,
}

impl VertexType {
    /// Angle opposite to `x` across the vertex.
    pub fn relate(self, x: f64) -> f64 {
        match self {
            VertexType::Oae => x,
            VertexType::Oas => PI - x,
        }
    }
}

/// Which pair of base vertices is OAS in a III-OAE octahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum OasAssignment {
    /// `B0` and `D0` are OAS.
    #[default]
    #[serde(rename = "B0D0")]
    BD,
    /// `A0` and `C0` are OAS.
    #[serde(rename = "A0C0")]
    AC,
}

impl OasAssignment {
    /// Index pair of the OAS base vertices.
    pub fn pair(self) -> [usize; 2] {
        match self {
            OasAssignment::BD => [1, 3],
            OasAssignment::AC => [0, 2],
        }
    }

    /// Assignment whose OAS pair contains base index `j`.
    pub fn containing(j: usize) -> Self {
        if j.is_multiple_of(2) {
            OasAssignment::AC
        } else {
            OasAssignment::BD
        }
    }
}

/// Vertex types of a type-III octahedron in point order
/// (apex 0, apex 1, base 0..4).
pub fn type_three_vertex_types(subtype: SubType, oas: OasAssignment) -> Option<[VertexType; 6]> {
    match subtype {
        SubType::IiiOae => {
            let mut t = [VertexType::Oae; 6];
            for j in oas.pair() {
                t[2 + j] = VertexType::Oas;
            }
            Some(t)
        }
        SubType::IiiOas => Some([
            VertexType::Oas,
            VertexType::Oas,
            VertexType::Oae,
            VertexType::Oae,
            VertexType::Oae,
            VertexType::Oae,
        ]),
        _ => None,
    }
}
