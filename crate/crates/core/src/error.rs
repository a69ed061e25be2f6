use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid monoid map: {0}")]
    InvalidMap(String),
    #[error("not a face: {0}")]
    NotAFace(String),
    #[error("group envelope has torsion: {0}")]
    Torsion(String),
    #[error("resource bound exceeded: {0}")]
    ResourceExhausted(String),
    #[error("map is not Kummer: {0}")]
    NotKummer(String),
    #[error("invalid Λ-morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid polysimplicial set: {0}")]
    InvalidComplex(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("disconnected: {0}")]
    Disconnected(String),
    #[error("cospecialization undefined: {0}")]
    NotGood(String),
    #[error("non-commuting square at level {level}: {detail}")]
    NonCommuting { level: usize, detail: String },
    #[error("search cutoff {0} exceeded")]
    Cutoff(u64),
    #[error("invalid group data: {0}")]
    Group(String),
}

pub type Result<T> = std::result::Result<T, Error>;
