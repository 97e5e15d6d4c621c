//! Exact combinatorics of Fano polygons: duality, combinatorial mutation,
//! Laurent polynomial mirrors, divisorial polytopes and the deformations
//! they induce.

pub mod deform;
pub mod divpoly;
pub mod fano;
pub mod geom;
pub mod laurent;
pub mod mutation;
pub mod rational;
pub mod verify;

/// Any error raised by the library, for callers that do not care which
/// module it came from.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Geom(#[from] geom::GeomError),
    #[error(transparent)]
    Fano(#[from] fano::FanoError),
    #[error(transparent)]
    Mutation(#[from] mutation::MutationError),
    #[error(transparent)]
    Laurent(#[from] laurent::LaurentError),
    #[error(transparent)]
    DivPoly(#[from] divpoly::DivPolyError),
    #[error(transparent)]
    Deform(#[from] deform::DeformError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
}

impl Error {
    /// Short machine-readable name of the failing module.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Geom(_) => "geometry",
            Error::Fano(_) => "fano",
            Error::Mutation(_) => "mutation",
            Error::Laurent(_) => "laurent",
            Error::DivPoly(_) => "divpoly",
            Error::Deform(_) => "deform",
            Error::Verify(_) => "verify",
        }
    }
}
