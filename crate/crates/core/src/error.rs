use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("ZPL residual has no sign change on [{low}, {high}] meV")]
    NoBracket { low: f64, high: f64 },

    #[error("phonon truncation {n_max} exceeds the limit of {limit}")]
    BasisTooLarge { n_max: usize, limit: usize },

    #[error("symmetric eigensolver did not converge")]
    NoConvergence,

    #[error("symmetry projection residual {residual:.3e} exceeds tolerance")]
    Labeling { residual: f64 },

    #[error("spectrum has no {0} state")]
    MissingState(&'static str),

    #[error("thermal level set too small: excluded Boltzmann weight {excluded:.3e}")]
    Truncation { excluded: f64 },
}

pub(crate) fn ensure(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason,
        })
    }
}
