//! Error type shared by all core modules.

use std::path::PathBuf;

use crate::corpus::LicenseId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A lookup or diff was asked for a license that has no corpus entry
    /// (`unknown`, `none`, or an id missing from the data files).
    #[error("no corpus entry for license `{0}`")]
    NoSuchLicense(LicenseId),

    /// `most_permissive` was called with nothing to choose from.
    #[error("cannot pick the most permissive license from an empty candidate set")]
    EmptyCandidates,

    /// The io cause is part of the message, not a chained source (the field
    /// deliberately avoids the name `source`): warnings print these with plain
    /// `{}` and must keep the reason, and chain-walking reporters would
    /// otherwise print it twice.
    #[error("{path}: {cause}")]
    Io {
        path: PathBuf,
        cause: std::io::Error,
    },

    /// A bundled or overridden data file failed to parse or validate.
    #[error("malformed {what}: {detail}")]
    DataFormat { what: String, detail: String },

    /// The classifier model file failed to parse or validate. Raised at load
    /// time only; `classify` itself never fails.
    #[error("classifier model: {detail}")]
    Model { detail: String },

    #[error("archive {path}: {detail}")]
    Archive { path: PathBuf, detail: String },

    #[error("metadata provider: {0}")]
    Provider(String),
}

pub type Result<T> = std::result::Result<T, Error>;
