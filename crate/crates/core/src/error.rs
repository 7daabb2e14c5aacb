use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}line {line}: {message}", path_prefix(.path))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("edge {src}->{dst} has multiplicity 0")]
    ZeroMultiplicity { src: usize, dst: usize },

    #[error("multiplicity overflow at node {node}")]
    MultiplicityOverflow { node: usize },

    #[error("expected {expected} colors, got {actual}")]
    ColorCount { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("nodes {first} and {second} share a refinement class but have different features")]
    FeatureConflict { first: usize, second: usize },

    #[error("round {requested} beyond computed depth {depth}")]
    RoundOutOfRange { requested: usize, depth: usize },

    #[error("naive oracle budget exceeded: {0}")]
    OracleBudget(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("bundle schema version {found} unsupported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn path_prefix(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches a file path to a parse error that was produced from an in-memory reader.
    pub(crate) fn in_file(self, file: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(file.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }

    /// True for malformed input (bad syntax, dangling ids, bad flags).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::NodeOutOfRange { .. }
                | Error::ZeroMultiplicity { .. }
                | Error::ColorCount { .. }
                | Error::InvalidArgument(_)
                | Error::SchemaVersion { .. }
                | Error::Json(_)
                | Error::Io { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
