//! One module per subcommand; each takes the resolved configuration and
//! writes its report files.

pub mod actev;
pub mod adhoc;
pub mod correlate;
pub mod da;
pub mod instance;
pub mod pool;
pub mod significance;
pub mod vtt;
