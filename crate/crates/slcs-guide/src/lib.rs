//! Compiles and runs every Rust snippet in the rendered guide and the
//! top-level README as a doc-test, so the prose cannot drift away from
//! the library it describes. The crate exports nothing else.

pub mod readme {
    #![doc = include_str!("../../../README.md")]
}

pub mod introduction {
    #![doc = include_str!("../../../book/src/introduction.md")]
}

pub mod models {
    #![doc = include_str!("../../../book/src/models.md")]
}

pub mod logic {
    #![doc = include_str!("../../../book/src/logic.md")]
}

pub mod bisimulations {
    #![doc = include_str!("../../../book/src/bisimulations.md")]
}

pub mod minimization {
    #![doc = include_str!("../../../book/src/minimization.md")]
}

pub mod cli {
    #![doc = include_str!("../../../book/src/cli.md")]
}
