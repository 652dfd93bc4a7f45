//! Build-file readers: enough Maven and Gradle understanding to find module
//! declarations, declared license names, and dependency coordinates. This is
//! deliberately not a build-language evaluator; it reads the conventional
//! declaration shapes in place.

pub mod gradle;
pub mod maven;
