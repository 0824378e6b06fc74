use std::process::Command;

/// Bake a git-describe build id into the binary so emitted documents
/// identify the code that produced them; fall back to the crate version
/// outside a git checkout.
fn main() {
    println!("cargo:rerun-if-changed=../../.git/HEAD");
    let id = Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .and_then(|out| String::from_utf8(out.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")));
    println!("cargo:rustc-env=BUILD_ID={id}");
}
