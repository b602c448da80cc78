use std::process::Command;

// Stamp a git-describe build id into the binary; silently skipped outside a checkout.
fn main() {
    println!("cargo:rerun-if-changed=../../.git/HEAD");
    println!("cargo:rerun-if-changed=../../.git/index");
    let out = Command::new("git").args(["describe", "--always", "--dirty"]).output();
    if let Ok(o) = out {
        if o.status.success() {
            let id = String::from_utf8_lossy(&o.stdout).trim().to_string();
            if !id.is_empty() {
                println!("cargo:rustc-env=CINEMATIC_BUILD_ID={}+{}", env!("CARGO_PKG_VERSION"), id);
            }
        }
    }
}
