// LAPACK and CBLAS symbols come from the system OpenBLAS; no -src crate is
// used because the sandbox has a prebuilt library but no network toolchain
// for source builds.
fn main() {
    println!("cargo:rustc-link-search=native=/usr/lib/x86_64-linux-gnu");
    println!("cargo:rustc-link-lib=dylib=openblas");
}
