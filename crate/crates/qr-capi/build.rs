extern crate cbindgen;

use std::env;

use cbindgen::Config;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();

    let mut config = Config::default();
    config.language = cbindgen::Language::C;
    config.include_guard = Some("TILEDQR_H".into());
    config.documentation = true;

    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("Unable to generate c bindings")
        .write_to_file(format!("{crate_dir}/include/tiledqr.h"));

    println!("cargo:rerun-if-changed=src/lib.rs");
}
