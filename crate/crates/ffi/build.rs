fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    let out = std::path::Path::new(&crate_dir).join("include").join("hoalg.h");
    println!("cargo:rerun-if-changed=src/lib.rs");
    // C enum constants become HOALG_STATUS_OK, HOALG_STATUS_PARSE_ERROR, ...
    let mut config = cbindgen::Config::default();
    config.enumeration.rename_variants = cbindgen::RenameRule::QualifiedScreamingSnakeCase;
    config.documentation = true;
    cbindgen::Builder::new()
        .with_config(config)
        .with_crate(&crate_dir)
        .with_language(cbindgen::Language::C)
        .with_include_guard("HOALG_H")
        .generate()
        .expect("Unable to generate bindings")
        .write_to_file(out);
}
