//! Regenerates `data/demo-space.json` and prints its content digest.

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo-space.json");
    std::fs::write(path, typespace_core::demo::fixture_text()).expect("write fixture");
    println!("{}", typespace_core::demo::generate().space_hash());
}
