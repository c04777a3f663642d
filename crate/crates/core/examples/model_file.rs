//! Reading and writing the JSON model format used by the `ltikit` binary.

use std::collections::BTreeMap;

use ltikit::cli::{Metadata, ModelFile};
use ltikit::stability::classify;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rotation.json");
    let file = ModelFile::parse(&std::fs::read_to_string(path)?)?;
    let model = file.to_model()?;
    println!("{}: {:?}", path, classify(&model)?.classification);

    let metadata = Metadata {
        name: Some("scaled rotation".into()),
        parameters: Some(BTreeMap::from([("omega".to_string(), 3.0)])),
        ..Metadata::default()
    };
    let faster = model.with_state_matrix(model.a().scale(3.0))?;
    print!("{}", ModelFile::from_model(&faster, Some(metadata)).to_json());
    Ok(())
}
