#![no_main]

use hoprank::models::{read_model_json, ModelContext};
use hoprank::Graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let g = Graph::from_labeled_edges([("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f"), ("c", "g")]);
    let ctx = ModelContext::new(&g, 4).unwrap();
    let Ok(record) = read_model_json(data) else {
        return;
    };
    let _ = record.to_model(&ctx);
});
