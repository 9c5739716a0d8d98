#![no_main]

use hoprank::clickstream::{read_transitions, NavSelector};
use hoprank::Graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let g = Graph::from_labeled_edges([("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f"), ("c", "g")]);
    let Ok(t) = read_transitions(data, &g) else {
        return;
    };
    let mut out = Vec::new();
    t.write_tsv(&g, NavSelector::All, &mut out).unwrap();
    assert_eq!(read_transitions(out.as_slice(), &g).unwrap(), t);
});
