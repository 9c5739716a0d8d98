#![no_main]

use hoprank::simulator::{run_synth, SynthSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(mut spec) = SynthSpec::from_toml_str(text) else {
        return;
    };
    spec.graph.nodes = spec.graph.nodes.min(64);
    spec.graph.extra_edges = spec.graph.extra_edges.min(64);
    spec.transitions = spec.transitions.min(256);
    spec.session_length = spec.session_length.min(16);
    if let Some(d) = spec.planted.chain_out_degree.as_mut() {
        *d = (*d).min(8);
    }
    if let Ok(out) = run_synth(&spec) {
        assert_eq!(out.graph.node_count(), spec.graph.nodes);
    }
});
