#![no_main]

use hoprank::khop::ProfileCache;
use hoprank::Graph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let g = Graph::from_labeled_edges([("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f"), ("c", "g")]);
    let Ok(cache) = ProfileCache::read_from(data, &g, 1 << 20) else {
        return;
    };
    for p in cache.profiles() {
        assert_eq!(p.dist().len(), g.node_count());
        assert_eq!(p.dist()[p.source() as usize], 0);
    }
});
