#![no_main]

use hoprank::graph::{load_edge_list, Delimiter, EdgeListFormat};
use hoprank::Error;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&flags, text)) = data.split_first() else {
        return;
    };
    let format = EdgeListFormat {
        delimiter: if flags & 1 == 0 { Delimiter::Whitespace } else { Delimiter::Char(',') },
        header: flags & 2 != 0,
    };
    let Ok(g) = load_edge_list(text, format) else {
        return;
    };
    let mut out = Vec::new();
    g.write_edge_list(&mut out).unwrap();
    let again = load_edge_list(
        out.as_slice(),
        EdgeListFormat {
            delimiter: Delimiter::Char('\t'),
            header: false,
        },
    );
    if g.edge_count() == 0 {
        assert!(matches!(again, Err(Error::EmptyInput)));
    } else if format.delimiter == Delimiter::Whitespace {
        let again = again.expect("canonical export parses");
        assert_eq!(again.edge_count(), g.edge_count());
        let linked = (0..g.node_count() as u32).filter(|&v| !g.neighbors(v).is_empty()).count();
        assert_eq!(again.node_count(), linked);
    }
    if let Ok((lcc, _)) = g.largest_connected_component() {
        assert!(lcc.node_count() <= g.node_count());
    }
});
