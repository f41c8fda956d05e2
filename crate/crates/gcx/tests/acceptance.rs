use std::io::Write;

use gcx::verify::{run, Options, CRITERIA};

// lines go straight to the stdout handle so they show without --nocapture
#[test]
fn acceptance() {
    let opts = Options::default();
    let mut failed = vec![];
    let mut out = std::io::stdout();
    for id in 1..=CRITERIA {
        let o = run(id, &opts);
        writeln!(out, "{}  ({:.1}s)", o.line(), o.seconds).unwrap();
        out.flush().unwrap();
        if !o.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
