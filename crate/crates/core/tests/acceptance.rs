use oper_slope::acceptance::{run_all, unexpected_failures};

#[test]
fn acceptance_suite() {
    let results = run_all(20240601);
    for r in &results {
        println!("{}", r.line());
    }
    let unexpected = unexpected_failures(&results);
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
}
