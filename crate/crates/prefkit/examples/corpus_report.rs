//! Prints the bundled corpus report as Markdown.
//!
//! ```text
//! cargo run -p prefkit --example corpus_report
//! ```

fn main() {
    let report = prefkit::golden::run_golden(None).expect("no filter given");
    println!("{}", report.to_markdown());
}
