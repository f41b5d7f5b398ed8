//! Score every row of a table against a hypothesis and show which survive.
//!
//! `cargo run --example row_filter -- fixtures/tables/bryce.json "Bryce Dallas Howard has two children."`

use std::path::PathBuf;
use std::sync::Arc;

use tablefol::table::{
    filter_rows, load_table, row_scores, EmbeddingProvider, FileEmbeddings, HashEmbeddings, OovPolicy,
};
use tablefol::text::Stopwords;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let table = PathBuf::from(args.next().unwrap_or_else(|| "fixtures/tables/bryce.json".into()));
    let hypothesis = args.next().unwrap_or_else(|| "Bryce Dallas Howard has two children.".into());
    let emb_path = args.next().unwrap_or_else(|| "fixtures/embeddings.txt".into());
    let emb: Arc<dyn EmbeddingProvider> = match FileEmbeddings::load(emb_path.as_ref(), OovPolicy::Hash) {
        Ok(e) => Arc::new(e),
        Err(_) => Arc::new(HashEmbeddings::default()),
    };
    let sw = Stopwords::default();
    let t = load_table(&table)?;
    for (row, s) in t.rows.iter().zip(row_scores(&t, &hypothesis, emb.as_ref(), &sw)) {
        println!("{s:8.4}  {}", row.key);
    }
    let kept = filter_rows(&t, &hypothesis, emb.as_ref(), &sw, 2);
    println!("kept: {:?}", kept.keys());
    Ok(())
}
