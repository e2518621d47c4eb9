use std::path::Path;
use rei::grams::{select_grams, Strategy};
use rei::{
    build_index, load_corpus, load_queries, query_indexed, IndexConfig,
    RegexMatcher, Workload,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = load_corpus(Path::new("app.log"), 1)?;
    let queries = load_queries(Path::new("queries.txt"))?;
    let workload = Workload::new(corpus, queries);
    let dictionary = select_grams(&workload, 3, 64, Strategy::Freq, false)?;
    let config = IndexConfig::new(3, dictionary.len(), 1)?;
    let index = build_index(&workload.corpus, &dictionary, config)?;
    let result = query_indexed(&index, &workload.corpus, "vmID=7", &RegexMatcher)?;
    println!("{:?}", result.matching_ids);
    Ok(())
}
