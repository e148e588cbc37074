//! Shows each normalization step on a few dialect reviews.
//!
//! cargo run --example normalize_text -- "واااو المطعم حلووو 👍 10/10"

use arsent::textproc::{normalize, preprocess_words, tokenize};
use arsent::NormalizationConfig;

fn main() {
    let cfg = NormalizationConfig::default();
    let inputs: Vec<String> = match std::env::args().nth(1) {
        Some(text) => vec![text],
        None => vec![
            "الأكل جمييييل جداً!!".into(),
            "والخدمة ممتازة، وسعرو فيه 😀".into(),
            "مَا عجبني الـمـكان abc 123".into(),
        ],
    };
    for text in inputs {
        let clean = normalize(&text, &cfg);
        println!("raw        {text}");
        println!("normalized {clean}");
        println!("tokens     {:?}", tokenize(&clean).iter().map(|t| &t.surface).collect::<Vec<_>>());
        println!("words      {:?}\n", preprocess_words(&text, &cfg));
    }
}
