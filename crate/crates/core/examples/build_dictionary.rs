//! Builds, saves and reloads the canonical-pattern dictionary for each k.

use warpmine::canon::stored_bits;
use warpmine::CanonicalDictionary;

fn main() -> warpmine::Result<()> {
    let dir = std::env::temp_dir();
    for k in 3..=7 {
        let start = std::time::Instant::now();
        let dict = CanonicalDictionary::build(k)?;
        let path = dir.join(format!("k{k}.dmcd"));
        dict.save(&path)?;
        let back = CanonicalDictionary::load(&path)?;
        assert_eq!(back, dict);
        println!(
            "k={k}: {:>4} patterns, {:>8} table entries, built in {:>6.1} ms -> {}",
            dict.pattern_count(),
            1u64 << stored_bits(k),
            start.elapsed().as_secs_f64() * 1e3,
            path.display()
        );
    }
    Ok(())
}
