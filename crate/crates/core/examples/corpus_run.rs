//! Write a seeded corpus, run one certificate suite over it from a config
//! and summarize the resulting CSV.

use effham::corpus::{generate_corpus, CorpusSpec};
use effham::runner::{run_suite, ExperimentConfig, ModelSource, Report, Suite};

fn main() -> effham::Result<()> {
    let dir = std::env::temp_dir().join("effham-corpus-run");
    let spec = CorpusSpec { seed: 11, count: 4, sites: vec![6, 7], coupling: None };
    let paths = generate_corpus(&spec, &dir.join("models"))?;
    println!("{} models in {}", paths.len(), dir.display());

    let mut config = ExperimentConfig::new(Suite::OverlapII, dir.join("out"));
    config.model = Some(ModelSource::File { paths });
    println!("config hash {}", config.hash());
    let manifest = run_suite(&config)?;
    print!("{}", Report::from_csv(&dir.join("out/certificates.csv"))?.render());
    println!("informative {:.0}%  exit code {}", 100.0 * manifest.informative_fraction(), manifest.exit_code());
    Ok(())
}
