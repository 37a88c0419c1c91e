//! Dataset file I/O: write a generated dataset as CSV files, load it
//! back in multi-feature mode, load a single table in multi-attribute
//! mode (each column its own 1-D feature space), and validate.
//!
//! Run with: cargo run --example csv_ingestion

use fsg::io::{load_multi_attribute, load_multi_feature, write_dataset};
use fsg::synthetic::{generate_dataset, FixtureName, OmegaFixture};
use fsg::RngSeed;

fn main() -> fsg::Result<()> {
    let dir = std::env::temp_dir().join("fsg_csv_example");

    // Multi-feature mode: one file per feature space plus labels.
    let fixture = OmegaFixture::load(FixtureName::TwoClassGeom);
    let data = generate_dataset(&fixture.spec(20), RngSeed(5))?;
    let names: Vec<String> = vec!["alpha".into(), "beta".into()];
    let files = write_dataset(&data, &names, &dir, "demo")?;
    println!("wrote:");
    for f in &files {
        println!("  {}", f.display());
    }

    let (loaded, label_names) = load_multi_feature(&files[..2], &files[2])?;
    println!(
        "\nmulti-feature reload: {} samples, {} spaces of dims {:?}, labels {:?}",
        loaded.num_samples(),
        loaded.num_spaces(),
        loaded.space_dims,
        label_names
    );
    assert_eq!(loaded.samples[0].features, data.samples[0].features, "full-precision round trip");
    println!("validation violations: {:?}", loaded.validate());

    // Multi-attribute mode: one table, each attribute column becomes
    // a one-dimensional feature space.
    let table = dir.join("iris_like.csv");
    std::fs::write(
        &table,
        "sepal_l,sepal_w,petal_l,petal_w,species\n\
         5.1,3.5,1.4,0.2,setosa\n\
         7.0,3.2,4.7,1.4,versicolor\n\
         6.3,3.3,6.0,2.5,virginica\n\
         4.9,3.0,1.4,0.2,setosa\n",
    )?;
    let (attrs, species) = load_multi_attribute(&table, "species")?;
    println!(
        "\nmulti-attribute reload: {} samples -> {} one-dimensional spaces, classes {:?}",
        attrs.num_samples(),
        attrs.num_spaces(),
        species
    );
    Ok(())
}
