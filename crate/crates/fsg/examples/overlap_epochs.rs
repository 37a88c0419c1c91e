//! Controlled class-overlap schedule: the epoch generator contracts
//! one class-mean pair by a tenth of its distance per epoch, so the
//! classes gradually merge. Training at selected epochs shows the
//! accuracy decaying toward chance as the overlap grows.
//!
//! Run with: cargo run --release --example overlap_epochs

use fsg::stacking::{performance, KPolicy};
use fsg::synthetic::{EpochGenerator, GaussianSpec};
use fsg::{FsgModel, RngSeed};

fn main() -> fsg::Result<()> {
    // Two classes, two 2-D spaces, means 8 units apart, unit variance.
    let means = vec![
        vec![vec![-4.0, 0.0], vec![0.0, -4.0]],
        vec![vec![4.0, 0.0], vec![0.0, 4.0]],
    ];
    let spec = GaussianSpec::isotropic(means, 1.0, 120)?;
    let mut generator = EpochGenerator::new(spec, RngSeed(3), 60);

    println!("{:>6} {:>14} {:>10}", "epoch", "mean distance", "accuracy");
    let mut epoch = 0usize;
    // `for` would borrow the generator and block the mean_distance
    // call below, so drive the iterator by hand.
    #[allow(clippy::while_let_on_iterator)]
    while let Some(data) = generator.next() {
        let data = data?;
        let distance = generator.mean_distance(0, 1);
        if epoch.is_multiple_of(6) {
            let (train, test) = data.stratified_split(0.5, RngSeed(epoch as u64));
            let model = FsgModel::train(&train, 2.0, KPolicy::Fixed(5), RngSeed(9))?;
            let preds = model.classify_dataset(&test)?;
            let acc = performance(&preds, &test.labels())?;
            println!("{epoch:>6} {distance:>14.3} {:>9.1}%", acc * 100.0);
        }
        epoch += 1;
    }
    println!("\nstopped after {epoch} epochs (means merged or cap reached)");
    Ok(())
}
