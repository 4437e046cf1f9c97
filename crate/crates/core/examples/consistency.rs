//! Approach a training point along a fixed direction and watch the
//! extension converge to its image.

use std::f64::consts::PI;

use pbe::bench::{make_sphere_dataset, BENCH_CURVATURE_C};
use pbe::index::distance;
use pbe::{extend, SchemeKind, WeightScheme};

fn main() -> pbe::Result<()> {
    let data = make_sphere_dataset(30, 1, 0)?;
    let model = data.model(data.default_epsilon(), BENCH_CURVATURE_C)?;
    let j = model.index().nearest(&[PI / 2.0, PI / 2.0], 1)[0].index;
    let (xj, target) = (model.point(j).to_vec(), model.image(j).to_vec());
    let dir = [0.6, 0.8];

    print!("{:>8}", "distance");
    for kind in SchemeKind::ALL {
        print!(" {:>18}", kind.label());
    }
    println!();
    for e in 0..=7 {
        let t = if e == 7 { 0.0 } else { 10f64.powi(-e - 1) };
        let x = [xj[0] + t * dir[0], xj[1] + t * dir[1]];
        print!("{t:>8.0e}");
        for kind in SchemeKind::ALL {
            let r = extend(&x, &model, &WeightScheme::for_model(kind, &model))?;
            print!(" {:>18.3e}", distance(&r.embedding, &target));
        }
        println!();
    }
    Ok(())
}
