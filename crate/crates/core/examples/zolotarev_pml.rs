//! Optimal rational impedance and the imaginary PML steps it induces.
//!
//! cargo run --release --example zolotarev_pml

use wavecast::stieltjes::{eval_impedance_cf, to_continued_fraction};
use wavecast::zolotarev::{impedance_error, predicted_error, zolotarev_approx, SpectralInterval};
use wavecast::C64;

fn main() -> wavecast::Result<()> {
    let interval = SpectralInterval::normalized(1e4)?;
    println!(" k   max rel. error   asymptotic");
    for k in 3..=12 {
        let imp = zolotarev_approx(&interval, k)?;
        println!("{k:>2}   {:.4e}       {:.4e}", impedance_error(&imp, &interval, 4000)?, predicted_error(1e4, k));
    }

    let imp = zolotarev_approx(&interval, 9)?;
    let steps = to_continued_fraction(&imp)?;
    println!("\nk = 9 steps (h = i gamma, dual h = i gamma_hat):");
    for (g, gh) in steps.gamma.iter().zip(&steps.gamma_hat) {
        println!("  {g:.6e}  {gh:.6e}");
    }
    // the layer reproduces the fitted impedance on the negative axis
    let x = C64::new(0.01, 0.0);
    let cf = eval_impedance_cf(&steps, x)?;
    println!(
        "\nat x = 0.01: continued fraction {:.9}, partial fractions {:.9}, 1/sqrt(x) = 10",
        cf.re,
        imp.eval_complex(x).re
    );
    Ok(())
}
