//! Relative L2 comparison of sampled traces on different time grids.
//!
//! cargo run --release --example compare_traces

use wavecast::signal::{compare_traces, make_wavelet, Waveform};

fn main() -> wavecast::Result<()> {
    let q = make_wavelet(5.0, 20.0, -30.0)?;
    let sample = |dt: f64, n: usize, shift: f64| {
        Waveform::new(0.0, dt, vec![(0..n).map(|j| q.value(j as f64 * dt - shift)).collect()])
    };
    let fine = sample(0.002, 1500, 0.0)?;
    let coarse = sample(0.01, 300, 0.0)?;
    let shifted = sample(0.002, 1500, 0.002)?;
    println!("coarse vs fine:       {:.3e}", compare_traces(&coarse, &fine)?);
    println!("shifted one sample:   {:.3e}", compare_traces(&shifted, &fine)?);
    let doubled = Waveform::new(0.0, fine.dt, vec![fine.samples[0].iter().map(|v| 2.0 * v).collect()])?;
    println!("half-size reference:  {:.3e}", compare_traces(&fine, &doubled)?);
    Ok(())
}
