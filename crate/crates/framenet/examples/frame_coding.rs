// Frames of a truncated Hilbert space: analysis, canonical duals, frame
// bounds, the Sobolev-weighted torus basis and sampling from the cube
// measure.
//
// ```bash
// cargo run -p framenet --example frame_coding
// ```

use framenet::hilbert::{torus_basis, Frame, ScalingMap, SmoothnessWeights};
use framenet::Result;

pub fn run_example() -> Result<()> {
    // Three unit vectors at 120 degrees plus a vertical one: a redundant,
    // tight frame of the plane.
    let s = 3f64.sqrt() / 2.0;
    let frame = Frame::from_columns(2, &[vec![1.0, 0.0], vec![-0.5, s], vec![-0.5, -s], vec![0.0, 1.0]])?;
    let (lo, hi) = frame.bounds();
    println!("frame of {} vectors in R^{}: bounds [{lo:.4}, {hi:.4}]", frame.len(), frame.ref_dim());

    let x = [0.3, -1.2];
    let coeffs = frame.dual()?.analysis(&x)?;
    let back = frame.synthesis(&coeffs)?;
    let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("dual analysis then synthesis reproduces x up to {err:.2e}");
    assert!(err < 1e-12);

    // Real Fourier basis of the 2-torus, orthonormal in the Sobolev norm of
    // order 2; modes are sorted by frequency.
    let basis = torus_basis(2, 2, 2.0)?;
    println!("torus basis with cutoff 2: {} modes, Riesz = {}", basis.len(), basis.frame.is_riesz());
    for k in 0..4 {
        println!("  mode {:?}: weight {:.4}, sup norm {:.4}", basis.modes[k], basis.weight(k), basis.psi_sup_norm(k));
    }

    // Inputs of the cube measure have coefficients R theta_j^r u_j with u
    // uniform on [-1, 1]^K.
    let theta = SmoothnessWeights::algebraic(basis.len(), 1.0)?;
    let scaling = ScalingMap::new(0.5, 1.5, theta)?;
    let x = scaling.sample_gamma(&basis.frame, 7)?;
    let scaled = scaling.scale(&basis.frame.dual()?.analysis(&x)?)?;
    println!("a draw from the cube measure maps back into the unit cube: {}", scaled.values.iter().all(|u| u.abs() <= 1.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
