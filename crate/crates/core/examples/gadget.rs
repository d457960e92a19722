//! Decompose a matrix with `G⁻¹` and put it back together with `G`.

use kih::entropy::uniform_matrix;
use kih::{Entropy, GadgetContext, Params, Preset};

fn main() -> kih::Result<()> {
    let params = Params::preset(Preset::Desk);
    let g = GadgetContext::new(&params);
    let mut rng = Entropy::from_hex("01")?.stream("example/gadget");
    let a = uniform_matrix(&mut rng, params.n(), 3, params.q());
    let x = g.mat_decompose(&a)?;
    println!("a: {} x {} mod {}", a.rows(), a.cols(), a.modulus());
    println!("g^-1(a): {} x {} binary", x.rows(), x.cols());
    println!("bits of a[0][0] = {}: {:?}", a.row(0)[0], x.column(0)[..g.d()].to_vec());
    assert_eq!(g.reconstruct(&x)?, a);
    println!("G * g^-1(a) == a");
    Ok(())
}
