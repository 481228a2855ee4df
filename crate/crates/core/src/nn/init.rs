//! Parameter initialization: Glorot-uniform weights, zero biases.

use rand::Rng;

use super::encoder::EncoderParams;
use super::math::Mat;
use super::mlp::MlpParams;
use super::params::{PolicyArch, PolicyParams};

fn glorot<R: Rng>(mat: &mut Mat, rng: &mut R) {
    let bound = (6.0 / (mat.rows + mat.cols) as f64).sqrt();
    for v in mat.data.iter_mut() {
        *v = rng.random_range(-bound..bound);
    }
}

fn init_mlp<R: Rng>(mlp: &mut MlpParams, rng: &mut R) {
    for layer in mlp.layers.iter_mut() {
        glorot(&mut layer.w, rng);
    }
}

pub fn init_encoder<R: Rng>(dense: &[usize], gru: &[usize], rng: &mut R) -> EncoderParams {
    let mut enc = EncoderParams::zeros(dense, gru);
    init_mlp(&mut enc.mlp, rng);
    for cell in enc.grus.iter_mut() {
        glorot(&mut cell.wz, rng);
        glorot(&mut cell.uz, rng);
        glorot(&mut cell.wr, rng);
        glorot(&mut cell.ur, rng);
        glorot(&mut cell.wh, rng);
        glorot(&mut cell.uh, rng);
    }
    enc
}

pub fn init_policy<R: Rng>(arch: &PolicyArch, rng: &mut R) -> PolicyParams {
    let mut params = arch.zeros();
    params.input_encoder = init_encoder(&arch.encoder_dense, &arch.encoder_gru, rng);
    params.output_encoder = init_encoder(&arch.encoder_dense, &arch.encoder_gru, rng);
    init_mlp(&mut params.q_net, rng);
    params
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn weights_within_glorot_bound_and_biases_zero() {
        let arch = PolicyArch {
            encoder_dense: vec![6, 16],
            encoder_gru: vec![8],
            q_hidden: vec![8],
        };
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let p = init_policy(&arch, &mut rng);
        let bound = (6.0f64 / (16 + 6) as f64).sqrt();
        for v in &p.input_encoder.mlp.layers[0].w.data {
            assert!(v.abs() <= bound);
        }
        assert!(p.input_encoder.mlp.layers[0].b.iter().all(|&b| b == 0.0));
        assert!(p.q_net.layers[0].b.iter().all(|&b| b == 0.0));
        // same seed reproduces the same parameters
        let mut rng2 = ChaCha12Rng::seed_from_u64(1);
        let p2 = init_policy(&arch, &mut rng2);
        assert_eq!(p, p2);
    }
}
