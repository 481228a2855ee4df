//! Minimal neural-network stack: dense layers with ReLU, GRU stacks with
//! backpropagation through time, the Adam optimizer, and a binary parameter
//! checkpoint container. Only the fixed architectures used by the scheduler
//! need gradients, so reverse mode is hand-rolled rather than taped through
//! a general graph.

pub mod adam;
pub mod checkpoint;
pub mod encoder;
pub mod gru;
pub mod init;
pub mod math;
pub mod mlp;
pub mod params;

pub use adam::{Adam, AdamConfig, OptimError};
pub use encoder::{EncoderParams, EncoderTape, RecState};
pub use gru::GruParams;
pub use mlp::{MlpParams, MlpTape};
pub use params::{ParamSet, PolicyArch, PolicyParams};

/// Evaluate the Q-network on the concatenation `(s_input, s_output, x)`.
pub fn q_forward(q_net: &MlpParams, s_in: &[f64], s_out: &[f64], x: &[f64]) -> f64 {
    let input = q_input(q_net, s_in, s_out, x);
    q_net.forward(&input)[0]
}

/// Same as [`q_forward`] but records a tape for the backward pass.
pub fn q_forward_tape(q_net: &MlpParams, s_in: &[f64], s_out: &[f64], x: &[f64]) -> (f64, MlpTape) {
    let input = q_input(q_net, s_in, s_out, x);
    let (out, tape) = q_net.forward_tape(&input);
    (out[0], tape)
}

fn q_input(q_net: &MlpParams, s_in: &[f64], s_out: &[f64], x: &[f64]) -> Vec<f64> {
    assert_eq!(
        s_in.len() + s_out.len() + x.len(),
        q_net.in_dim(),
        "q-network input dimension mismatch"
    );
    let mut input = Vec::with_capacity(q_net.in_dim());
    input.extend_from_slice(s_in);
    input.extend_from_slice(s_out);
    input.extend_from_slice(x);
    input
}
