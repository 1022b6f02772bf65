use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// A reproducible random stream identified by `(master_seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id mapped onto the cipher's stream
/// nonce, so every Monte Carlo trial owns an independent keystream and the
/// draws depend only on the identifier and the position in the stream,
/// never on which thread consumes it.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    /// Reopens a stream at a given counter (32-bit word position).
    pub fn at_counter(master_seed: u64, stream_id: u64, counter: u64) -> Self {
        let mut s = Self::new(master_seed, stream_id);
        s.rng.set_word_pos(counter as u128);
        s
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.rng.get_word_pos() as u64
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (-1, 1).
    fn symmetric_uniform(&mut self) -> f64 {
        // 53 random mantissa bits, offset by half an ulp so 0 and 1 are excluded.
        let u = ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        2.0 * u - 1.0
    }

    /// Uniform on (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// One pair of independent standard normals (Marsaglia polar method).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        loop {
            let u = self.symmetric_uniform();
            let v = self.symmetric_uniform();
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let scale = (-2.0 * s.ln() / s).sqrt();
                return (u * scale, v * scale);
            }
        }
    }

    /// Fills `out` with standard normals. An odd length discards the spare
    /// draw of the last pair so the result depends only on the stream state.
    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        let mut chunks = out.chunks_exact_mut(2);
        for pair in &mut chunks {
            let (a, b) = self.gaussian_pair();
            pair[0] = a;
            pair[1] = b;
        }
        if let [last] = chunks.into_remainder() {
            *last = self.gaussian_pair().0;
        }
    }
}

/// `dim` independent standard normal draws, advancing `stream`.
pub fn gaussian_vector(stream: &mut RngStream, dim: usize) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut out = vec![0.0; dim];
    stream.fill_gaussian(&mut out);
    Ok(out)
}
