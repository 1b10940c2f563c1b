//! Rate-1/2 constraint-length-7 convolutional code (generators 133/171
//! octal), punctured to rate 5/8, with a terminated soft-input Viterbi
//! decoder.
//!
//! The register holds the newest bit in the LSB: at each step the 7-bit
//! window is (state << 1) | input and the two output bits are the parities
//! of the window masked by the generators. Blocks are terminated with six
//! zero tail bits so the decoder starts and ends in state zero.
//!
//! Soft decoder input follows the demapper convention: positive LLR means
//! bit 0. Punctured positions enter the decoder as 0.0 (erasures).

const G0: u32 = 0o133;
const G1: u32 = 0o171;
const MEMORY: usize = 6;
const STATES: usize = 64;

pub const TAIL_BITS: usize = MEMORY;

fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Encodes `bits` plus six zero tail bits; output interleaves the two
/// generator streams: positions 2k and 2k+1 belong to input k.
pub fn encode_terminated(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * (bits.len() + TAIL_BITS));
    let mut state: u32 = 0;
    for &b in bits.iter().chain(std::iter::repeat(&0u8).take(TAIL_BITS)) {
        debug_assert!(b <= 1);
        let window = (state << 1) | b as u32;
        out.push(parity(window & G0));
        out.push(parity(window & G1));
        state = window & (STATES as u32 - 1);
    }
    out
}

/// Maximum-likelihood sequence decoder for the terminated mother code.
/// `llrs` holds one value per mother-code bit (2 per input bit including
/// tail); returns the `n_info` decoded information bits.
pub fn decode_soft(llrs: &[f64], n_info: usize) -> Vec<u8> {
    let n_in = n_info + TAIL_BITS;
    assert_eq!(llrs.len(), 2 * n_in, "mother stream length mismatch");

    // Branch outputs per (previous state, input).
    let mut outs = [[0u8; 2]; 2 * STATES];
    for s in 0..STATES {
        for b in 0..2 {
            let window = ((s as u32) << 1) | b as u32;
            outs[2 * s + b] = [parity(window & G0), parity(window & G1)];
        }
    }

    let mut metric = [f64::NEG_INFINITY; STATES];
    metric[0] = 0.0;
    let mut decisions: Vec<u64> = Vec::with_capacity(n_in);
    let mut next = [f64::NEG_INFINITY; STATES];

    for t in 0..n_in {
        let l0 = llrs[2 * t];
        let l1 = llrs[2 * t + 1];
        next.fill(f64::NEG_INFINITY);
        let mut dec: u64 = 0;
        for ns in 0..STATES {
            // Predecessors of ns: input = ns & 1, old high bit free.
            let input = ns & 1;
            let base = ns >> 1;
            let mut best = f64::NEG_INFINITY;
            let mut best_hi = 0u64;
            for hi in 0..2usize {
                let os = base | (hi << (MEMORY - 1));
                let m = metric[os];
                if m == f64::NEG_INFINITY {
                    continue;
                }
                let o = outs[2 * os + input];
                let gain = (if o[0] == 0 { l0 } else { -l0 } + if o[1] == 0 { l1 } else { -l1 })
                    / 2.0;
                let cand = m + gain;
                if cand > best {
                    best = cand;
                    best_hi = hi as u64;
                }
            }
            next[ns] = best;
            dec |= best_hi << ns;
        }
        metric.copy_from_slice(&next);
        decisions.push(dec);
    }

    // Terminated: trace back from state zero.
    let mut state = 0usize;
    let mut bits = vec![0u8; n_in];
    for t in (0..n_in).rev() {
        bits[t] = (state & 1) as u8;
        let hi = ((decisions[t] >> state) & 1) as usize;
        state = (state >> 1) | (hi << (MEMORY - 1));
    }
    bits.truncate(n_info);
    bits
}

/// Periodic puncturer. `keep[s][k]` says whether stream s's bit in phase k
/// of the period survives.
#[derive(Clone, Debug)]
pub struct Puncturer {
    keep: [Vec<bool>; 2],
}

impl Puncturer {
    /// Pattern [11111 / 10101]: 8 of 10 mother bits kept, rate 5/8.
    pub fn rate_5_8() -> Self {
        Puncturer {
            keep: [vec![true; 5], vec![true, false, true, false, true]],
        }
    }

    /// No puncturing (rate 1/2).
    pub fn none() -> Self {
        Puncturer { keep: [vec![true], vec![true]] }
    }

    pub fn period(&self) -> usize {
        self.keep[0].len()
    }

    fn kept(&self, mother_index: usize) -> bool {
        let stream = mother_index % 2;
        let phase = (mother_index / 2) % self.period();
        self.keep[stream][phase]
    }

    pub fn punctured_len(&self, mother_len: usize) -> usize {
        (0..mother_len).filter(|&i| self.kept(i)).count()
    }

    pub fn puncture<T: Copy>(&self, mother: &[T]) -> Vec<T> {
        mother
            .iter()
            .enumerate()
            .filter(|(i, _)| self.kept(*i))
            .map(|(_, &v)| v)
            .collect()
    }

    /// Restores mother-stream positions, filling punctured slots with 0.0.
    pub fn depuncture(&self, kept: &[f64], mother_len: usize) -> Vec<f64> {
        assert_eq!(kept.len(), self.punctured_len(mother_len), "kept stream length mismatch");
        let mut out = vec![0.0f64; mother_len];
        let mut src = kept.iter();
        for (i, slot) in out.iter_mut().enumerate() {
            if self.kept(i) {
                *slot = *src.next().unwrap();
            }
        }
        out
    }
}
