//! The two-part response code and its exact verifiers.
//!
//! Part one hides the private symbol with a one-time pad over its alphabet:
//! `ceil(log2 |X|)` fixed bits of `(x + w) mod |X|` under a uniform key `w`.
//! Part two is the prefix codeword of the coupling atom `u`, drawn from the
//! sampler row of the realized `(x, message)`. The pad makes part one
//! uniform regardless of `x`; the sampler makes the atom independent of `x`;
//! together the response carries exactly zero information about `x`, which
//! [`exact_leakage`] certifies in rational arithmetic rather than by
//! sampling.
//!
//! Decoding mirrors the construction: strip the pad, prefix-decode the atom,
//! reconstruct the multicast message as `f(u, x)`, then run the cache-side
//! decoder of [`crate::caching`].

use num_traits::Zero;
use rand::Rng;
use rand::distr::weighted::WeightedIndex;
use rand::prelude::Distribution;
use std::collections::BTreeMap;

use crate::bits::{bits_to_index, bits_to_string, index_to_bits};
use crate::prob::{FiniteDistribution, JointTable};
use crate::rational::{Ratio, pow2_inverse, ratio, to_f64};
use crate::scenario::{DemandCase, DemandContext};
use crate::{Error, Result};

/// `ceil(log2 n)`; 0 for the degenerate single-symbol alphabet.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 { 0 } else { (n - 1).ilog2() as usize + 1 }
}

/// A shared-key realization `w` in `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedKey {
    pub value: u64,
    pub size: u64,
}

impl SharedKey {
    pub fn new(value: u64, size: u64) -> Result<Self> {
        if size == 0 || value >= size {
            return Err(Error::InvalidParameter(format!(
                "key {value} outside alphabet of size {size}"
            )));
        }
        Ok(Self { value, size })
    }
}

/// `(x + w) mod modulus`; the key alphabet must equal the modulus.
pub fn otp_encrypt(x: usize, key: &SharedKey, modulus: usize) -> Result<usize> {
    if key.size != modulus as u64 {
        return Err(Error::KeyMismatch {
            key: key.size,
            modulus: modulus as u64,
        });
    }
    if x >= modulus {
        return Err(Error::InvalidParameter(format!(
            "plaintext {x} outside modulus {modulus}"
        )));
    }
    Ok((x + key.value as usize) % modulus)
}

/// Inverse of [`otp_encrypt`].
pub fn otp_decrypt(ciphertext: usize, key: &SharedKey, modulus: usize) -> Result<usize> {
    if key.size != modulus as u64 {
        return Err(Error::KeyMismatch {
            key: key.size,
            modulus: modulus as u64,
        });
    }
    if ciphertext >= modulus {
        return Err(Error::DecodeFailure(format!(
            "ciphertext {ciphertext} outside modulus {modulus}"
        )));
    }
    Ok((ciphertext + modulus - key.value as usize) % modulus)
}

/// A prefix-free code over `{0, .., n-1}`; zero-mass symbols carry no
/// codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    codewords: Vec<Option<Vec<bool>>>,
}

impl PrefixCode {
    /// Optimal (Huffman) code lengths with canonical codeword assignment.
    /// Equal-weight merges prefer the subtree containing the lowest symbol
    /// index, and shorter codes sort lexicographically first, so the code is
    /// reproducible bit for bit.
    pub fn build(dist: &FiniteDistribution) -> Result<Self> {
        let support: Vec<usize> = (0..dist.len())
            .filter(|&i| !dist.mass(i).is_zero())
            .collect();
        if support.is_empty() {
            return Err(Error::DimensionMismatch("coding an empty support".into()));
        }
        let mut codewords = vec![None; dist.len()];
        if support.len() == 1 {
            // a single symbol needs no bits
            codewords[support[0]] = Some(Vec::new());
            return Ok(Self { codewords });
        }
        // Huffman merge; node = (weight, lowest symbol in subtree, members)
        let mut heap: Vec<(Ratio, usize, Vec<usize>)> = support
            .iter()
            .map(|&s| (dist.mass(s).clone(), s, vec![s]))
            .collect();
        let mut lengths = vec![0usize; dist.len()];
        while heap.len() > 1 {
            heap.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
            let (wa, ma, members_a) = heap.pop().unwrap();
            let (wb, mb, members_b) = heap.pop().unwrap();
            let mut members = members_a;
            members.extend(members_b);
            for &s in &members {
                lengths[s] += 1;
            }
            heap.push((wa + wb, ma.min(mb), members));
        }
        // canonical assignment: sort by (length, symbol)
        let mut order: Vec<usize> = support.clone();
        order.sort_by_key(|&s| (lengths[s], s));
        let mut code: usize = 0;
        let mut prev_len = lengths[order[0]];
        for (i, &s) in order.iter().enumerate() {
            if i > 0 {
                code = (code + 1) << (lengths[s] - prev_len);
                prev_len = lengths[s];
            }
            codewords[s] = Some(index_to_bits(code, lengths[s]));
        }
        Ok(Self { codewords })
    }

    pub fn codeword(&self, symbol: usize) -> Result<&[bool]> {
        self.codewords
            .get(symbol)
            .and_then(|c| c.as_deref())
            .ok_or_else(|| Error::EncodingError(format!("symbol {symbol} has no codeword")))
    }

    pub fn length(&self, symbol: usize) -> Option<usize> {
        self.codewords.get(symbol).and_then(|c| c.as_ref()).map(Vec::len)
    }

    /// Exact Kraft sum over the assigned codewords.
    pub fn kraft_sum(&self) -> Ratio {
        self.codewords
            .iter()
            .flatten()
            .map(|c| pow2_inverse(c.len()))
            .sum()
    }

    /// Exact expected length under the given distribution.
    pub fn expected_length(&self, dist: &FiniteDistribution) -> Result<Ratio> {
        let mut total = Ratio::zero();
        for i in 0..dist.len() {
            let m = dist.mass(i);
            if m.is_zero() {
                continue;
            }
            let len = self
                .length(i)
                .ok_or_else(|| Error::EncodingError(format!("symbol {i} has no codeword")))?;
            total += m * ratio(len as i64, 1);
        }
        Ok(total)
    }

    /// Decodes one symbol from the front of `bits`, returning the symbol and
    /// the number of bits consumed.
    pub fn decode_prefix(&self, bits: &[bool]) -> Result<(usize, usize)> {
        // the code is prefix-free, so scanning by length is unambiguous
        let mut by_len: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, c) in self.codewords.iter().enumerate() {
            if let Some(c) = c {
                by_len.entry(c.len()).or_default().push(s);
            }
        }
        for (&len, symbols) in &by_len {
            if len > bits.len() {
                break;
            }
            for &s in symbols {
                if self.codewords[s].as_deref() == Some(&bits[..len]) {
                    return Ok((s, len));
                }
            }
        }
        Err(Error::DecodeFailure(format!(
            "no codeword prefixes {:?}",
            bits_to_string(bits)
        )))
    }
}

/// The transmitted response: a fixed-length padded symbol followed by a
/// prefix-free codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPartCodeword {
    pub part1: Vec<bool>,
    pub part2: Vec<bool>,
}

impl TwoPartCodeword {
    pub fn len_bits(&self) -> usize {
        self.part1.len() + self.part2.len()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = self.part1.clone();
        bits.extend_from_slice(&self.part2);
        bits
    }

    pub fn to_bit_string(&self) -> String {
        bits_to_string(&self.to_bits())
    }
}

/// Encodes a response with an explicitly chosen atom (used by the exhaustive
/// verifiers, which iterate every atom the sampler can emit).
pub fn encode_response_with_atom(
    ctx: &DemandContext,
    x: usize,
    cprime: usize,
    key: &SharedKey,
    atom: usize,
) -> Result<TwoPartCodeword> {
    let row = ctx
        .frep
        .sampler()
        .row(x, cprime)
        .ok_or_else(|| Error::EncodingError(format!("unreachable pair (x={x}, c={cprime})")))?;
    if row.mass(atom).is_zero() {
        return Err(Error::EncodingError(format!(
            "atom {atom} cannot be emitted at (x={x}, c={cprime})"
        )));
    }
    let ciphertext = otp_encrypt(x, key, ctx.x_size)?;
    Ok(TwoPartCodeword {
        part1: index_to_bits(ciphertext, ceil_log2(ctx.x_size)),
        part2: ctx.code.codeword(atom)?.to_vec(),
    })
}

/// Encodes a response, drawing the atom from the sampler row of the realized
/// `(x, message)` pair.
pub fn encode_response<R: Rng + ?Sized>(
    ctx: &DemandContext,
    x: usize,
    cprime: usize,
    key: &SharedKey,
    rng: &mut R,
) -> Result<TwoPartCodeword> {
    let row = ctx
        .frep
        .sampler()
        .row(x, cprime)
        .ok_or_else(|| Error::EncodingError(format!("unreachable pair (x={x}, c={cprime})")))?;
    let atom = sample_exact_weights(row, rng)?;
    encode_response_with_atom(ctx, x, cprime, key, atom)
}

fn sample_exact_weights<R: Rng + ?Sized>(dist: &FiniteDistribution, rng: &mut R) -> Result<usize> {
    let weights: Vec<f64> = dist.masses().map(to_f64).collect();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| Error::EncodingError(format!("degenerate sampler row: {e}")))?;
    Ok(index.sample(rng))
}

/// Recovers `(x, message index)` from a response.
pub fn decode_response(
    ctx: &DemandContext,
    codeword: &TwoPartCodeword,
    key: &SharedKey,
) -> Result<(usize, usize)> {
    let pad_bits = ceil_log2(ctx.x_size);
    if codeword.part1.len() != pad_bits {
        return Err(Error::DecodeFailure(format!(
            "part one has {} bits, expected {pad_bits}",
            codeword.part1.len()
        )));
    }
    let ciphertext = bits_to_index(&codeword.part1);
    let x = otp_decrypt(ciphertext, key, ctx.x_size)?;
    let (atom, consumed) = ctx.code.decode_prefix(&codeword.part2)?;
    if consumed != codeword.part2.len() {
        return Err(Error::DecodeFailure(
            "trailing bits after the prefix codeword".into(),
        ));
    }
    Ok((x, ctx.frep.outcome(atom, x)))
}

/// Exact expected response length in bits: the pad width plus the expected
/// prefix-codeword length under the atom distribution.
pub fn expected_length(ctx: &DemandContext) -> Result<(Ratio, f64)> {
    let part2 = ctx.code.expected_length(ctx.frep.atom_masses())?;
    let total = ratio(ceil_log2(ctx.x_size) as i64, 1) + part2;
    let as_f64 = to_f64(&total);
    Ok((total, as_f64))
}

/// Result of the exact leakage computation.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    /// `I(X; response)` in bits, evaluated in floating point from the exact
    /// joint.
    pub bits: f64,
    /// Exact factorization check of the `(X, response)` joint; the leakage is
    /// zero if and only if this holds.
    pub exactly_zero: bool,
    /// Number of distinct response strings observed.
    pub response_alphabet: usize,
}

/// Builds the exact joint of `(X, transmitted bit string)` by enumerating
/// every `(x, source state, key, atom)` combination with positive mass, and
/// reports the mutual information. With `with_otp = false` the pad is
/// skipped (part one carries `x` in the clear), which is useful only to
/// demonstrate that the verifier catches the leak.
pub fn exact_leakage(ctx: &DemandContext, with_otp: bool) -> Result<LeakageReport> {
    let t = ctx.x_size; // uniform key over the private alphabet
    let key_mass = Ratio::new(1.into(), (t as u64).into());
    let pad_bits = ceil_log2(ctx.x_size);
    let mut responses: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, Ratio)> = Vec::new();
    for state in ctx.positive_states()? {
        let row = ctx
            .frep
            .sampler()
            .row(state.x, state.cprime)
            .ok_or_else(|| {
                Error::EncodingError(format!(
                    "state (x={}, c={}) has no sampler row",
                    state.x, state.cprime
                ))
            })?;
        for atom in 0..ctx.frep.num_atoms() {
            let atom_mass = row.mass(atom);
            if atom_mass.is_zero() {
                continue;
            }
            let part2 = ctx.code.codeword(atom)?;
            let base = &state.mass * atom_mass;
            for w in 0..t {
                let key = SharedKey::new(w as u64, t as u64)?;
                let part1_value = if with_otp {
                    otp_encrypt(state.x, &key, ctx.x_size)?
                } else {
                    state.x
                };
                let mut bits = index_to_bits(part1_value, pad_bits);
                bits.extend_from_slice(part2);
                let next = responses.len();
                let column = *responses.entry(bits).or_insert(next);
                entries.push((state.x, column, &base * &key_mass));
            }
        }
    }
    let joint = JointTable::from_entries(ctx.x_size, responses.len(), &entries)?;
    Ok(LeakageReport {
        bits: joint.mutual_information_bits(),
        exactly_zero: joint.is_product(),
        response_alphabet: responses.len(),
    })
}

/// Result of the exhaustive losslessness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LosslessnessReport {
    pub ok: bool,
    pub tuples_checked: u64,
    pub failure: Option<String>,
}

/// Runs every `(source state, key, emittable atom)` tuple through the
/// encoder and decoder and checks that every user recovers its demanded file
/// exactly (for direct sources, that the message index itself is recovered).
pub fn verify_losslessness(ctx: &DemandContext) -> Result<LosslessnessReport> {
    let t = ctx.x_size;
    let mut tuples = 0u64;
    for state in ctx.positive_states()? {
        let row = ctx.frep.sampler().row(state.x, state.cprime).ok_or_else(|| {
            Error::EncodingError(format!(
                "state (x={}, c={}) has no sampler row",
                state.x, state.cprime
            ))
        })?;
        let case = ctx.case_for_state(&state)?;
        for atom in 0..ctx.frep.num_atoms() {
            if row.mass(atom).is_zero() {
                continue;
            }
            for w in 0..t {
                let key = SharedKey::new(w as u64, t as u64)?;
                let cw = encode_response_with_atom(ctx, state.x, state.cprime, &key, atom)?;
                tuples += 1;
                let (x, cprime) = decode_response(ctx, &cw, &key)?;
                if x != state.x || cprime != state.cprime {
                    return Ok(LosslessnessReport {
                        ok: false,
                        tuples_checked: tuples,
                        failure: Some(format!(
                            "recovered (x={x}, c={cprime}) from (x={}, c={})",
                            state.x, state.cprime
                        )),
                    });
                }
                if let DemandCase::Cached {
                    params,
                    demand,
                    caches,
                    db,
                } = &case
                {
                    let msg = crate::caching::DeliveryMessage::from_bits(
                        params,
                        &index_to_bits(cprime, params.message_bits()),
                    )?;
                    for k in 0..params.users() {
                        let got = crate::caching::user_decode(params, k, &caches[k], &msg, demand)?;
                        if got != db.file(demand.demanded(k)) {
                            return Ok(LosslessnessReport {
                                ok: false,
                                tuples_checked: tuples,
                                failure: Some(format!(
                                    "user {k} misdecoded file {} at state (x={}, y={:?})",
                                    demand.demanded(k) + 1,
                                    state.x,
                                    state.carrier
                                )),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(LosslessnessReport {
        ok: true,
        tuples_checked: tuples,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::FiniteDistribution;
    use crate::rational::ratio;

    fn dist(entries: &[(i64, i64)]) -> FiniteDistribution {
        FiniteDistribution::new(entries.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    #[test]
    fn otp_is_modular_addition() {
        let key = SharedKey::new(2, 4).unwrap();
        assert_eq!(otp_encrypt(3, &key, 4).unwrap(), 1);
        assert_eq!(otp_decrypt(1, &key, 4).unwrap(), 3);
        let zero = SharedKey::new(0, 4).unwrap();
        assert_eq!(otp_encrypt(3, &zero, 4).unwrap(), 3);
    }

    #[test]
    fn otp_requires_matching_key_size() {
        let key = SharedKey::new(1, 3).unwrap();
        assert!(matches!(
            otp_encrypt(0, &key, 4),
            Err(Error::KeyMismatch { key: 3, modulus: 4 })
        ));
    }

    #[test]
    fn otp_ciphertext_is_uniform_for_every_plaintext() {
        for x in 0..4usize {
            let mut seen = [false; 4];
            for w in 0..4 {
                let key = SharedKey::new(w, 4).unwrap();
                seen[otp_encrypt(x, &key, 4).unwrap()] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn dyadic_code_meets_entropy_exactly() {
        let d = dist(&[(1, 2), (1, 4), (1, 4)]);
        let code = PrefixCode::build(&d).unwrap();
        let lengths: Vec<usize> = (0..3).map(|s| code.length(s).unwrap()).collect();
        assert_eq!(lengths, vec![1, 2, 2]);
        assert_eq!(code.expected_length(&d).unwrap(), ratio(3, 2));
        assert_eq!(code.kraft_sum(), ratio(1, 1));
    }

    #[test]
    fn two_symbol_code_uses_one_bit_each() {
        let d = dist(&[(7, 8), (1, 8)]);
        let code = PrefixCode::build(&d).unwrap();
        assert_eq!(code.length(0), Some(1));
        assert_eq!(code.length(1), Some(1));
        assert_eq!(code.expected_length(&d).unwrap(), ratio(1, 1));
    }

    /// Exhaustive minimum over all length profiles satisfying the Kraft
    /// inequality, independent of the Huffman construction.
    fn brute_force_optimal_length(d: &FiniteDistribution, max_len: usize) -> Ratio {
        let n = d.len();
        let mut best: Option<Ratio> = None;
        let mut lengths = vec![1usize; n];
        loop {
            let kraft: Ratio = lengths.iter().map(|&l| pow2_inverse(l)).sum();
            if kraft <= ratio(1, 1) {
                let cost: Ratio = (0..n).map(|i| d.mass(i) * ratio(lengths[i] as i64, 1)).sum();
                if best.as_ref().is_none_or(|b| &cost < b) {
                    best = Some(cost);
                }
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return best.expect("some profile satisfies Kraft");
                }
                pos -= 1;
                lengths[pos] += 1;
                if lengths[pos] <= max_len {
                    break;
                }
                lengths[pos] = 1;
                if pos == 0 {
                    return best.expect("some profile satisfies Kraft");
                }
            }
        }
    }

    #[test]
    fn huffman_matches_brute_force_on_four_symbols() {
        let d = dist(&[(1, 2), (1, 4), (1, 6), (1, 12)]);
        let code = PrefixCode::build(&d).unwrap();
        let lengths: Vec<usize> = (0..4).map(|s| code.length(s).unwrap()).collect();
        assert_eq!(lengths, vec![1, 2, 3, 3]);
        let expected = code.expected_length(&d).unwrap();
        assert_eq!(expected, ratio(7, 4));
        assert_eq!(expected, brute_force_optimal_length(&d, 6));
    }

    #[test]
    fn expected_length_is_within_one_bit_of_entropy() {
        for d in [
            dist(&[(1, 3), (1, 3), (1, 3)]),
            dist(&[(9, 10), (1, 20), (1, 20)]),
            dist(&[(1, 6), (1, 3), (1, 4), (1, 4)]),
        ] {
            let code = PrefixCode::build(&d).unwrap();
            let el = to_f64(&code.expected_length(&d).unwrap());
            let h = d.entropy_bits();
            assert!(h - 1e-9 <= el && el <= h + 1.0 + 1e-9);
            assert!(code.kraft_sum() <= ratio(1, 1));
        }
    }

    #[test]
    fn single_symbol_support_gets_an_empty_codeword() {
        let d = dist(&[(0, 1), (1, 1)]);
        let code = PrefixCode::build(&d).unwrap();
        assert_eq!(code.length(1), Some(0));
        assert!(code.length(0).is_none());
        assert_eq!(code.expected_length(&d).unwrap(), ratio(0, 1));
        // decoding consumes nothing
        assert_eq!(code.decode_prefix(&[]).unwrap(), (1, 0));
    }

    #[test]
    fn canonical_codewords_round_trip() {
        let d = dist(&[(1, 2), (1, 4), (1, 6), (1, 12)]);
        let code = PrefixCode::build(&d).unwrap();
        for s in 0..4 {
            let mut bits = code.codeword(s).unwrap().to_vec();
            bits.push(true); // trailing data must not confuse the decoder
            let (sym, used) = code.decode_prefix(&bits).unwrap();
            assert_eq!(sym, s);
            assert_eq!(used, bits.len() - 1);
        }
        assert!(code.decode_prefix(&[]).is_err());
    }

    #[test]
    fn ceil_log2_handles_degenerate_alphabets() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }
}
