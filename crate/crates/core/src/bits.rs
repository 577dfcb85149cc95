//! Bit-vector helpers: files, subfiles, and codewords are sequences of bits,
//! serialized as hex strings (most significant bit first) in configs and
//! reports.

use crate::{Error, Result};

/// Parses a hex string into exactly `len` bits, most significant first.
/// The encoded value must fit in `len` bits.
pub fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<bool>> {
    let hex = hex.trim();
    if hex.is_empty() || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::InvalidParameter(format!(
            "invalid hex bit-string {hex:?}"
        )));
    }
    if len > usize::BITS as usize - 1 {
        return Err(Error::SizeLimit(format!("bit length {len} too large")));
    }
    let value = usize::from_str_radix(hex, 16)
        .map_err(|_| Error::InvalidParameter(format!("hex literal {hex:?} overflows")))?;
    if len < usize::BITS as usize && value >> len != 0 {
        return Err(Error::InvalidParameter(format!(
            "hex value {hex:?} does not fit in {len} bits"
        )));
    }
    Ok(index_to_bits(value, len))
}

/// Hex rendering, MSB first, one digit per started nibble. Empty input maps
/// to the empty string.
pub fn bits_to_hex(bits: &[bool]) -> String {
    if bits.is_empty() {
        return String::new();
    }
    let digits = bits.len().div_ceil(4);
    let mut value = bits_to_index(bits);
    let mut out = vec![b'0'; digits];
    for slot in out.iter_mut().rev() {
        let nibble = (value & 0xf) as u32;
        *slot = char::from_digit(nibble, 16).unwrap() as u8;
        value >>= 4;
    }
    String::from_utf8(out).unwrap()
}

/// Big-endian integer value of a bit sequence.
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

/// The `len` low bits of `index`, most significant first.
pub fn index_to_bits(index: usize, len: usize) -> Vec<bool> {
    (0..len).rev().map(|i| (index >> i) & 1 == 1).collect()
}

pub fn xor_bits(a: &[bool], b: &[bool]) -> Result<Vec<bool>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "xor of {} and {} bits",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
}

/// Renders bits as a `"0101"` string for reports.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let bits = hex_to_bits("2", 2).unwrap();
        assert_eq!(bits, vec![true, false]);
        assert_eq!(bits_to_hex(&bits), "2");

        let bits = hex_to_bits("a3", 8).unwrap();
        assert_eq!(bits_to_index(&bits), 0xa3);
        assert_eq!(bits_to_hex(&bits), "a3");
    }

    #[test]
    fn hex_must_fit_declared_width() {
        assert!(hex_to_bits("4", 2).is_err());
        assert!(hex_to_bits("zz", 4).is_err());
        assert_eq!(hex_to_bits("0", 3).unwrap(), vec![false; 3]);
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..16 {
            assert_eq!(bits_to_index(&index_to_bits(idx, 4)), idx);
        }
        assert!(index_to_bits(0, 0).is_empty());
    }

    #[test]
    fn xor_checks_lengths() {
        assert_eq!(
            xor_bits(&[true, false], &[true, true]).unwrap(),
            vec![false, true]
        );
        assert!(xor_bits(&[true], &[true, false]).is_err());
    }
}
