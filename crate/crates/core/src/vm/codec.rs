//! Bit-level codecs: Elias-gamma (jump offsets) and the self-delimiting
//! `1^k 0 bin(|s|) s` string code.

use thiserror::Error;

use crate::bits::BitString;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("gamma code at offset {pos} runs past the end of the input")]
    GammaTruncated { pos: usize },
    #[error("gamma code at offset {pos} encodes a value wider than 64 bits")]
    GammaOverflow { pos: usize },
    #[error("malformed self-delimiting prefix: {0}")]
    MalformedPrefix(&'static str),
}

/// Elias-gamma code of `n >= 1`: `floor(log2 n)` zeros followed by `n` in binary.
pub fn gamma_encode(n: u64) -> BitString {
    assert!(n >= 1, "gamma code is defined for n >= 1");
    let width = 64 - n.leading_zeros() as usize;
    let mut out = BitString::from_bits(vec![false; width - 1]);
    out.extend_from(&BitString::from_u64(n, width));
    out
}

/// Decodes a gamma code starting at `pos`; returns the value and the number
/// of bits consumed.
pub fn gamma_decode(bits: &BitString, pos: usize) -> Result<(u64, usize), CodecError> {
    let b = bits.bits();
    let mut zeros = 0;
    loop {
        match b.get(pos + zeros) {
            None => return Err(CodecError::GammaTruncated { pos }),
            Some(false) => zeros += 1,
            Some(true) => break,
        }
    }
    if zeros >= 64 {
        return Err(CodecError::GammaOverflow { pos });
    }
    let start = pos + zeros;
    if start + zeros + 1 > b.len() {
        return Err(CodecError::GammaTruncated { pos });
    }
    let n = b[start..=start + zeros].iter().fold(0u64, |acc, &bit| (acc << 1) | bit as u64);
    Ok((n, 2 * zeros + 1))
}

/// `1^k 0 bin(|s|) s` where `k` is the bit width of `|s|`. The empty string
/// encodes as a lone `"0"`.
pub fn encode_self_delim(s: &BitString) -> BitString {
    let n = s.len() as u64;
    let width = 64 - n.leading_zeros() as usize;
    let mut out = BitString::from_bits(vec![true; width]);
    out.push(false);
    out.extend_from(&BitString::from_u64(n, width));
    out.extend_from(s);
    out
}

/// Length of `encode_self_delim(s)` for a string of `len` bits.
pub fn self_delim_len(len: usize) -> usize {
    let width = usize::BITS as usize - len.leading_zeros() as usize;
    2 * width + 1 + len
}

/// Inverse of [`encode_self_delim`]; returns the decoded string and the
/// number of bits consumed. Trailing bits beyond the code are ignored.
pub fn decode_self_delim(b: &BitString) -> Result<(BitString, usize), CodecError> {
    let bits = b.bits();
    let width = bits.iter().take_while(|&&x| x).count();
    if width == bits.len() {
        return Err(CodecError::MalformedPrefix("unterminated unary header"));
    }
    if width > 63 {
        return Err(CodecError::MalformedPrefix("length field too wide"));
    }
    let len_start = width + 1;
    if bits.len() < len_start + width {
        return Err(CodecError::MalformedPrefix("truncated length field"));
    }
    let len_bits = &bits[len_start..len_start + width];
    if width > 0 && !len_bits[0] {
        return Err(CodecError::MalformedPrefix("length field has a leading zero"));
    }
    let n = len_bits.iter().fold(0u64, |acc, &bit| (acc << 1) | bit as u64) as usize;
    let body = len_start + width;
    if bits.len() < body + n {
        return Err(CodecError::MalformedPrefix("payload shorter than declared length"));
    }
    Ok((b.slice(body, body + n), body + n))
}
