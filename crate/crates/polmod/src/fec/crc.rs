//! CRC-16 block checksum (polynomial 0x1021, zero initial state, no
//! reflection). Zero init keeps the map GF(2)-linear, which the codec's
//! linearity property relies on.

pub const CRC_BITS: usize = 16;

const POLY: u16 = 0x1021;

/// Checksum of a 0/1 bit slice, returned as 16 bits, most significant
/// first.
pub fn crc16(bits: &[u8]) -> [u8; CRC_BITS] {
    let mut reg: u16 = 0;
    for &b in bits {
        debug_assert!(b <= 1);
        let feedback = (reg >> 15) as u8 ^ b;
        reg <<= 1;
        if feedback == 1 {
            reg ^= POLY;
        }
    }
    let mut out = [0u8; CRC_BITS];
    for (i, o) in out.iter_mut().enumerate() {
        *o = ((reg >> (15 - i)) & 1) as u8;
    }
    out
}

/// True when the trailing 16 bits of `frame` are the checksum of the rest.
pub fn crc16_check(frame: &[u8]) -> bool {
    assert!(frame.len() >= CRC_BITS);
    let (data, tail) = frame.split_at(frame.len() - CRC_BITS);
    crc16(data) == tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn byte_bits(bytes: &[u8]) -> Vec<u8> {
        bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1))
            .collect()
    }

    #[test]
    fn matches_xmodem_reference_vector() {
        // CRC-16/XMODEM("123456789") = 0x31C3.
        let bits = byte_bits(b"123456789");
        let crc = crc16(&bits);
        let value = crc.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16);
        assert_eq!(value, 0x31C3);
    }

    #[test]
    fn zero_message_has_zero_checksum() {
        assert_eq!(crc16(&[0; 128]), [0; 16]);
    }

    #[test]
    fn checksum_is_linear() {
        let a: Vec<u8> = (0..200).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let b: Vec<u8> = (0..200).map(|i| ((i * 13 + 1) % 3 % 2) as u8).collect();
        let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = crc16(&a);
        let cb = crc16(&b);
        let cx = crc16(&xor);
        for i in 0..CRC_BITS {
            assert_eq!(cx[i], ca[i] ^ cb[i]);
        }
    }

    #[test]
    fn detects_every_single_bit_flip() {
        let data: Vec<u8> = (0..64).map(|i| ((i * 31 + 5) % 7 % 2) as u8).collect();
        let mut frame = data.clone();
        frame.extend_from_slice(&crc16(&data));
        assert!(crc16_check(&frame));
        for i in 0..frame.len() {
            let mut corrupted = frame.clone();
            corrupted[i] ^= 1;
            assert!(!crc16_check(&corrupted), "flip at {i} undetected");
        }
    }
}
