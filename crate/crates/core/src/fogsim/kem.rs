//! Bulk payload sealing under a key carried by a target-group element.
//!
//! The key is `SHA-256(bytes(m))`; the keystream is `SHA-256(key ‖ i)` for
//! block counter `i`, and a 32-byte tag `SHA-256(key ‖ "tag" ‖ body)` is
//! appended.

use sha2::{Digest, Sha256};

use crate::pairing::{GTElement, DIGEST_BYTES};

pub const TAG_BYTES: usize = DIGEST_BYTES;

fn key_of(m: &GTElement) -> [u8; DIGEST_BYTES] {
    Sha256::digest(m.to_bytes()).into()
}

fn keystream_xor(key: &[u8; DIGEST_BYTES], data: &mut [u8]) {
    for (i, chunk) in data.chunks_mut(DIGEST_BYTES).enumerate() {
        let block = Sha256::new()
            .chain_update(key)
            .chain_update((i as u64).to_be_bytes())
            .finalize();
        for (b, k) in chunk.iter_mut().zip(block) {
            *b ^= k;
        }
    }
}

fn tag(key: &[u8; DIGEST_BYTES], body: &[u8]) -> [u8; TAG_BYTES] {
    Sha256::new()
        .chain_update(key)
        .chain_update(b"tag")
        .chain_update(body)
        .finalize()
        .into()
}

pub fn seal(m: &GTElement, plaintext: &[u8]) -> Vec<u8> {
    let key = key_of(m);
    let mut body = plaintext.to_vec();
    keystream_xor(&key, &mut body);
    let t = tag(&key, &body);
    body.extend_from_slice(&t);
    body
}

/// `None` if the tag does not match, i.e. the wrong key or a modified body.
pub fn open(m: &GTElement, sealed: &[u8]) -> Option<Vec<u8>> {
    let split = sealed.len().checked_sub(TAG_BYTES)?;
    let (body, t) = sealed.split_at(split);
    let key = key_of(m);
    if tag(&key, body)[..] != *t {
        return None;
    }
    let mut out = body.to_vec();
    keystream_xor(&key, &mut out);
    Some(out)
}
