//! The graph6 text format for simple undirected graphs (up to 62 vertices).

use crate::error::{Error, Result};

/// Encode adjacency rows as a graph6 string.
pub fn encode(adj: &[u32]) -> String {
    let n = adj.len();
    assert!(n <= 62, "graph6 short form supports at most 62 vertices");
    let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for row in adj.iter().take(j) {
            bits.push((row >> j) & 1 == 1);
        }
    }
    let mut out = String::with_capacity(1 + bits.len().div_ceil(6));
    out.push((n as u8 + 63) as char);
    for chunk in bits.chunks(6) {
        let mut v = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            v |= (b as u8) << (5 - i);
        }
        out.push((v + 63) as char);
    }
    out
}

/// Decode a graph6 string into adjacency rows.
pub fn decode(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes = s.as_bytes();
    let Some(&first) = bytes.first() else {
        return Err(Error::Parse("empty graph6 string".into()));
    };
    if !(63..=125).contains(&first) {
        return Err(Error::Parse(format!("unsupported graph6 size byte {first}")));
    }
    let n = (first - 63) as usize;
    if n > 32 {
        return Err(Error::SizeLimit(format!("{n} vertices exceeds 32")));
    }
    let needed = (n * n.saturating_sub(1) / 2).div_ceil(6);
    if bytes.len() != 1 + needed {
        return Err(Error::Parse(format!(
            "graph6 string for {n} vertices needs {needed} data bytes, found {}",
            bytes.len() - 1
        )));
    }
    let mut bits = Vec::with_capacity(needed * 6);
    for &b in &bytes[1..] {
        if !(63..=126).contains(&b) {
            return Err(Error::Parse(format!("invalid graph6 byte {b}")));
        }
        let v = b - 63;
        for i in (0..6).rev() {
            bits.push((v >> i) & 1 == 1);
        }
    }
    let mut adj = vec![0u32; n];
    let mut idx = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[idx] {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
            idx += 1;
        }
    }
    Ok(adj)
}
