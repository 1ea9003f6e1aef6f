//! Byte layouts for online reveal frames and offline dealer frames. All
//! integers are little-endian; ring elements are `Ring::BYTES` wide.

use crate::error::{Error, Result};
use crate::ring::Ring;

/// One party's contribution to one reveal in one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub round: u64,
    pub sender: u32,
    pub correlation: u64,
    pub payload: Vec<u8>,
}

const FRAME_HEADER: usize = 8 + 4 + 8 + 8;

fn take<const N: usize>(bytes: &[u8], at: &mut usize) -> Result<[u8; N]> {
    let end = *at + N;
    let slice = bytes
        .get(*at..end)
        .ok_or_else(|| Error::Wire(format!("truncated at byte {}", *at)))?;
    *at = end;
    Ok(slice.try_into().expect("slice has length N"))
}

fn elements_to_bytes<R: Ring>(elems: &[R]) -> Vec<u8> {
    let mut out = Vec::with_capacity(elems.len() * R::BYTES);
    for e in elems {
        e.write_le(&mut out);
    }
    out
}

fn bytes_to_elements<R: Ring>(payload: &[u8]) -> Result<Vec<R>> {
    if !payload.len().is_multiple_of(R::BYTES) {
        return Err(Error::Wire(format!(
            "payload of {} bytes is not a whole number of {}-byte elements",
            payload.len(),
            R::BYTES
        )));
    }
    Ok(payload.chunks_exact(R::BYTES).map(R::read_le).collect())
}

impl Frame {
    pub fn new<R: Ring>(round: u64, sender: u32, correlation: u64, elems: &[R]) -> Self {
        Frame {
            round,
            sender,
            correlation,
            payload: elements_to_bytes(elems),
        }
    }

    pub fn elements<R: Ring>(&self) -> Result<Vec<R>> {
        bytes_to_elements(&self.payload)
    }

    /// `round | sender | correlation | payload length | payload`.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FRAME_HEADER + self.payload.len());
        out.extend_from_slice(&self.round.to_le_bytes());
        out.extend_from_slice(&self.sender.to_le_bytes());
        out.extend_from_slice(&self.correlation.to_le_bytes());
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut at = 0;
        let round = u64::from_le_bytes(take(bytes, &mut at)?);
        let sender = u32::from_le_bytes(take(bytes, &mut at)?);
        let correlation = u64::from_le_bytes(take(bytes, &mut at)?);
        let len = u64::from_le_bytes(take(bytes, &mut at)?) as usize;
        let payload = bytes
            .get(at..at + len)
            .ok_or_else(|| {
                Error::Wire(format!(
                    "payload claims {len} bytes, {} present",
                    bytes.len() - at
                ))
            })?
            .to_vec();
        if at + len != bytes.len() {
            return Err(Error::Wire(format!(
                "{} trailing bytes",
                bytes.len() - at - len
            )));
        }
        Ok(Frame {
            round,
            sender,
            correlation,
            payload,
        })
    }
}

/// Which piece of a correlation an offline frame carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    TripleA,
    TripleB,
    TripleC,
    /// Auxiliary-set entry for a subset bitmask.
    Subset(u32),
    /// Wide reveal mask for input `i`.
    Wide(u32),
    MatrixA,
    MatrixB,
    MatrixC,
}

impl Role {
    fn tag(self) -> (u8, u32) {
        match self {
            Role::TripleA => (0, 0),
            Role::TripleB => (1, 0),
            Role::TripleC => (2, 0),
            Role::Subset(m) => (3, m),
            Role::Wide(i) => (4, i),
            Role::MatrixA => (5, 0),
            Role::MatrixB => (6, 0),
            Role::MatrixC => (7, 0),
        }
    }

    fn from_tag(tag: u8, arg: u32) -> Result<Self> {
        Ok(match tag {
            0 => Role::TripleA,
            1 => Role::TripleB,
            2 => Role::TripleC,
            3 => Role::Subset(arg),
            4 => Role::Wide(arg),
            5 => Role::MatrixA,
            6 => Role::MatrixB,
            7 => Role::MatrixC,
            t => return Err(Error::Wire(format!("unknown role tag {t}"))),
        })
    }
}

/// Dealer → party frame carrying one share of one correlation component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OfflineFrame {
    pub session: u64,
    pub correlation: u64,
    pub role: Role,
    pub shape: Vec<u32>,
    pub payload: Vec<u8>,
}

impl OfflineFrame {
    pub fn new<R: Ring>(
        session: u64,
        correlation: u64,
        role: Role,
        shape: Vec<u32>,
        elems: &[R],
    ) -> Self {
        OfflineFrame {
            session,
            correlation,
            role,
            shape,
            payload: elements_to_bytes(elems),
        }
    }

    pub fn elements<R: Ring>(&self) -> Result<Vec<R>> {
        let elems = bytes_to_elements::<R>(&self.payload)?;
        let expected: usize = self.shape.iter().map(|d| *d as usize).product();
        if elems.len() != expected {
            return Err(Error::Wire(format!(
                "shape {:?} needs {expected} elements, payload has {}",
                self.shape,
                elems.len()
            )));
        }
        Ok(elems)
    }

    /// `session | correlation | role tag | role arg | ndims | dims | payload length | payload`.
    pub fn encode(&self) -> Vec<u8> {
        let (tag, arg) = self.role.tag();
        let mut out = Vec::new();
        out.extend_from_slice(&self.session.to_le_bytes());
        out.extend_from_slice(&self.correlation.to_le_bytes());
        out.push(tag);
        out.extend_from_slice(&arg.to_le_bytes());
        out.push(self.shape.len() as u8);
        for d in &self.shape {
            out.extend_from_slice(&d.to_le_bytes());
        }
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut at = 0;
        let session = u64::from_le_bytes(take(bytes, &mut at)?);
        let correlation = u64::from_le_bytes(take(bytes, &mut at)?);
        let [tag] = take::<1>(bytes, &mut at)?;
        let arg = u32::from_le_bytes(take(bytes, &mut at)?);
        let [ndims] = take::<1>(bytes, &mut at)?;
        let shape = (0..ndims)
            .map(|_| take(bytes, &mut at).map(u32::from_le_bytes))
            .collect::<Result<Vec<_>>>()?;
        let len = u64::from_le_bytes(take(bytes, &mut at)?) as usize;
        if bytes.len() != at + len {
            return Err(Error::Wire(format!(
                "payload claims {len} bytes, {} present",
                bytes.len() - at
            )));
        }
        Ok(OfflineFrame {
            session,
            correlation,
            role: Role::from_tag(tag, arg)?,
            shape,
            payload: bytes[at..].to_vec(),
        })
    }
}
