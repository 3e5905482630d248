//! Target memory and the byte-level semantics of generic-payload accesses.

use std::cell::RefCell;
use std::rc::Rc;

use crate::payload::{Command, GenericPayload, ResponseStatus};

/// Byte-addressable memory occupying `[base, base + len)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Storage {
    base: u64,
    bytes: Vec<u8>,
}

pub type SharedStorage = Rc<RefCell<Storage>>;

impl Storage {
    pub fn new(base: u64, size: usize, fill: u8) -> Self {
        Storage { base, bytes: vec![fill; size] }
    }

    pub fn from_bytes(base: u64, bytes: Vec<u8>) -> Self {
        Storage { base, bytes }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Inclusive last address.
    pub fn last_address(&self) -> u64 {
        self.base + self.bytes.len() as u64 - 1
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn contains(&self, address: u64) -> bool {
        self.offset(address).is_some()
    }

    fn offset(&self, address: u64) -> Option<usize> {
        let offset = address.checked_sub(self.base)?;
        usize::try_from(offset).ok().filter(|&o| o < self.bytes.len())
    }

    /// Offset of beat `index` of `p`, honoring the streaming width.
    fn beat_offset(&self, p: &GenericPayload, index: usize) -> Option<usize> {
        let address = p.address.checked_add((index % p.streaming_width) as u64)?;
        self.offset(address)
    }

    /// Writes the enabled beats of `p` in order. Beats past the storage end
    /// stop the write with `ADDRESS_ERROR`; earlier beats stay applied.
    pub fn apply_write(&mut self, p: &GenericPayload) -> ResponseStatus {
        debug_assert_eq!(p.command, Command::Write);
        for i in 0..p.data_length {
            let Some(offset) = self.beat_offset(p, i) else {
                return ResponseStatus::AddressError;
            };
            if p.beat_enabled(i) {
                self.bytes[offset] = p.data[i];
            }
        }
        ResponseStatus::Ok
    }

    /// Mirror of [`Storage::apply_write`]; disabled payload bytes are left
    /// as they were.
    pub fn apply_read(&self, p: &mut GenericPayload) -> ResponseStatus {
        debug_assert_eq!(p.command, Command::Read);
        for i in 0..p.data_length {
            let Some(offset) = self.beat_offset(p, i) else {
                return ResponseStatus::AddressError;
            };
            if p.beat_enabled(i) {
                p.data[i] = self.bytes[offset];
            }
        }
        ResponseStatus::Ok
    }

    /// Executes `p` against this storage, including the IGNORE no-op.
    pub fn execute(&mut self, p: &mut GenericPayload) -> ResponseStatus {
        match p.command {
            Command::Write => self.apply_write(p),
            Command::Read => self.apply_read(p),
            Command::Ignore => ResponseStatus::Ok,
        }
    }

    /// Timeless contiguous access ignoring byte enables and streaming.
    /// Returns how many bytes were transferred.
    pub fn debug_transfer(&mut self, p: &mut GenericPayload) -> usize {
        let Some(offset) = self.offset(p.address) else {
            return 0;
        };
        let count = p.data_length.min(p.data.len()).min(self.bytes.len() - offset);
        match p.command {
            Command::Read => p.data[..count].copy_from_slice(&self.bytes[offset..offset + count]),
            Command::Write => self.bytes[offset..offset + count].copy_from_slice(&p.data[..count]),
            Command::Ignore => return 0,
        }
        count
    }
}
