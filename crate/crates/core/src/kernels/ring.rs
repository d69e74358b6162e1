use super::KernelError;

/// Bounded token store with one write pointer and `k` independent read
/// pointers.
///
/// Pointers are unbounded monotonic counters; a slot is addressed by
/// `index % capacity`. A slot is reused only after every reader has passed
/// it, so `wptr - min(rptr) <= capacity` always holds.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiReadRingBuffer<T> {
    slots: Vec<T>,
    wptr: u64,
    rptr: Vec<u64>,
}

impl<T: Copy + Default> MultiReadRingBuffer<T> {
    pub fn new(capacity: usize, readers: usize) -> Result<Self, KernelError> {
        if capacity == 0 {
            return Err(KernelError::ZeroCapacity);
        }
        if readers == 0 {
            return Err(KernelError::NoReaders);
        }
        Ok(MultiReadRingBuffer {
            slots: vec![T::default(); capacity],
            wptr: 0,
            rptr: vec![0; readers],
        })
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn readers(&self) -> usize {
        self.rptr.len()
    }

    pub fn wptr(&self) -> u64 {
        self.wptr
    }

    pub fn rptr(&self, reader: usize) -> Result<u64, KernelError> {
        self.rptr
            .get(reader)
            .copied()
            .ok_or(KernelError::UnknownReadPort(reader))
    }

    fn min_rptr(&self) -> u64 {
        self.rptr.iter().copied().min().unwrap_or(self.wptr)
    }

    /// Unread tokens for `reader`.
    pub fn population(&self, reader: usize) -> Result<usize, KernelError> {
        Ok((self.wptr - self.rptr(reader)?) as usize)
    }

    pub fn free_space(&self) -> usize {
        self.capacity() - (self.wptr - self.min_rptr()) as usize
    }

    pub fn write(&mut self, token: T) -> Result<(), KernelError> {
        if self.free_space() == 0 {
            return Err(KernelError::Full);
        }
        let cap = self.capacity() as u64;
        self.slots[(self.wptr % cap) as usize] = token;
        self.wptr += 1;
        Ok(())
    }

    pub fn read(&mut self, reader: usize) -> Result<T, KernelError> {
        self.read_bounded(reader, self.wptr)
    }

    /// Reads only if the reader is strictly below `limit` (≤ wptr).
    pub(crate) fn read_bounded(&mut self, reader: usize, limit: u64) -> Result<T, KernelError> {
        let r = self.rptr(reader)?;
        if r >= limit {
            return Err(KernelError::Empty(reader));
        }
        let cap = self.capacity() as u64;
        let t = self.slots[(r % cap) as usize];
        self.rptr[reader] = r + 1;
        Ok(t)
    }
}
